#pragma once

#include <vector>

#include "fixlab/recursion.hpp"
#include "fixlab/stage_sets.hpp"

namespace fixlab {

// Fixed-point candidates from an approximation fhat(<x, s>) of f(x).
// W_{h(n)} = W_{fhat(<h(n), s_n>)} if n enters K at stage s_n, empty otherwise.

/// Program on <<n, x>, y>: finds s_n (diverging if n is not in K), then
/// runs phi_{fhat(<x, s_n>)} on y.
Program search_body(const Nat& fhat);
/// <n, x> -> code of y -> search_body(<<n, x>, y>).
Program search_transform(const Nat& fhat);
/// Code of the total h from the parameterized recursion theorem.
Nat build_h(const Nat& fhat);
/// Host-side h(n), equal to eval(build_h(fhat), n).
Nat h_value(const Nat& fhat, const Nat& n);

struct ArslanovCandidate {
  Steps n = 0;
  Steps s_n = 0;  // minimal s with n in K_s
  Nat h_of_n;
  friend bool operator==(const ArslanovCandidate&, const ArslanovCandidate&) = default;
};

/// h(n) against fhat(<h(n), stage>) at the run's final stage.
struct ArslanovProbe {
  Steps n = 0;
  Nat h_of_n;
  FixedPointReport report;
};

struct ArslanovRun {
  Nat fhat_code;
  Nat h_code;
  Steps stage = 0;
  std::vector<ArslanovCandidate> candidates;  // by (s_n, n)
  std::vector<ArslanovProbe> probes;          // the first probe_limit candidates
};

inline constexpr Steps kDefaultProbeLimit = 16;

/// fhat(<x, s>) -> image at `stage`, as a unary code in x.
Nat stage_transform(const Nat& fhat, Steps stage);

ArslanovRun run_search(const Nat& fhat, Steps max_stage, const std::vector<GridPoint>& probe_grid,
                       Steps probe_limit = kDefaultProbeLimit);

/// Probes that agree on every grid point.
std::vector<const ArslanovProbe*> agreeing_probes(const ArslanovRun& run);

namespace reference {

ArslanovRun run_search(const Nat& fhat, Steps max_stage, const std::vector<GridPoint>& probe_grid,
                       Steps probe_limit = kDefaultProbeLimit);

}  // namespace reference

}  // namespace fixlab
