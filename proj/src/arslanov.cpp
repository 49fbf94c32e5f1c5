#include "fixlab/arslanov.hpp"

namespace fixlab {

using namespace build;

Program search_body(const Nat& fhat) {
  const Program n = comp(left(), left());
  const Program x = comp(right(), left());
  // inside mu the input is <<<n, x>, y>, s>
  const Program n_in = comp(n, left());
  const Program halted_by = clock(n_in, n_in, add(n_in, right()));
  const Program s_n = add(n, mu(monus(konst(1), halted_by)));
  return apply(apply(konst(fhat), pair_of(x, s_n)), right());
}

Program search_transform(const Nat& fhat) { return quote_smn(konst(search_body(fhat)->code), id()); }

Nat build_h(const Nat& fhat) { return fixpoint_param(search_transform(fhat)->code); }

Nat h_value(const Nat& fhat, const Nat& n) { return param_fixed_point(search_transform(fhat)->code, n); }

Nat stage_transform(const Nat& fhat, Steps stage) {
  return apply(konst(fhat), pair_of(id(), konst(stage)))->code;
}

std::vector<const ArslanovProbe*> agreeing_probes(const ArslanovRun& run) {
  std::vector<const ArslanovProbe*> out;
  for (const ArslanovProbe& p : run.probes) {
    if (p.report.verified) out.push_back(&p);
  }
  return out;
}

namespace {

template <class Entries>
ArslanovRun search(const Nat& fhat, Steps max_stage, const std::vector<GridPoint>& grid, Steps probe_limit,
                   Entries&& entries, bool parallel) {
  ArslanovRun run;
  run.fhat_code = fhat;
  run.h_code = build_h(fhat);
  run.stage = max_stage;
  if (max_stage == 0) return run;
  const Nat transform_code = search_transform(fhat)->code;
  for (const HaltingEntry& e : entries(max_stage)) {
    run.candidates.push_back({e.n, e.stage, param_fixed_point(transform_code, Nat(e.n))});
  }
  const Nat image = stage_transform(fhat, max_stage);
  const auto count = static_cast<long long>(std::min<std::size_t>(probe_limit, run.candidates.size()));
  run.probes.resize(static_cast<std::size_t>(count));
#pragma omp parallel for schedule(dynamic, 1) if (parallel)
  for (long long i = 0; i < count; ++i) {
    const ArslanovCandidate& c = run.candidates[static_cast<std::size_t>(i)];
    ArslanovProbe& p = run.probes[static_cast<std::size_t>(i)];
    p.n = c.n;
    p.h_of_n = c.h_of_n;
    p.report = verify_fixed_point(c.h_of_n, image, grid);
  }
  return run;
}

}  // namespace

ArslanovRun run_search(const Nat& fhat, Steps max_stage, const std::vector<GridPoint>& probe_grid,
                       Steps probe_limit) {
  return search(fhat, max_stage, probe_grid, probe_limit, [](Steps s) { return halting_entries(s); }, true);
}

namespace reference {

ArslanovRun run_search(const Nat& fhat, Steps max_stage, const std::vector<GridPoint>& probe_grid,
                       Steps probe_limit) {
  return search(fhat, max_stage, probe_grid, probe_limit, [](Steps s) { return reference::halting_entries(s); },
                false);
}

}  // namespace reference

}  // namespace fixlab
