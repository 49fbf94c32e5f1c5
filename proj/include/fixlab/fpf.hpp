#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fixlab/recursion.hpp"
#include "fixlab/stage_sets.hpp"

namespace fixlab {

enum class SetKind {
  Domain,       // W_index: n in W iff eval(index, n, s) converges and n <= s
  Graph,        // <x, v> in graph(index) iff eval(index, x, s) converges to v
  Halting,      // n in K iff eval(n, n, s) converges and n <= s
  Nonempty,     // t in the set iff W_{index, t} is nonempty; upward closed
  Constructed,  // a set built by a stage construction; replayed by its own audit
};

struct SetId {
  SetKind kind = SetKind::Domain;
  Nat index;
  friend bool operator==(const SetId&, const SetId&) = default;
};

std::string set_name(const SetId& set);

struct MembershipFact {
  Nat element;
  SetId set;
  Steps stage = 0;
  bool in = true;
  friend bool operator==(const MembershipFact&, const MembershipFact&) = default;
};

enum class CertificateKind { Permanent, Provisional };

struct Certificate {
  CertificateKind kind = CertificateKind::Provisional;
  std::string subject;
  std::vector<Nat> witness;
  Steps stage_or_budget = 0;
  std::vector<MembershipFact> evidence;
  friend bool operator==(const Certificate&, const Certificate&) = default;
};

/// Re-derives a fact from scratch. Constructed-set facts cannot be replayed
/// here and give nullopt.
std::optional<bool> replay_fact(const MembershipFact& fact);

/// A permanent certificate may cite positive facts about monotone sets, and
/// negative facts only about constructed sets (whose freeze rule is checked
/// by the construction audit). Provisional certificates may cite anything.
bool permanence_ok(const Certificate& cert);

/// Every replayable fact replays true.
bool evidence_replays(const Certificate& cert);

/// Permanent certificate iff g(e) and phi_e(e) both converge within budget to
/// the same value.
std::optional<Certificate> dnc_violation(const Nat& g, const Nat& e, Steps budget);

/// Provisional certificate naming the least element of W_{f(n),s} xor W_{n,s}.
std::optional<Certificate> fpf_discrepancy(const Nat& f, const Nat& n, Steps stage);

struct FpfPlusWitnessQuery {
  Nat delta_code;  // binary, applied to <n, x>
  Nat g_code;
  Steps n_bound = 1;
  Steps budget = 0;
  std::vector<GridPoint> grid = standard_grid();
};

enum class FpfPlusStatus {
  Certified,  // g found a fixed point for every n <= n_bound
  None,       // some n has delta(n, g(n)) exhausted or a grid disagreement
  GDiverged,  // g exhausted on some n <= n_bound; the probe says nothing
};

std::string_view fpf_plus_status_name(FpfPlusStatus s);

struct FpfPlusResult {
  FpfPlusStatus status = FpfPlusStatus::None;
  std::optional<Certificate> certificate;
  Steps deciding_n = 0;  // the n that ended the search, when not certified
};

FpfPlusResult fpf_plus_refute(const FpfPlusWitnessQuery& q);

/// delta_hat(<n, x>) = delta(x). eval(lift(d), <n, x>, b + kLiftOverhead)
/// matches eval(d, x, b) step for step.
Nat lift_fpf_to_fpfplus(const Nat& delta);
inline constexpr Steps kLiftOverhead = 3;

}  // namespace fixlab
