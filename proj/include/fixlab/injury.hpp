#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fixlab/fpf.hpp"
#include "fixlab/stage_sets.hpp"

namespace fixlab {

/// Candidate functions f = {e}, keyed by e.
using Candidates = std::map<Steps, Nat>;

struct RequirementId {
  enum class Kind { L, R };
  Kind kind = Kind::L;
  Steps index = 0;

  /// L_0 > R_0 > L_1 > R_1 > ...; lower rank is higher priority.
  Steps rank() const { return 2 * index + (kind == Kind::R ? 1 : 0); }
  friend bool operator==(const RequirementId&, const RequirementId&) = default;
};

std::string requirement_name(const RequirementId& r);

enum class ActionKind {
  SetRestraint,         // payload: {restraint}
  PickWitness,          // payload: {n}
  B1Enumerate,          // payload: {n, f(n), <n, <f(n), 0>>}
  B2Enumerate,          // payload: {n, f(n), <n, <f(n), 1>>}
  InitializeWitnesses,  // payload: {e, then (i, n_i) for each witness dropped}
  DropRestraints,       // payload: {e + 1, then each i whose restraint was dropped}
};

std::string_view action_name(ActionKind a);
std::optional<ActionKind> parse_action(std::string_view name);

struct ActionEvent {
  Steps stage = 0;
  RequirementId requirement;
  ActionKind action = ActionKind::SetRestraint;
  std::vector<Nat> payload;
  friend bool operator==(const ActionEvent&, const ActionEvent&) = default;
};

/// Holds A_s, r(-, s) and n_{-, s} for s = stage; the next step performs
/// stage `stage`. Restraints are stored only when nonzero.
struct ConstructionState {
  Steps stage = 0;
  Steps lowness_bound = 0;
  std::set<Nat> A;
  std::map<Steps, Nat> restraints;
  std::map<Steps, Nat> witnesses;
  std::set<Nat> used_witnesses;
  std::vector<ActionEvent> log;

  Nat restraint(Steps e) const;
  std::optional<Nat> witness(Steps e) const;
  bool in_A(const Nat& element) const { return A.contains(element); }
  friend bool operator==(const ConstructionState&, const ConstructionState&) = default;
};

/// 1 + largest candidate index (0 without candidates).
Steps default_lowness_bound(const Candidates& candidates);

/// Stage-by-stage engine. Keeps paused machines between stages; its output
/// matches the from-scratch `step` exactly.
class InjuryEngine {
 public:
  InjuryEngine(Candidates candidates, ConstructionState state);
  InjuryEngine(Candidates candidates, Steps lowness_bound);
  ~InjuryEngine();
  InjuryEngine(InjuryEngine&&) noexcept;
  InjuryEngine& operator=(InjuryEngine&&) noexcept;

  bool requires_attention(const RequirementId& req);
  void step();
  void run_to(Steps stage);

  const ConstructionState& state() const { return state_; }
  const Candidates& candidates() const { return candidates_; }

  struct Caches;

 private:
  Candidates candidates_;
  ConstructionState state_;
  std::unique_ptr<Caches> caches_;
};

/// From scratch; req.index must be below state.stage for a true answer.
bool requires_attention(const ConstructionState& state, const RequirementId& req, const Candidates& candidates);
ConstructionState step(const ConstructionState& state, const Candidates& candidates);
ConstructionState run(const Candidates& candidates, Steps stages);
ConstructionState run(const Candidates& candidates, Steps stages, Steps lowness_bound);

enum class HValue { Empty, Nonempty };

/// W_{h(n, x)} is empty iff A(n, x, 0) = A(n, x, 1).
HValue derive_h(const ConstructionState& state, const Nat& n, const Nat& x);
/// loop_code() or canonical_nonempty_code(), matching derive_h.
Nat h_value_code(const ConstructionState& state, const Nat& n, const Nat& x);
/// Oracle program computing <n, x> -> h(n, x) from A with two queries.
Program h_program();

enum class AuditRule {
  WitnessEnumerations,  // at most one b1 and one b2 per witness, b1 first
  ActsAfterInitialize,  // R_e enumerates at most twice after its last initialization
  RestraintDiscipline,  // restraints move only by their own L or a higher-priority R
  MonotoneA,            // nothing leaves A, nothing enters twice, final A replays
  TwoBit,               // <n, x, 1> in A only after <n, x, 0>
  WitnessFreshness,     // picked witnesses exceed higher restraints and are new
  OneActorPerStage,
  BitFreeze,            // nothing touches <n, x, -> after its b2
  Malformed,            // event shape or final state does not match the log
};

std::string_view audit_rule_name(AuditRule r);

struct AuditViolation {
  AuditRule rule = AuditRule::Malformed;
  Steps stage = 0;
  std::string detail;
};

/// Replays the log alone and compares the result with the recorded state.
std::vector<AuditViolation> audit(const ConstructionState& state);

/// One certificate per candidate whose final witness has a decisive pattern:
/// (1,1) or (0,0) with W_{f(n),s} nonempty are permanent, (1,0) with
/// W_{f(n),s} empty is provisional.
std::vector<Certificate> disagreement_certificates(const ConstructionState& state, const Candidates& candidates);

}  // namespace fixlab
