#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fixlab/fpf.hpp"

namespace fixlab {

// Layout of the universal psi: psi(<e, x, 0>) = phi_e(x); every <e, x, z>
// with z != 0 diverges. Candidate e stakes its kill on n_e = <e, 0, 1> and
// keeps its secondary point m_e = <e, 1, 1>, both in the divergent region.

Program psi_program();
EvalOutcome psi(const Nat& n, Steps budget);
/// psi(n) diverges by layout.
bool psi_divergent_region(const Nat& n);

Nat diagonal_witness(Steps e);
Nat secondary_point(Steps e);

/// delta(<n, x>) converges, to canonical_nonempty_code(), iff n = <e, 0, 1>
/// for some e and phi_e(n) converges to x.
Program delta_program();
EvalOutcome delta(const Nat& n, const Nat& x, Steps budget);

enum class DiagonalStatus { Waiting, Killed, SecondaryObserved };
std::string_view diagonal_status_name(DiagonalStatus s);
std::optional<DiagonalStatus> parse_diagonal_status(std::string_view name);

struct DiagonalCandidate {
  Nat witness;
  Nat secondary;
  DiagonalStatus status = DiagonalStatus::Waiting;
  std::optional<Nat> observed;  // f(n_e)
  std::optional<Steps> kill_stage;
  std::optional<Nat> secondary_value;  // f(m_e)
  friend bool operator==(const DiagonalCandidate&, const DiagonalCandidate&) = default;
};

struct DeltaEntry {
  Nat n;
  Nat x;
  Steps stage = 0;
  Steps candidate = 0;
  friend bool operator==(const DeltaEntry&, const DeltaEntry&) = default;
};

/// delta must stay undefined at (m, value).
struct Obligation {
  Nat m;
  Nat value;
  Steps stage = 0;
  Steps candidate = 0;
  friend bool operator==(const Obligation&, const Obligation&) = default;
};

struct DiagonalState {
  Steps stage = 0;
  Steps candidate_count = 0;
  std::map<Steps, DiagonalCandidate> candidates;
  std::vector<DeltaEntry> delta;  // in order of definition
  std::vector<Obligation> obligations;
  friend bool operator==(const DiagonalState&, const DiagonalState&) = default;
};

/// Performs stage `state.stage`: admits candidate e = stage (if below the
/// count), then runs every admitted candidate at the given budget.
DiagonalState diagonal_step(const DiagonalState& state, Steps budget);

/// Resumable form of repeated diagonal_step with budget = stage.
class DiagonalEngine {
 public:
  explicit DiagonalEngine(Steps candidate_count);
  ~DiagonalEngine();
  DiagonalEngine(DiagonalEngine&&) noexcept;
  DiagonalEngine& operator=(DiagonalEngine&&) noexcept;

  void step();
  void run_to(Steps stage);
  const DiagonalState& state() const { return state_; }

 private:
  struct Runs;
  DiagonalState state_;
  std::unique_ptr<Runs> runs_;
};

DiagonalState run_diagonal(Steps candidate_count, Steps stages);

enum class DiagonalAuditRule { Sparsity, WitnessRegion, Obligation, KillSoundness, DistinctWitnesses };
std::string_view diagonal_audit_rule_name(DiagonalAuditRule r);

struct DiagonalViolation {
  DiagonalAuditRule rule = DiagonalAuditRule::Sparsity;
  std::string detail;
};

std::vector<DiagonalViolation> audit_diagonal(const DiagonalState& state);

struct PsiSpec {
  std::optional<Nat> code;  // nullopt: the layout psi above

  static PsiSpec layout() { return {}; }
  static PsiSpec program(Nat c) { return {std::move(c)}; }
};

struct DeltaSpec {
  enum class Form { Binary, Unary, Graph };
  Form form = Form::Binary;
  Nat code;                  // Binary: applied to <n, x>; Unary: applied to x
  std::map<Nat, Nat> graph;  // Graph: the frozen entries n -> x

  static DeltaSpec binary(Nat c) { return {Form::Binary, std::move(c), {}}; }
  static DeltaSpec unary(Nat c) { return {Form::Unary, std::move(c), {}}; }
  static DeltaSpec from_state(const DiagonalState& state);
};

enum class AdnViolation { NoneYet, Condition2, Condition3, FDiverged };
std::string_view adn_violation_name(AdnViolation v);

struct AdnVerdict {
  Nat candidate;
  Steps n = 0;
  AdnViolation violated = AdnViolation::NoneYet;
  std::optional<Certificate> evidence;
};

struct AdnVerifyOptions {
  Steps n_bound = 0;
  Steps budget = 10'000;
  /// Inputs compared for condition 2; empty means inputs 0..15 at `budget`.
  std::vector<GridPoint> domain_grid;
  /// Probe exactly these points instead of 0..n_bound.
  std::vector<Nat> points;
};

/// Condition-3 probes first (psi-divergent points where delta may be
/// defined), stopping at the first permanent violation; condition-2 probes
/// on the psi-defined points only if none was found. Returns one verdict per
/// violating point; an empty list means none-yet.
std::vector<AdnVerdict> adn_verify(const Nat& f, const PsiSpec& psi_spec, const DeltaSpec& delta_spec,
                                   const AdnVerifyOptions& options);

AdnViolation summarize(const std::vector<AdnVerdict>& verdicts);

}  // namespace fixlab
