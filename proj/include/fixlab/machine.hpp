#pragma once

#include <memory>
#include <optional>
#include <unordered_set>
#include <vector>

#include "fixlab/nat.hpp"
#include "fixlab/program.hpp"

namespace fixlab {

/// Finite characteristic function of a set at a fixed stage. Positions that
/// are not members (in particular everything >= bound()) answer 0.
class OracleSnapshot {
 public:
  OracleSnapshot() = default;
  explicit OracleSnapshot(std::vector<Nat> members);

  bool contains(const Nat& position) const;
  const std::vector<Nat>& members() const { return members_; }
  /// 1 + largest member, 0 for the empty set.
  Nat bound() const;

 private:
  std::vector<Nat> members_;  // sorted, unique
};

enum class EvalStatus { Converged, Exhausted };

struct EvalOutcome {
  EvalStatus status = EvalStatus::Exhausted;
  Nat value;  // meaningful iff converged
  Steps steps_used = 0;
  Nat use;  // 1 + largest queried position, 0 without queries

  bool converged() const { return status == EvalStatus::Converged; }
  friend bool operator==(const EvalOutcome&, const EvalOutcome&) = default;
};

// Small-step evaluator. A step is one transition of the machine: entering a
// node, or returning a value into the innermost pending frame. Steps taken by
// apply/clock sub-computations count against the same budget.
//
// Per-construct costs when children are nullary or const: a nullary node or
// const costs 1; comp adds 2 transitions of its own, pair/add/monus add 2,
// apply adds 2 (code, argument) and then runs the decoded program in place,
// mu costs 1 + 2 per probe of f, cases adds 1, clock adds 3 plus one to hand
// back the result.
//
// A machine can be paused at a budget and resumed later with a larger one;
// the trajectory never depends on the budget, only how far along it gets.
class Machine {
 public:
  Machine(Program program, Nat input, std::shared_ptr<const OracleSnapshot> oracle = nullptr);

  /// Runs until convergence or until steps_used() == budget.
  /// Returns true once converged.
  bool advance(Steps budget);

  bool converged() const { return done_; }
  Steps steps_used() const { return steps_; }
  const Nat& use() const { return use_; }
  EvalOutcome outcome() const;

 private:
  enum class FrameKind : std::uint8_t {
    CompThen,
    PairLeft,
    PairRight,
    BinaryLeft,
    BinaryRight,
    ApplyCode,
    ApplyArg,
    MuProbe,
    CasesTest,
    ClockCode,
    ClockArg,
    ClockBudget,
    ClockRun,
  };

  struct Frame {
    FrameKind kind = FrameKind::CompThen;
    const Node* node = nullptr;
    Nat a;
    Nat b;
    Steps start = 0;
    Steps limit = 0;
  };

  bool fire_clock();
  void push(FrameKind kind, const Node* node, Nat a = 0, Nat b = 0);
  void enter(const Node* node, Nat input);
  void give(Nat value);
  void transition();
  const Node* pin(const Nat& code);
  Nat oracle_bit(const Nat& position);

  Program root_;
  std::shared_ptr<const OracleSnapshot> oracle_;
  std::vector<Frame> stack_;
  std::vector<std::size_t> clocks_;  // indices of ClockRun frames, outermost first
  std::vector<Program> pinned_;
  std::unordered_set<const Node*> pinned_set_;

  bool returning_ = false;
  const Node* node_ = nullptr;
  Nat register_;  // input when entering, value when returning
  Steps steps_ = 0;
  Nat use_ = 0;
  bool done_ = false;
};

EvalOutcome eval(const Program& program, const Nat& input, Steps budget,
                 std::shared_ptr<const OracleSnapshot> oracle = nullptr);
EvalOutcome eval(const Nat& code, const Nat& input, Steps budget,
                 std::shared_ptr<const OracleSnapshot> oracle = nullptr);

/// smn(e, x): a code of y -> phi_e(<x, y>). Pure code arithmetic; e is never
/// run or decoded. eval(smn(e, x), y) takes exactly steps(e, <x, y>) + kSmnOverhead.
Nat smn(const Nat& e, const Nat& x);
inline constexpr Steps kSmnOverhead = 7;

}  // namespace fixlab
