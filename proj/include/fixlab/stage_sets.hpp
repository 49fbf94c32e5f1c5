#pragma once

#include <memory>
#include <vector>

#include "fixlab/machine.hpp"

namespace fixlab {

/// Finite approximation of a c.e. set at a stage. Members are sorted.
struct StageSet {
  Steps stage = 0;
  std::vector<Steps> members;

  bool contains(Steps n) const;
  bool empty() const { return members.empty(); }
  /// members(this) is a subset of members(later).
  bool subset_of(const StageSet& later) const;
  friend bool operator==(const StageSet&, const StageSet&) = default;
};

/// n enters the halting set K = {n : phi_n(n) converges} at stage
/// max(n, steps(n, n)); `stage` is that minimal s.
struct HaltingEntry {
  Steps n = 0;
  Steps stage = 0;
  friend bool operator==(const HaltingEntry&, const HaltingEntry&) = default;
};

// OpenMP kernels. Every input is evaluated independently, so the loops over
// inputs are split across threads; results are gathered by index and come
// out identical to the serial versions in `reference`.

/// W_{e,s} = { n <= s : eval(e, n, s) converged }.
StageSet enumerate_domain(const Nat& code, Steps stage);
/// K_s = { n <= s : eval(n, n, s) converged }.
StageSet halting_approx(Steps stage);
/// Every n <= max_stage that enters K by max_stage, sorted by (stage, n).
std::vector<HaltingEntry> halting_entries(Steps max_stage);

namespace reference {

StageSet enumerate_domain(const Nat& code, Steps stage);
StageSet halting_approx(Steps stage);
std::vector<HaltingEntry> halting_entries(Steps max_stage);

}  // namespace reference

/// Incremental W_{e,s}: keeps one paused machine per not-yet-converged input
/// and resumes them as the stage grows. Stages must be requested in
/// nondecreasing order.
class DomainWatcher {
 public:
  explicit DomainWatcher(Nat code);

  const StageSet& advance_to(Steps stage);
  /// Same as !advance_to(stage).empty() but skips work once a member is known.
  bool nonempty_at(Steps stage);
  const StageSet& current() const { return set_; }

 private:
  struct Pending {
    Steps input;
    std::unique_ptr<Machine> machine;
  };

  Program program_;
  StageSet set_;
  bool started_ = false;
  std::vector<Pending> pending_;
};

}  // namespace fixlab
