#include "fixlab/stage_sets.hpp"

#include <algorithm>

namespace fixlab {

bool StageSet::contains(Steps n) const { return std::binary_search(members.begin(), members.end(), n); }

bool StageSet::subset_of(const StageSet& later) const {
  return std::includes(later.members.begin(), later.members.end(), members.begin(), members.end());
}

namespace {

StageSet collect(Steps stage, const std::vector<char>& hit) {
  StageSet out;
  out.stage = stage;
  for (Steps n = 0; n < hit.size(); ++n) {
    if (hit[n]) out.members.push_back(n);
  }
  return out;
}

std::vector<HaltingEntry> collect_entries(const std::vector<Steps>& entry_stage, Steps none) {
  std::vector<HaltingEntry> out;
  for (Steps n = 0; n < entry_stage.size(); ++n) {
    if (entry_stage[n] != none) out.push_back({n, entry_stage[n]});
  }
  std::sort(out.begin(), out.end(),
            [](const HaltingEntry& a, const HaltingEntry& b) { return std::tie(a.stage, a.n) < std::tie(b.stage, b.n); });
  return out;
}

constexpr Steps kNever = ~Steps{0};

}  // namespace

StageSet enumerate_domain(const Nat& code, Steps stage) {
  const Program program = decode(code);
  const auto count = static_cast<long long>(stage) + 1;
  std::vector<char> hit(static_cast<std::size_t>(count), 0);
#pragma omp parallel for schedule(dynamic, 16)
  for (long long n = 0; n < count; ++n) {
    hit[static_cast<std::size_t>(n)] = eval(program, Nat(n), stage).converged() ? 1 : 0;
  }
  return collect(stage, hit);
}

StageSet halting_approx(Steps stage) {
  const auto count = static_cast<long long>(stage) + 1;
  std::vector<char> hit(static_cast<std::size_t>(count), 0);
#pragma omp parallel for schedule(dynamic, 16)
  for (long long n = 0; n < count; ++n) {
    const Nat index(n);
    hit[static_cast<std::size_t>(n)] = eval(index, index, stage).converged() ? 1 : 0;
  }
  return collect(stage, hit);
}

std::vector<HaltingEntry> halting_entries(Steps max_stage) {
  const auto count = static_cast<long long>(max_stage) + 1;
  std::vector<Steps> entry(static_cast<std::size_t>(count), kNever);
#pragma omp parallel for schedule(dynamic, 16)
  for (long long n = 0; n < count; ++n) {
    const Nat index(n);
    const EvalOutcome out = eval(index, index, max_stage);
    if (out.converged()) entry[static_cast<std::size_t>(n)] = std::max<Steps>(static_cast<Steps>(n), out.steps_used);
  }
  return collect_entries(entry, kNever);
}

namespace reference {

StageSet enumerate_domain(const Nat& code, Steps stage) {
  StageSet out;
  out.stage = stage;
  for (Steps n = 0; n <= stage; ++n) {
    if (eval(code, Nat(n), stage).converged()) out.members.push_back(n);
  }
  return out;
}

StageSet halting_approx(Steps stage) {
  StageSet out;
  out.stage = stage;
  for (Steps n = 0; n <= stage; ++n) {
    if (eval(Nat(n), Nat(n), stage).converged()) out.members.push_back(n);
  }
  return out;
}

std::vector<HaltingEntry> halting_entries(Steps max_stage) {
  std::vector<HaltingEntry> out;
  for (Steps n = 0; n <= max_stage; ++n) {
    const EvalOutcome run = eval(Nat(n), Nat(n), max_stage);
    if (run.converged()) out.push_back({n, std::max(n, run.steps_used)});
  }
  std::stable_sort(out.begin(), out.end(), [](const HaltingEntry& a, const HaltingEntry& b) { return a.stage < b.stage; });
  return out;
}

}  // namespace reference

DomainWatcher::DomainWatcher(Nat code) : program_(decode(code)) {}

const StageSet& DomainWatcher::advance_to(Steps stage) {
  if (started_ && stage <= set_.stage) return set_;
  const Steps first_new = started_ ? set_.stage + 1 : 0;
  for (Steps n = first_new; n <= stage; ++n) {
    pending_.push_back({n, std::make_unique<Machine>(program_, Nat(n))});
  }
  started_ = true;
  set_.stage = stage;

  const auto count = static_cast<long long>(pending_.size());
  std::vector<char> done(pending_.size(), 0);
#pragma omp parallel for schedule(dynamic, 64)
  for (long long i = 0; i < count; ++i) {
    done[static_cast<std::size_t>(i)] = pending_[static_cast<std::size_t>(i)].machine->advance(stage) ? 1 : 0;
  }

  std::vector<Pending> still;
  still.reserve(pending_.size());
  for (std::size_t i = 0; i < pending_.size(); ++i) {
    if (done[i]) {
      set_.members.push_back(pending_[i].input);
    } else {
      still.push_back(std::move(pending_[i]));
    }
  }
  pending_ = std::move(still);
  std::sort(set_.members.begin(), set_.members.end());
  return set_;
}

bool DomainWatcher::nonempty_at(Steps stage) {
  if (!set_.members.empty()) return true;
  return !advance_to(stage).members.empty();
}

}  // namespace fixlab
