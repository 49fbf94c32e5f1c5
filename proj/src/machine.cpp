#include "fixlab/machine.hpp"

#include <algorithm>

namespace fixlab {

OracleSnapshot::OracleSnapshot(std::vector<Nat> members) : members_(std::move(members)) {
  std::sort(members_.begin(), members_.end());
  members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
}

bool OracleSnapshot::contains(const Nat& position) const {
  return std::binary_search(members_.begin(), members_.end(), position);
}

Nat OracleSnapshot::bound() const { return members_.empty() ? Nat(0) : members_.back() + 1; }

Machine::Machine(Program program, Nat input, std::shared_ptr<const OracleSnapshot> oracle)
    : root_(std::move(program)), oracle_(std::move(oracle)) {
  enter(root_.get(), std::move(input));
}

bool Machine::advance(Steps budget) {
  while (!done_) {
    if (returning_ && stack_.empty()) {
      done_ = true;
      break;
    }
    if (steps_ >= budget) return false;
    ++steps_;
    if (!fire_clock()) transition();
  }
  return true;
}

EvalOutcome Machine::outcome() const {
  EvalOutcome out;
  out.status = done_ ? EvalStatus::Converged : EvalStatus::Exhausted;
  if (done_) out.value = register_;
  out.steps_used = steps_;
  out.use = use_;
  return out;
}

// A clock whose sub-computation has already used its whole allowance is cut
// off on the next transition; outer clocks are checked first since cutting
// them discards everything inside.
bool Machine::fire_clock() {
  for (std::size_t k = 0; k < clocks_.size(); ++k) {
    const std::size_t index = clocks_[k];
    const Frame& frame = stack_[index];
    const bool handing_back = returning_ && index + 1 == stack_.size();
    if (handing_back) continue;
    if (steps_ - 1 - frame.start >= frame.limit) {
      stack_.resize(index);
      clocks_.resize(k);
      give(0);
      return true;
    }
  }
  return false;
}

void Machine::push(FrameKind kind, const Node* node, Nat a, Nat b) {
  Frame frame;
  frame.kind = kind;
  frame.node = node;
  frame.a = std::move(a);
  frame.b = std::move(b);
  stack_.push_back(std::move(frame));
}

void Machine::enter(const Node* node, Nat input) {
  returning_ = false;
  node_ = node;
  register_ = std::move(input);
}

void Machine::give(Nat value) {
  returning_ = true;
  register_ = std::move(value);
}

const Node* Machine::pin(const Nat& code) {
  Program p = decode_cached(code);
  const Node* raw = p.get();
  if (pinned_set_.insert(raw).second) pinned_.push_back(std::move(p));
  return raw;
}

Nat Machine::oracle_bit(const Nat& position) {
  if (!oracle_) return 0;
  if (position + 1 > use_) use_ = position + 1;
  return oracle_->contains(position) ? 1 : 0;
}

void Machine::transition() {
  if (!returning_) {
    const Node* n = node_;
    switch (n->op) {
      case Op::Id:
        give(std::move(register_));
        return;
      case Op::Succ:
        give(register_ + 1);
        return;
      case Op::Left:
        give(unpair(register_).first);
        return;
      case Op::Right:
        give(unpair(register_).second);
        return;
      case Op::Query:
        give(oracle_bit(register_));
        return;
      case Op::Mk:
        give(fixlab::mk(register_));
        return;
      case Op::Const:
        give(n->constant);
        return;
      case Op::Comp:
        push(FrameKind::CompThen, n);
        enter(n->kids[1].get(), std::move(register_));
        return;
      case Op::PairOf:
        push(FrameKind::PairLeft, n, register_);
        enter(n->kids[0].get(), std::move(register_));
        return;
      case Op::Add:
      case Op::Monus:
        push(FrameKind::BinaryLeft, n, register_);
        enter(n->kids[0].get(), std::move(register_));
        return;
      case Op::Apply:
        push(FrameKind::ApplyCode, n, register_);
        enter(n->kids[0].get(), std::move(register_));
        return;
      case Op::Mu: {
        Nat probe = pair(register_, 0);
        push(FrameKind::MuProbe, n, std::move(register_), 0);
        enter(n->kids[0].get(), std::move(probe));
        return;
      }
      case Op::Cases:
        push(FrameKind::CasesTest, n, register_);
        enter(n->kids[0].get(), std::move(register_));
        return;
      case Op::Clock:
        push(FrameKind::ClockCode, n, register_);
        enter(n->kids[0].get(), std::move(register_));
        return;
    }
    return;
  }

  Frame& top = stack_.back();
  const Node* n = top.node;
  switch (top.kind) {
    case FrameKind::CompThen:
      stack_.pop_back();
      enter(n->kids[0].get(), std::move(register_));
      return;
    case FrameKind::PairLeft:
      top.kind = FrameKind::PairRight;
      top.b = std::move(register_);
      enter(n->kids[1].get(), std::move(top.a));
      return;
    case FrameKind::PairRight: {
      Nat result = pair(top.b, register_);
      stack_.pop_back();
      give(std::move(result));
      return;
    }
    case FrameKind::BinaryLeft:
      top.kind = FrameKind::BinaryRight;
      top.b = std::move(register_);
      enter(n->kids[1].get(), std::move(top.a));
      return;
    case FrameKind::BinaryRight: {
      Nat result;
      if (n->op == Op::Add) {
        result = top.b + register_;
      } else {
        result = top.b > register_ ? Nat(top.b - register_) : Nat(0);
      }
      stack_.pop_back();
      give(std::move(result));
      return;
    }
    case FrameKind::ApplyCode:
      top.kind = FrameKind::ApplyArg;
      top.b = std::move(register_);
      enter(n->kids[1].get(), std::move(top.a));
      return;
    case FrameKind::ApplyArg: {
      Nat code = std::move(top.b);
      stack_.pop_back();
      enter(pin(code), std::move(register_));
      return;
    }
    case FrameKind::MuProbe:
      if (register_ == 0) {
        Nat found = std::move(top.b);
        stack_.pop_back();
        give(std::move(found));
      } else {
        ++top.b;
        enter(n->kids[0].get(), pair(top.a, top.b));
      }
      return;
    case FrameKind::CasesTest: {
      const Node* branch = register_ == 0 ? n->kids[1].get() : n->kids[2].get();
      Nat input = std::move(top.a);
      stack_.pop_back();
      enter(branch, std::move(input));
      return;
    }
    case FrameKind::ClockCode:
      top.kind = FrameKind::ClockArg;
      top.b = std::move(register_);
      enter(n->kids[1].get(), top.a);
      return;
    case FrameKind::ClockArg: {
      top.kind = FrameKind::ClockBudget;
      // From here on `a` holds the argument value instead of the input.
      Nat arg = std::move(register_);
      Nat input = std::move(top.a);
      top.a = std::move(arg);
      enter(n->kids[2].get(), std::move(input));
      return;
    }
    case FrameKind::ClockBudget: {
      top.kind = FrameKind::ClockRun;
      top.limit = to_steps(register_);
      top.start = steps_;
      Nat code = std::move(top.b);
      Nat arg = std::move(top.a);
      clocks_.push_back(stack_.size() - 1);
      enter(pin(code), std::move(arg));
      return;
    }
    case FrameKind::ClockRun: {
      Nat result = register_ + 1;
      stack_.pop_back();
      clocks_.pop_back();
      give(std::move(result));
      return;
    }
  }
}

EvalOutcome eval(const Program& program, const Nat& input, Steps budget,
                 std::shared_ptr<const OracleSnapshot> oracle) {
  Machine machine(program, input, std::move(oracle));
  machine.advance(budget);
  return machine.outcome();
}

EvalOutcome eval(const Nat& code, const Nat& input, Steps budget, std::shared_ptr<const OracleSnapshot> oracle) {
  return eval(decode_cached(code), input, budget, std::move(oracle));
}

Nat smn(const Nat& e, const Nat& x) {
  const std::array<Nat, 2> tail{const_code(x), Nat(0)};
  const std::array<Nat, 2> whole{e, node_code(Op::PairOf, tail)};
  return node_code(Op::Comp, whole);
}

}  // namespace fixlab
