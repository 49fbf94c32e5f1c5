#include "fixlab/injury.hpp"

#include <algorithm>
#include <array>

namespace fixlab {

std::string requirement_name(const RequirementId& r) {
  return (r.kind == RequirementId::Kind::L ? "L" : "R") + std::to_string(r.index);
}

namespace {

constexpr std::array<std::pair<ActionKind, std::string_view>, 6> kActionNames{{
    {ActionKind::SetRestraint, "set-restraint"},
    {ActionKind::PickWitness, "pick-witness"},
    {ActionKind::B1Enumerate, "b1-enumerate"},
    {ActionKind::B2Enumerate, "b2-enumerate"},
    {ActionKind::InitializeWitnesses, "initialize-witnesses"},
    {ActionKind::DropRestraints, "drop-restraints"},
}};

Nat bit_position(const Nat& n, const Nat& x, int z) { return triple(n, x, z); }

RequirementId L(Steps e) { return {RequirementId::Kind::L, e}; }
RequirementId R(Steps e) { return {RequirementId::Kind::R, e}; }

}  // namespace

std::string_view action_name(ActionKind a) {
  for (const auto& [kind, name] : kActionNames) {
    if (kind == a) return name;
  }
  return "?";
}

std::optional<ActionKind> parse_action(std::string_view name) {
  for (const auto& [kind, n] : kActionNames) {
    if (n == name) return kind;
  }
  return std::nullopt;
}

Nat ConstructionState::restraint(Steps e) const {
  const auto it = restraints.find(e);
  return it == restraints.end() ? Nat(0) : it->second;
}

std::optional<Nat> ConstructionState::witness(Steps e) const {
  const auto it = witnesses.find(e);
  if (it == witnesses.end()) return std::nullopt;
  return it->second;
}

Steps default_lowness_bound(const Candidates& candidates) {
  return candidates.empty() ? 0 : candidates.rbegin()->first + 1;
}

// ---------------------------------------------------------------------------

struct InjuryEngine::Caches {
  struct LRun {
    std::uint64_t a_version = 0;
    std::unique_ptr<Machine> machine;
  };
  struct FRun {
    Nat witness;
    std::unique_ptr<Machine> machine;
  };

  std::uint64_t a_version = 0;
  std::shared_ptr<const OracleSnapshot> snapshot;
  std::uint64_t snapshot_version = ~std::uint64_t{0};
  std::map<Steps, LRun> l_runs;
  std::map<Steps, FRun> f_runs;
  std::map<Nat, DomainWatcher> watchers;
};

namespace {

enum class Move { None, SetRestraint, Pick, B1, B2 };

struct Attention {
  Move move = Move::None;
  Nat value;  // restraint for L, f(n) for b1/b2
};

}  // namespace

InjuryEngine::InjuryEngine(Candidates candidates, ConstructionState state)
    : candidates_(std::move(candidates)), state_(std::move(state)), caches_(std::make_unique<Caches>()) {}

InjuryEngine::InjuryEngine(Candidates candidates, Steps lowness_bound)
    : candidates_(std::move(candidates)), caches_(std::make_unique<Caches>()) {
  state_.lowness_bound = lowness_bound;
}

InjuryEngine::~InjuryEngine() = default;
InjuryEngine::InjuryEngine(InjuryEngine&&) noexcept = default;
InjuryEngine& InjuryEngine::operator=(InjuryEngine&&) noexcept = default;

// The attention tests live in one place so that the cached engine and the
// from-scratch functions cannot drift apart.
static Attention check(const Candidates& candidates, const ConstructionState& state, InjuryEngine::Caches& c,
                       const RequirementId& req) {
  const Steps s = state.stage;
  const Steps e = req.index;
  if (e >= s) return {};

  if (req.kind == RequirementId::Kind::L) {
    if (e >= state.lowness_bound || state.restraint(e) != 0) return {};
    if (c.snapshot_version != c.a_version) {
      c.snapshot = std::make_shared<OracleSnapshot>(std::vector<Nat>(state.A.begin(), state.A.end()));
      c.snapshot_version = c.a_version;
    }
    auto& run = c.l_runs[e];
    if (!run.machine || run.a_version != c.a_version) {
      run.machine = std::make_unique<Machine>(decode_cached(e), Nat(e), c.snapshot);
      run.a_version = c.a_version;
    }
    if (!run.machine->advance(s)) return {};
    return {Move::SetRestraint, std::max(run.machine->use(), Nat(1))};
  }

  const auto cand = candidates.find(e);
  if (cand == candidates.end()) return {};
  const auto n = state.witness(e);
  if (!n) return {Move::Pick, 0};

  auto& run = c.f_runs[e];
  if (!run.machine || run.witness != *n) {
    run.machine = std::make_unique<Machine>(decode_cached(cand->second), *n);
    run.witness = *n;
  }
  if (!run.machine->advance(s)) return {};
  const Nat v = run.machine->outcome().value;
  const bool b0 = state.in_A(bit_position(*n, v, 0));
  const bool b1 = state.in_A(bit_position(*n, v, 1));
  if (b1) return {};
  auto watcher = c.watchers.find(v);
  if (watcher == c.watchers.end()) watcher = c.watchers.emplace(v, DomainWatcher(v)).first;
  const bool nonempty = watcher->second.nonempty_at(s);
  if (!b0 && !nonempty) return {Move::B1, v};
  if (b0 && nonempty) return {Move::B2, v};
  return {};
}

bool InjuryEngine::requires_attention(const RequirementId& req) {
  return check(candidates_, state_, *caches_, req).move != Move::None;
}

void InjuryEngine::step() {
  const Steps s = state_.stage;
  Steps top = state_.lowness_bound;
  if (!candidates_.empty()) top = std::max(top, candidates_.rbegin()->first + 1);
  top = std::min(top, s);

  for (Steps e = 0; e < top; ++e) {
    for (const RequirementId req : {L(e), R(e)}) {
      const Attention a = check(candidates_, state_, *caches_, req);
      if (a.move == Move::None) continue;

      auto log = [&](ActionKind kind, std::vector<Nat> payload) {
        state_.log.push_back({s, req, kind, std::move(payload)});
      };
      switch (a.move) {
        case Move::SetRestraint: {
          state_.restraints[e] = a.value;
          log(ActionKind::SetRestraint, {a.value});
          std::vector<Nat> payload{e};
          for (auto it = state_.witnesses.lower_bound(e); it != state_.witnesses.end();) {
            payload.push_back(it->first);
            payload.push_back(it->second);
            caches_->f_runs.erase(it->first);
            it = state_.witnesses.erase(it);
          }
          log(ActionKind::InitializeWitnesses, std::move(payload));
          break;
        }
        case Move::Pick: {
          Nat n = 0;
          for (const auto& [i, r] : state_.restraints) {
            if (i <= e) n = std::max(n, r);
          }
          n += 1;
          for (auto it = state_.used_witnesses.lower_bound(n); it != state_.used_witnesses.end() && *it == n; ++it) {
            n += 1;
          }
          state_.witnesses[e] = n;
          state_.used_witnesses.insert(n);
          log(ActionKind::PickWitness, {n});
          break;
        }
        case Move::B1:
        case Move::B2: {
          const Nat n = *state_.witness(e);
          const int z = a.move == Move::B1 ? 0 : 1;
          const Nat t = bit_position(n, a.value, z);
          state_.A.insert(t);
          ++caches_->a_version;
          log(z == 0 ? ActionKind::B1Enumerate : ActionKind::B2Enumerate, {n, a.value, t});
          std::vector<Nat> payload{e + 1};
          for (auto it = state_.restraints.upper_bound(e); it != state_.restraints.end();) {
            payload.push_back(it->first);
            it = state_.restraints.erase(it);
          }
          log(ActionKind::DropRestraints, std::move(payload));
          break;
        }
        case Move::None: break;
      }
      state_.stage = s + 1;
      return;
    }
  }
  state_.stage = s + 1;
}

void InjuryEngine::run_to(Steps stage) {
  while (state_.stage < stage) step();
}

bool requires_attention(const ConstructionState& state, const RequirementId& req, const Candidates& candidates) {
  InjuryEngine::Caches fresh;
  return check(candidates, state, fresh, req).move != Move::None;
}

ConstructionState step(const ConstructionState& state, const Candidates& candidates) {
  InjuryEngine engine(candidates, state);
  engine.step();
  return engine.state();
}

ConstructionState run(const Candidates& candidates, Steps stages, Steps lowness_bound) {
  InjuryEngine engine(candidates, lowness_bound);
  engine.run_to(stages);
  return engine.state();
}

ConstructionState run(const Candidates& candidates, Steps stages) {
  return run(candidates, stages, default_lowness_bound(candidates));
}

// ---------------------------------------------------------------------------

HValue derive_h(const ConstructionState& state, const Nat& n, const Nat& x) {
  const bool b0 = state.in_A(bit_position(n, x, 0));
  const bool b1 = state.in_A(bit_position(n, x, 1));
  return b0 == b1 ? HValue::Empty : HValue::Nonempty;
}

Nat h_value_code(const ConstructionState& state, const Nat& n, const Nat& x) {
  return derive_h(state, n, x) == HValue::Empty ? loop_code() : canonical_nonempty_code();
}

Program h_program() {
  using namespace build;
  auto bit = [](int z) { return comp(query(), pair_of(left(), pair_of(right(), konst(z)))); };
  return cases(differ(bit(0), bit(1)), konst(loop_code()), konst(canonical_nonempty_code()));
}

// ---------------------------------------------------------------------------

std::string_view audit_rule_name(AuditRule r) {
  switch (r) {
    case AuditRule::WitnessEnumerations: return "witness-enumerations";
    case AuditRule::ActsAfterInitialize: return "acts-after-initialize";
    case AuditRule::RestraintDiscipline: return "restraint-discipline";
    case AuditRule::MonotoneA: return "monotone-A";
    case AuditRule::TwoBit: return "two-bit";
    case AuditRule::WitnessFreshness: return "witness-freshness";
    case AuditRule::OneActorPerStage: return "one-actor-per-stage";
    case AuditRule::BitFreeze: return "bit-freeze";
    case AuditRule::Malformed: return "malformed";
  }
  return "?";
}

std::vector<AuditViolation> audit(const ConstructionState& state) {
  std::vector<AuditViolation> out;
  auto flag = [&](AuditRule rule, Steps stage, std::string detail) {
    out.push_back({rule, stage, std::move(detail)});
  };

  std::set<Nat> A;
  std::map<Steps, Nat> restraints;
  std::map<Steps, Nat> witnesses;
  std::set<Nat> used;
  struct WitnessRecord {
    bool b1 = false;
    bool b2 = false;
    Nat value;
  };
  std::map<Nat, WitnessRecord> records;
  std::set<std::pair<Nat, Nat>> frozen;  // (n, x) after b2
  std::map<Steps, int> acts_since_init;

  std::optional<Steps> last_stage;
  std::optional<RequirementId> last_actor;
  const ActionEvent* previous = nullptr;

  for (const ActionEvent& ev : state.log) {
    const Steps s = ev.stage;
    const Steps e = ev.requirement.index;
    const bool is_l = ev.requirement.kind == RequirementId::Kind::L;
    const std::string who = requirement_name(ev.requirement);

    if (last_stage && s < *last_stage) flag(AuditRule::Malformed, s, "stages out of order");
    if (last_stage && s == *last_stage && last_actor && !(*last_actor == ev.requirement)) {
      flag(AuditRule::OneActorPerStage, s, requirement_name(*last_actor) + " and " + who + " both act");
    }
    if (e >= s) flag(AuditRule::Malformed, s, who + " acts before stage " + std::to_string(e + 1));
    if (s >= state.stage) flag(AuditRule::Malformed, s, "event at or after the recorded stage");
    last_stage = s;
    last_actor = ev.requirement;

    const auto& p = ev.payload;
    auto need = [&](bool ok) {
      if (!ok) flag(AuditRule::Malformed, s, who + " " + std::string(action_name(ev.action)) + ": bad payload");
      return ok;
    };

    switch (ev.action) {
      case ActionKind::SetRestraint: {
        if (!need(is_l && p.size() == 1 && p[0] > 0)) break;
        if (e >= state.lowness_bound) flag(AuditRule::Malformed, s, who + " is not instantiated");
        if (restraints.contains(e)) {
          flag(AuditRule::RestraintDiscipline, s, who + " sets a restraint while r = " + to_string(restraints[e]));
        }
        restraints[e] = p[0];
        break;
      }
      case ActionKind::InitializeWitnesses: {
        if (!need(is_l && !p.empty() && p[0] == e && p.size() % 2 == 1)) break;
        if (!previous || previous->stage != s || previous->action != ActionKind::SetRestraint) {
          flag(AuditRule::Malformed, s, who + " initializes without setting a restraint");
        }
        std::map<Steps, Nat> dropped;
        for (std::size_t k = 1; k + 1 < p.size(); k += 2) dropped[to_steps(p[k])] = p[k + 1];
        std::map<Steps, Nat> expected(witnesses.lower_bound(e), witnesses.end());
        if (dropped != expected) flag(AuditRule::Malformed, s, who + " initialization list does not match");
        witnesses.erase(witnesses.lower_bound(e), witnesses.end());
        for (auto it = acts_since_init.lower_bound(e); it != acts_since_init.end(); ++it) it->second = 0;
        break;
      }
      case ActionKind::PickWitness: {
        if (!need(!is_l && p.size() == 1)) break;
        const Nat& n = p[0];
        if (witnesses.contains(e)) flag(AuditRule::WitnessFreshness, s, who + " picks while holding a witness");
        if (used.contains(n)) flag(AuditRule::WitnessFreshness, s, "witness " + to_string(n) + " reused");
        for (const auto& [i, r] : restraints) {
          if (i <= e && n <= r) {
            flag(AuditRule::WitnessFreshness, s,
                 "witness " + to_string(n) + " not above r(" + std::to_string(i) + ") = " + to_string(r));
          }
        }
        witnesses[e] = n;
        used.insert(n);
        break;
      }
      case ActionKind::B1Enumerate:
      case ActionKind::B2Enumerate: {
        const int z = ev.action == ActionKind::B1Enumerate ? 0 : 1;
        if (!need(!is_l && p.size() == 3)) break;
        const Nat &n = p[0], &x = p[1], &t = p[2];
        if (t != bit_position(n, x, z)) flag(AuditRule::Malformed, s, who + " enumerates a mislabelled triple");
        if (witnesses.count(e) == 0 || witnesses[e] != n) {
          flag(AuditRule::Malformed, s, who + " enumerates on " + to_string(n) + ", not its witness");
        }
        if (frozen.contains({n, x})) {
          flag(AuditRule::BitFreeze, s, "bits of (" + to_string(n) + ", " + to_string(x) + ") touched after b2");
        }
        WitnessRecord& rec = records[n];
        if (z == 0) {
          if (rec.b1) flag(AuditRule::WitnessEnumerations, s, "second b1 on witness " + to_string(n));
          if (rec.b2) flag(AuditRule::WitnessEnumerations, s, "b1 after b2 on witness " + to_string(n));
          rec.b1 = true;
          rec.value = x;
        } else {
          if (!rec.b1) flag(AuditRule::WitnessEnumerations, s, "b2 before b1 on witness " + to_string(n));
          if (rec.b2) flag(AuditRule::WitnessEnumerations, s, "second b2 on witness " + to_string(n));
          if (rec.b1 && rec.value != x) flag(AuditRule::WitnessEnumerations, s, "b2 value differs from b1");
          if (!A.contains(bit_position(n, x, 0))) {
            flag(AuditRule::TwoBit, s, "<" + to_string(n) + ", " + to_string(x) + ", 1> before its 0-bit");
          }
          rec.b2 = true;
          frozen.insert({n, x});
        }
        if (++acts_since_init[e] > 2) flag(AuditRule::ActsAfterInitialize, s, who + " acts a third time");
        if (!A.insert(t).second) flag(AuditRule::MonotoneA, s, to_string(t) + " enumerated twice");
        break;
      }
      case ActionKind::DropRestraints: {
        if (!need(!is_l && !p.empty() && p[0] == e + 1)) break;
        const bool after_enum = previous && previous->stage == s && previous->requirement == ev.requirement &&
                                (previous->action == ActionKind::B1Enumerate ||
                                 previous->action == ActionKind::B2Enumerate);
        if (!after_enum) flag(AuditRule::RestraintDiscipline, s, who + " drops restraints without enumerating");
        std::vector<Nat> listed(p.begin() + 1, p.end());
        std::vector<Nat> expected;
        for (auto it = restraints.upper_bound(e); it != restraints.end(); ++it) expected.push_back(it->first);
        if (listed != expected) flag(AuditRule::RestraintDiscipline, s, who + " drop list does not match");
        for (const Nat& i : listed) {
          if (i <= e) flag(AuditRule::RestraintDiscipline, s, who + " drops a higher-priority restraint");
        }
        restraints.erase(restraints.upper_bound(e), restraints.end());
        break;
      }
    }
    previous = &ev;
  }

  // enumerations must be followed by their drop
  for (std::size_t k = 0; k < state.log.size(); ++k) {
    const auto a = state.log[k].action;
    if (a != ActionKind::B1Enumerate && a != ActionKind::B2Enumerate) continue;
    if (k + 1 == state.log.size() || state.log[k + 1].action != ActionKind::DropRestraints) {
      flag(AuditRule::RestraintDiscipline, state.log[k].stage, "enumeration without dropping lower restraints");
    }
  }

  for (const Nat& t : state.A) {
    const auto [n, rest] = unpair(t);
    const auto [x, z] = unpair(rest);
    if (z == 1 && !state.in_A(bit_position(n, x, 0))) flag(AuditRule::TwoBit, state.stage, "final A breaks two-bit");
  }
  if (A != state.A) flag(AuditRule::MonotoneA, state.stage, "final A differs from the replayed log");
  if (restraints != state.restraints) flag(AuditRule::RestraintDiscipline, state.stage, "final restraints differ");
  if (witnesses != state.witnesses) flag(AuditRule::Malformed, state.stage, "final witnesses differ");
  if (used != state.used_witnesses) flag(AuditRule::WitnessFreshness, state.stage, "used witnesses differ");
  return out;
}

// ---------------------------------------------------------------------------

std::vector<Certificate> disagreement_certificates(const ConstructionState& state, const Candidates& candidates) {
  std::vector<Certificate> out;
  const Steps s = state.stage;
  for (const auto& [e, code] : candidates) {
    const auto n = state.witness(e);
    if (!n) continue;
    const EvalOutcome fn = eval(code, *n, s);
    if (!fn.converged()) continue;
    const Nat& v = fn.value;
    const Nat t0 = bit_position(*n, v, 0);
    const Nat t1 = bit_position(*n, v, 1);
    const bool b0 = state.in_A(t0);
    const bool b1 = state.in_A(t1);
    const StageSet w = enumerate_domain(v, s);

    Certificate cert;
    cert.stage_or_budget = s;
    cert.witness = {e, *n, v};
    cert.evidence.push_back({pair(*n, v), {SetKind::Graph, code}, s, true});
    const SetId a_set{SetKind::Constructed, 0};
    if (b0 == b1 && !w.empty()) {
      // h-side frozen empty: (1,1) is never touched again, and (0,0) with a
      // nonempty f-side never again meets the b.1 condition.
      const Nat x = w.members.front();
      cert.kind = CertificateKind::Permanent;
      cert.subject = b0 ? "W_f(n) nonempty, bits (1,1) frozen" : "W_f(n) nonempty, bits (0,0) frozen";
      cert.witness.push_back(x);
      cert.evidence.push_back({x, {SetKind::Domain, v}, s, true});
      cert.evidence.push_back({t0, a_set, s, b0});
      cert.evidence.push_back({t1, a_set, s, b1});
    } else if (b0 && !b1 && w.empty()) {
      cert.kind = CertificateKind::Provisional;
      cert.subject = "W_f(n) empty so far, W_h(n,f(n)) nonempty";
      cert.evidence.push_back({s, {SetKind::Nonempty, v}, s, false});
      cert.evidence.push_back({t0, a_set, s, true});
      cert.evidence.push_back({t1, a_set, s, false});
    } else {
      continue;
    }
    out.push_back(std::move(cert));
  }
  return out;
}

}  // namespace fixlab
