#include <random>

#include "corpus.hpp"
#include "doctest.h"
#include "fixlab/injury.hpp"
#include "generators.hpp"

using namespace fixlab;
using namespace fixlab::build;

namespace {

using Kind = RequirementId::Kind;

RequirementId L(Steps e) { return {Kind::L, e}; }
RequirementId R(Steps e) { return {Kind::R, e}; }

bool has_rule(const std::vector<AuditViolation>& v, AuditRule rule) {
  return std::any_of(v.begin(), v.end(), [&](const AuditViolation& x) { return x.rule == rule; });
}

std::vector<const ActionEvent*> events_of(const ConstructionState& st, Steps e) {
  std::vector<const ActionEvent*> out;
  for (const auto& ev : st.log) {
    if (ev.requirement == R(e)) out.push_back(&ev);
  }
  return out;
}

const ConstructionState& standard_run() {
  static const ConstructionState st = run(testing::injury_candidates(), 2000);
  return st;
}

}  // namespace

TEST_CASE("priority order") {
  CHECK(L(0).rank() < R(0).rank());
  CHECK(R(0).rank() < L(1).rank());
  CHECK(R(3).rank() < L(4).rank());
  CHECK(requirement_name(R(12)) == "R12");
}

TEST_CASE("run with zero stages is empty") {
  const ConstructionState st = run(testing::injury_candidates(), 0);
  CHECK(st.stage == 0);
  CHECK(st.A.empty());
  CHECK(st.log.empty());
}

TEST_CASE("L requires attention iff the oracle computation converges under a zero restraint") {
  std::mt19937_64 rng(21);
  for (int i = 0; i < 200; ++i) {
    ConstructionState st;
    st.stage = 1 + rng() % 40;
    st.lowness_bound = 64;
    const Steps e = rng() % std::min<Steps>(st.stage, 64);
    for (int k = 0; k < 6; ++k) st.A.insert(Nat(rng() % 30));
    if (rng() % 4 == 0) st.restraints[e] = 3;
    const auto oracle = std::make_shared<OracleSnapshot>(std::vector<Nat>(st.A.begin(), st.A.end()));
    const bool expected = st.restraint(e) == 0 && eval(Nat(e), Nat(e), st.stage, oracle).converged();
    CHECK(requires_attention(st, L(e), {}) == expected);
  }
  // the first stage: {0}(0) is the identity, one step
  ConstructionState first;
  first.stage = 1;
  first.lowness_bound = 1;
  CHECK(requires_attention(first, L(0), {}) == eval(Nat(0), Nat(0), 1).converged());
  CHECK_FALSE(requires_attention(first, L(1), {}));
}

TEST_CASE("R without a witness requires attention once e < stage") {
  ConstructionState st;
  st.lowness_bound = 0;
  const Candidates c{{3, loop_code()}};
  st.stage = 3;
  CHECK_FALSE(requires_attention(st, R(3), c));
  st.stage = 4;
  CHECK(requires_attention(st, R(3), c));
}

TEST_CASE("R case (b): four bit patterns against both emptiness states") {
  const Nat n = 7;
  const Steps s = 50;
  for (const bool empty : {true, false}) {
    const Nat v = empty ? loop_code() : const_code(5);
    const Candidates c{{0, konst(v)->code}};
    for (int bits = 0; bits < 4; ++bits) {
      const bool b0 = bits & 1, b1 = bits & 2;
      ConstructionState st;
      st.stage = s;
      st.witnesses[0] = n;
      st.used_witnesses.insert(n);
      if (b0) st.A.insert(triple(n, v, 0));
      if (b1) st.A.insert(triple(n, v, 1));
      // (b.1): empty and bits (0,0); (b.2): nonempty and bits (1,0)
      const bool expected = (empty && !b0 && !b1) || (!empty && b0 && !b1);
      CHECK_MESSAGE(requires_attention(st, R(0), c) == expected, "empty=", empty, " bits=", bits);
    }
  }
}

TEST_CASE("step: nothing requires attention") {
  ConstructionState st;
  st.stage = 5;
  const ConstructionState next = step(st, {});
  CHECK(next.stage == 6);
  CHECK(next.log.empty());
}

TEST_CASE("step: witness choice is the least fresh number above higher restraints") {
  ConstructionState st;
  st.stage = 10;
  st.lowness_bound = 0;
  st.restraints = {{0, 5}, {1, 3}, {2, 100}};
  st.used_witnesses = {6, 7, 9};
  const ConstructionState next = step(st, {{1, loop_code()}});
  REQUIRE(next.log.size() == 1);
  CHECK(next.log[0].action == ActionKind::PickWitness);
  CHECK(next.witness(1) == Nat(8));
}

TEST_CASE("step: b.1 adds exactly one triple and drops lower restraints") {
  ConstructionState st;
  st.stage = 20;
  st.lowness_bound = 0;
  st.witnesses[1] = 9;
  st.used_witnesses = {9};
  st.restraints = {{0, 2}, {1, 4}, {2, 6}, {5, 1}};
  const Nat v = loop_code();
  const ConstructionState next = step(st, {{1, konst(v)->code}});
  CHECK(next.A == std::set<Nat>{triple(9, v, 0)});
  CHECK(next.restraints == std::map<Steps, Nat>{{0, 2}, {1, 4}});
  REQUIRE(next.log.size() == 2);
  CHECK(next.log[0].action == ActionKind::B1Enumerate);
  CHECK(next.log[1].action == ActionKind::DropRestraints);
}

TEST_CASE("all-divergent candidates never reach case (b)") {
  Candidates c;
  for (Steps e = 0; e < 4; ++e) c[e] = loop_code();
  const ConstructionState st = run(c, 300);
  CHECK(st.A.empty());
  for (const auto& ev : st.log) {
    CHECK(ev.action != ActionKind::B1Enumerate);
    CHECK(ev.action != ActionKind::B2Enumerate);
  }
  CHECK(audit(st).empty());
}

TEST_CASE("a late domain shows pick, b.1, b.2 in that order") {
  const Candidates c{{0, testing::late_domain()->code}};
  const ConstructionState st = run(c, 1000);
  const auto evs = events_of(st, 0);
  std::vector<ActionKind> kinds;
  for (const auto* ev : evs) {
    if (ev->action != ActionKind::DropRestraints) kinds.push_back(ev->action);
  }
  CHECK(kinds == std::vector<ActionKind>{ActionKind::PickWitness, ActionKind::B1Enumerate, ActionKind::B2Enumerate});
  CHECK(audit(st).empty());
}

TEST_CASE("engine equals from-scratch stepping, stage by stage") {
  const Candidates c = testing::injury_candidates();
  InjuryEngine engine(c, default_lowness_bound(c));
  ConstructionState pure;
  pure.lowness_bound = default_lowness_bound(c);
  for (Steps s = 0; s < 260; ++s) {
    for (Steps e = 0; e < 5; ++e) {
      REQUIRE(engine.requires_attention(R(e)) == requires_attention(pure, R(e), c));
      REQUIRE(engine.requires_attention(L(e)) == requires_attention(pure, L(e), c));
    }
    engine.step();
    pure = step(pure, c);
    REQUIRE(engine.state() == pure);
  }
}

TEST_CASE("replay determinism") {
  const Candidates c = testing::injury_candidates();
  InjuryEngine engine(c, default_lowness_bound(c));
  engine.run_to(700);
  engine.run_to(2000);
  CHECK(engine.state() == standard_run());
  CHECK(run(c, 2000) == standard_run());
}

TEST_CASE("derive_h follows the two bits") {
  ConstructionState st;
  CHECK(derive_h(st, 3, 4) == HValue::Empty);
  st.A.insert(triple(3, 4, 0));
  CHECK(derive_h(st, 3, 4) == HValue::Nonempty);
  st.A.insert(triple(3, 4, 1));
  CHECK(derive_h(st, 3, 4) == HValue::Empty);
  st.A.erase(triple(3, 4, 0));
  CHECK(derive_h(st, 3, 4) == HValue::Nonempty);
}

TEST_CASE("the h oracle program agrees with derive_h") {
  const ConstructionState& st = standard_run();
  const auto oracle = std::make_shared<OracleSnapshot>(std::vector<Nat>(st.A.begin(), st.A.end()));
  std::vector<std::pair<Nat, Nat>> points;
  for (const Nat& t : st.A) {
    const auto [n, rest] = unpair(t);
    points.push_back({n, unpair(rest).first});
  }
  for (int n = 0; n < 6; ++n) {
    for (int x = 0; x < 6; ++x) points.push_back({n, x});
  }
  for (const auto& [n, x] : points) {
    const EvalOutcome out = eval(h_program(), pair(n, x), 1000, oracle);
    REQUIRE(out.converged());
    CHECK(out.value == h_value_code(st, n, x));
  }
  // W_{h(n,x)} itself: {0} or empty
  CHECK(enumerate_domain(canonical_nonempty_code(), 20).members == std::vector<Steps>{0});
  CHECK(enumerate_domain(loop_code(), 20).empty());
}

TEST_CASE("audit: engine runs are clean") {
  CHECK(audit(standard_run()).empty());
  std::mt19937_64 rng(22);
  for (int i = 0; i < 6; ++i) {
    Candidates c;
    for (Steps e = 0; e < 4; ++e) c[e] = testing::random_code(rng);
    const ConstructionState st = run(c, 400, 6);
    const auto v = audit(st);
    CHECK(v.empty());
    for (const auto& x : v) MESSAGE(audit_rule_name(x.rule), " ", x.detail);
  }
}

TEST_CASE("audit: forged logs") {
  const ConstructionState base = run({{0, testing::late_domain()->code}}, 1000);
  REQUIRE(audit(base).empty());
  auto find = [&](const ConstructionState& st, ActionKind a) {
    for (std::size_t k = 0; k < st.log.size(); ++k) {
      if (st.log[k].action == a) return k;
    }
    FAIL("missing event");
    return std::size_t{0};
  };

  SUBCASE("b.2 before b.1") {
    ConstructionState st = base;
    const std::size_t b1 = find(st, ActionKind::B1Enumerate);
    const std::size_t b2 = find(st, ActionKind::B2Enumerate);
    std::swap(st.log[b1].action, st.log[b2].action);
    std::swap(st.log[b1].payload, st.log[b2].payload);
    CHECK(has_rule(audit(st), AuditRule::WitnessEnumerations));
  }
  SUBCASE("a third enumeration on one witness") {
    ConstructionState st = base;
    const std::size_t b2 = find(st, ActionKind::B2Enumerate);
    ActionEvent extra = st.log[b2];
    extra.stage = st.log.back().stage + 1;
    extra.payload[2] = triple(extra.payload[0], extra.payload[1], 2);
    st.log.push_back(extra);
    ActionEvent drop = st.log[b2 + 1];
    drop.stage = extra.stage;
    st.log.push_back(drop);
    st.A.insert(extra.payload[2]);
    const auto v = audit(st);
    CHECK(has_rule(v, AuditRule::ActsAfterInitialize));
    CHECK(has_rule(v, AuditRule::BitFreeze));
  }
  SUBCASE("a stale witness") {
    ConstructionState st = base;
    const std::size_t pick = find(st, ActionKind::PickWitness);
    st.log[pick].payload[0] = 0;
    st.witnesses[0] = 0;
    for (auto& ev : st.log) {
      if (ev.action == ActionKind::B1Enumerate || ev.action == ActionKind::B2Enumerate) ev.payload[0] = 0;
    }
    CHECK(has_rule(audit(st), AuditRule::WitnessFreshness));
  }
  SUBCASE("enumeration without dropping restraints") {
    ConstructionState st = base;
    st.log.erase(st.log.begin() + static_cast<std::ptrdiff_t>(find(st, ActionKind::B1Enumerate)) + 1);
    CHECK(has_rule(audit(st), AuditRule::RestraintDiscipline));
  }
  SUBCASE("something leaves A") {
    ConstructionState st = base;
    st.A.erase(st.A.begin());
    CHECK(has_rule(audit(st), AuditRule::MonotoneA));
  }
  SUBCASE("two requirements in one stage") {
    ConstructionState st = base;
    const std::size_t pick = find(st, ActionKind::PickWitness);
    st.log[pick].stage = st.log[pick - 1].stage;
    CHECK(has_rule(audit(st), AuditRule::OneActorPerStage));
  }
  SUBCASE("restraint set twice") {
    ConstructionState st = base;
    ActionEvent again = st.log[0];
    again.stage = st.log.back().stage + 1;
    ActionEvent init = st.log[1];
    init.stage = again.stage;
    st.log.push_back(again);
    st.log.push_back(init);
    CHECK(has_rule(audit(st), AuditRule::RestraintDiscipline));
  }
}

TEST_CASE("bit-freeze: nothing touches a pair after its b.2") {
  const ConstructionState& st = standard_run();
  for (std::size_t k = 0; k < st.log.size(); ++k) {
    if (st.log[k].action != ActionKind::B2Enumerate) continue;
    const Nat& n = st.log[k].payload[0];
    const Nat& x = st.log[k].payload[1];
    CHECK(st.in_A(triple(n, x, 0)));
    CHECK(st.in_A(triple(n, x, 1)));
    for (std::size_t j = k + 1; j < st.log.size(); ++j) {
      const auto& p = st.log[j].payload;
      if (st.log[j].action == ActionKind::B1Enumerate || st.log[j].action == ActionKind::B2Enumerate) {
        CHECK_FALSE((p[0] == n && p[1] == x));
      }
    }
  }
}

TEST_CASE("certificates") {
  const Candidates c = testing::injury_candidates();
  const ConstructionState& st = standard_run();
  const auto certs = disagreement_certificates(st, c);
  std::map<Nat, const Certificate*> by_candidate;
  for (const auto& cert : certs) by_candidate[cert.witness[0]] = &cert;

  // constant to a nonempty domain: permanent
  REQUIRE(by_candidate.contains(0));
  CHECK(by_candidate[0]->kind == CertificateKind::Permanent);
  // constant to loop: bits (1,0) and nothing in W: provisional
  REQUIRE(by_candidate.contains(1));
  CHECK(by_candidate[1]->kind == CertificateKind::Provisional);
  CHECK(derive_h(st, *st.witness(1), loop_code()) == HValue::Nonempty);
  for (const auto& cert : certs) {
    CHECK(permanence_ok(cert));
    CHECK(evidence_replays(cert));
    const Nat e = cert.witness[0];
    const Nat n = cert.witness[1];
    const Nat v = cert.witness[2];
    // the certified disagreement, checked directly
    const bool h_empty = derive_h(st, n, v) == HValue::Empty;
    const bool f_empty = enumerate_domain(v, st.stage).empty();
    CHECK(h_empty != f_empty);
    CHECK(eval(c.at(to_steps(e)), n, st.stage).value == v);
  }
}

TEST_CASE("a candidate that never converges on its witness gets no certificate") {
  const Candidates c{{0, loop_code()}, {1, mu(konst(1))->code}};
  const ConstructionState st = run(c, 200);
  CHECK(disagreement_certificates(st, c).empty());
}
