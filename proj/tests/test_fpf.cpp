#include <random>

#include "doctest.h"
#include "fixlab/fpf.hpp"
#include "generators.hpp"

using namespace fixlab;
using namespace fixlab::build;

namespace {

// g(e) = phi_e(e) + 1
Nat successor_of_diagonal() { return comp(succ(), apply(id(), id()))->code; }

}  // namespace

TEST_CASE("dnc_violation: constant 0 against an index with phi_n(n) = 0") {
  // scan the numbering for the first n with phi_n(n) = 0
  Nat n0 = 0;
  bool found = false;
  for (int n = 0; n < 100 && !found; ++n) {
    const EvalOutcome out = eval(Nat(n), Nat(n), 100);
    if (out.converged() && out.value == 0) n0 = n, found = true;
  }
  REQUIRE(found);
  const auto cert = dnc_violation(const_code(0), n0, 1000);
  REQUIRE(cert);
  CHECK(cert->kind == CertificateKind::Permanent);
  CHECK(cert->witness == std::vector<Nat>{n0, 0});
  CHECK(permanence_ok(*cert));
  CHECK(evidence_replays(*cert));
  CHECK(dnc_violation(const_code(0), const_code(0), 1000));
}

TEST_CASE("dnc_violation: the successor of the diagonal is never violated") {
  const Nat g = successor_of_diagonal();
  std::mt19937_64 rng(11);
  int converging = 0;
  for (int i = 0; i < 300; ++i) {
    const Nat e = testing::random_code(rng);
    if (eval(e, e, 2000).converged()) ++converging;
    CHECK_FALSE(dnc_violation(g, e, 5000));
  }
  CHECK(converging > 50);
}

TEST_CASE("dnc_violation: a divergent diagonal is never certified") {
  for (Steps b : {0, 1, 10, 1000, 100000}) CHECK_FALSE(dnc_violation(const_code(0), loop_code(), b));
}

TEST_CASE("dnc_violation is budget-stable") {
  std::mt19937_64 rng(12);
  int hits = 0;
  for (int i = 0; i < 300; ++i) {
    const Nat g = testing::random_code(rng);
    const Nat e = testing::random_code(rng);
    const auto first = dnc_violation(g, e, 300);
    if (!first) continue;
    ++hits;
    for (Steps b : {301, 1000, 5000}) CHECK(dnc_violation(g, e, b) == first);
    CHECK(dnc_violation(g, e, first->stage_or_budget) == first);
    CHECK_FALSE(dnc_violation(g, e, first->stage_or_budget - 1));
  }
  CHECK(hits > 5);
}

TEST_CASE("fpf_discrepancy: identity never differs") {
  std::mt19937_64 rng(13);
  for (int i = 0; i < 40; ++i) {
    const Nat n = testing::random_code(rng);
    for (Steps s : {0, 5, 40}) CHECK_FALSE(fpf_discrepancy(id()->code, n, s));
  }
}

TEST_CASE("fpf_discrepancy: everything to loop, against a total program") {
  const Nat f = konst(loop_code())->code;
  const Nat n = const_code(5);
  CHECK_FALSE(fpf_discrepancy(f, n, 0));
  for (Steps s = 1; s <= 20; ++s) {
    // independent: least x <= s where phi_n(x) converges within s and phi_loop(x) does not
    Nat expected = 0;
    bool any = false;
    for (Steps x = 0; x <= s && !any; ++x) {
      if (eval(n, x, s).converged() != eval(loop_code(), x, s).converged()) expected = x, any = true;
    }
    const auto cert = fpf_discrepancy(f, n, s);
    REQUIRE(cert.has_value() == any);
    if (!cert) continue;
    CHECK(cert->kind == CertificateKind::Provisional);
    CHECK(cert->witness == std::vector<Nat>{n, loop_code(), expected});
    CHECK(evidence_replays(*cert));
  }
}

TEST_CASE("fpf_discrepancy: stage 0 is always empty") {
  std::mt19937_64 rng(14);
  for (int i = 0; i < 50; ++i) CHECK_FALSE(fpf_discrepancy(testing::random_code(rng), testing::random_code(rng), 0));
}

TEST_CASE("fpf_discrepancy: later re-probes never contradict positive facts") {
  std::mt19937_64 rng(15);
  int hits = 0;
  for (int i = 0; i < 150; ++i) {
    const Nat f = testing::random_code(rng);
    const Nat n = testing::random_code(rng);
    const auto cert = fpf_discrepancy(f, n, 30);
    if (!cert) continue;
    ++hits;
    CHECK(evidence_replays(*cert));
    for (MembershipFact fact : cert->evidence) {
      if (!fact.in) continue;
      fact.stage = 200;
      CHECK(replay_fact(fact) == true);
    }
  }
  CHECK(hits > 10);
}

TEST_CASE("fpf_plus_refute: the projection delta(n, x) = x is beaten by the identity") {
  FpfPlusWitnessQuery q{right()->code, id()->code, 5, 1000, make_grid(6, 500)};
  const FpfPlusResult r = fpf_plus_refute(q);
  REQUIRE(r.status == FpfPlusStatus::Certified);
  REQUIRE(r.certificate);
  CHECK(r.certificate->kind == CertificateKind::Provisional);
  CHECK(r.certificate->witness.size() == 6);
  CHECK(evidence_replays(*r.certificate));
}

TEST_CASE("fpf_plus_refute: everywhere-divergent delta survives") {
  FpfPlusWitnessQuery q{loop_code(), id()->code, 3, 1000, make_grid(4, 200)};
  const FpfPlusResult r = fpf_plus_refute(q);
  CHECK(r.status == FpfPlusStatus::None);
  CHECK(r.deciding_n == 0);
  CHECK_FALSE(r.certificate);
}

TEST_CASE("fpf_plus_refute: a grid disagreement ends the search") {
  // phi_{g(n)} = phi_n; delta always answers const 1, which differs from id at n = 0
  FpfPlusWitnessQuery q{konst(const_code(1))->code, id()->code, 3, 1000, make_grid(4, 200)};
  const FpfPlusResult r = fpf_plus_refute(q);
  CHECK(r.status == FpfPlusStatus::None);
  CHECK(r.deciding_n == 0);
}

TEST_CASE("fpf_plus_refute: divergent g is inconclusive") {
  FpfPlusWitnessQuery q{right()->code, loop_code(), 2, 500, make_grid(2, 100)};
  CHECK(fpf_plus_refute(q).status == FpfPlusStatus::GDiverged);
  // g converging only on 0 and 1
  const Nat partial = cases(id(), konst(0), cases(monus(id(), konst(1)), konst(0), loop()))->code;
  q.g_code = partial;
  const FpfPlusResult r = fpf_plus_refute(q);
  CHECK(r.status == FpfPlusStatus::GDiverged);
  CHECK(r.deciding_n == 2);
}

TEST_CASE("lift: delta_hat(<n, x>) = delta(x)") {
  const Nat lifted = lift_fpf_to_fpfplus(id()->code);
  for (int n = 0; n <= 5; ++n) {
    for (int x = 0; x <= 20; ++x) CHECK(eval(lifted, pair(n, x), 100).value == x);
  }
  const Nat dead = lift_fpf_to_fpfplus(loop_code());
  for (int n = 0; n <= 3; ++n) CHECK_FALSE(eval(dead, pair(n, n), 10'000).converged());
}

TEST_CASE("lift: exact overhead on random programs") {
  std::mt19937_64 rng(16);
  for (int i = 0; i < 200; ++i) {
    const Nat d = testing::random_code(rng);
    const Nat lifted = lift_fpf_to_fpfplus(d);
    const Nat n = rng() % 50;
    const Nat x = rng() % 50;
    const EvalOutcome base = eval(d, x, 3000);
    const EvalOutcome up = eval(lifted, pair(n, x), 3000 + kLiftOverhead);
    REQUIRE(base.status == up.status);
    if (base.converged()) {
      CHECK(base.value == up.value);
      CHECK(up.steps_used == base.steps_used + kLiftOverhead);
    }
  }
}

TEST_CASE("lift of a divergent delta survives the identity probe") {
  FpfPlusWitnessQuery q{lift_fpf_to_fpfplus(loop_code()), id()->code, 4, 1000, make_grid(4, 200)};
  CHECK(fpf_plus_refute(q).status == FpfPlusStatus::None);
}

TEST_CASE("permanence discipline rejects negative facts on monotone sets") {
  Certificate c;
  c.kind = CertificateKind::Permanent;
  c.evidence = {{3, {SetKind::Domain, 0}, 10, true}};
  CHECK(permanence_ok(c));
  c.evidence.push_back({4, {SetKind::Domain, loop_code()}, 10, false});
  CHECK_FALSE(permanence_ok(c));
  c.evidence.back().set = {SetKind::Constructed, 0};
  CHECK(permanence_ok(c));
  c.kind = CertificateKind::Provisional;
  c.evidence.back().set = {SetKind::Domain, loop_code()};
  CHECK(permanence_ok(c));
}

TEST_CASE("replay_fact detects forged evidence") {
  CHECK(replay_fact({pair(3, 4), {SetKind::Graph, succ()->code}, 10, true}) == true);
  CHECK(replay_fact({pair(3, 5), {SetKind::Graph, succ()->code}, 10, true}) == false);
  CHECK(replay_fact({7, {SetKind::Domain, loop_code()}, 100, false}) == true);
  CHECK(replay_fact({7, {SetKind::Domain, loop_code()}, 100, true}) == false);
  CHECK(replay_fact({0, {SetKind::Halting, 0}, 5, true}) == true);
  CHECK_FALSE(replay_fact({0, {SetKind::Constructed, 0}, 5, true}).has_value());
}
