#include "corpus.hpp"
#include "doctest.h"
#include "fixlab/arslanov.hpp"

using namespace fixlab;
using namespace fixlab::build;

namespace {

// fhat(<x, s>) = code of the constant s
Nat stage_reporter() { return quote_const(right())->code; }

}  // namespace

TEST_CASE("arslanov: stage zero has no candidates") {
  const ArslanovRun run = run_search(left()->code, 0, make_grid(4, 500));
  CHECK(run.candidates.empty());
  CHECK(run.probes.empty());
  CHECK(run.h_code == build_h(left()->code));
}

TEST_CASE("arslanov: candidates are the halting entries with minimal stages") {
  const Steps stage = 400;
  const ArslanovRun run = run_search(left()->code, stage, make_grid(4, 500));
  REQUIRE_FALSE(run.candidates.empty());
  std::size_t expected = 0;
  for (Steps n = 0; n <= stage; ++n) {
    // brute force: least s >= n with phi_n(n) converging within s steps
    const EvalOutcome out = eval(Nat(n), Nat(n), stage);
    if (!out.converged()) continue;
    ++expected;
    const Steps s = std::max(n, out.steps_used);
    const auto it = std::find_if(run.candidates.begin(), run.candidates.end(),
                                 [&](const ArslanovCandidate& c) { return c.n == n; });
    REQUIRE(it != run.candidates.end());
    CHECK(it->s_n == s);
    CHECK(eval(Nat(n), Nat(n), s).converged());
    if (s > n) CHECK_FALSE(eval(Nat(n), Nat(n), s - 1).converged());
  }
  CHECK(run.candidates.size() == expected);
  for (std::size_t i = 1; i < run.candidates.size(); ++i) {
    const auto& a = run.candidates[i - 1];
    const auto& b = run.candidates[i];
    CHECK((a.s_n < b.s_n || (a.s_n == b.s_n && a.n < b.n)));
  }
}

TEST_CASE("arslanov: the search inside h finds the same s_n") {
  const Nat fhat = stage_reporter();
  const ArslanovRun run = run_search(fhat, 200, make_grid(1, 10));
  REQUIRE(run.candidates.size() > 10);
  for (std::size_t i = 0; i < 10; ++i) {
    const ArslanovCandidate& c = run.candidates[i];
    const EvalOutcome out = eval(c.h_of_n, 3, 2'000'000);
    REQUIRE(out.converged());
    CHECK(out.value == c.s_n);
  }
}

TEST_CASE("arslanov: h(n) diverges everywhere when n never halts") {
  const Nat never = mu(succ())->code;
  REQUIRE(never < 1000);
  const Nat h = h_value(stage_reporter(), never);
  for (Steps y = 0; y < 4; ++y) CHECK_FALSE(eval(h, y, 20'000).converged());
}

TEST_CASE("arslanov: h is total and matches the host-side value") {
  // budget 10^5 covers n <= 40 with a wide margin
  const Nat fhat = left()->code;
  const Nat h = build_h(fhat);
  for (Steps n = 0; n <= 40; ++n) {
    const EvalOutcome out = eval(h, n, 100'000);
    REQUIRE(out.converged());
    CHECK(out.value == h_value(fhat, n));
  }
}

TEST_CASE("arslanov: identity approximation makes every probe agree") {
  const ArslanovRun run = run_search(left()->code, 300, make_grid(6, 2000));
  REQUIRE_FALSE(run.probes.empty());
  CHECK(agreeing_probes(run).size() == run.probes.size());
}

TEST_CASE("arslanov: loop approximation probes agree on empty domains") {
  const Nat fhat = konst(loop_code())->code;
  const ArslanovRun run = run_search(fhat, 300, make_grid(6, 2000));
  REQUIRE_FALSE(run.probes.empty());
  for (const ArslanovProbe& p : run.probes) {
    CHECK(p.report.verified);
    for (const PointReport& q : p.report.points) CHECK(q.agreement == Agreement::BothExhausted);
  }
}

TEST_CASE("arslanov: candidates are stable under longer runs") {
  const Nat fhat = left()->code;
  const ArslanovRun short_run = run_search(fhat, 300, make_grid(2, 100));
  const ArslanovRun long_run = run_search(fhat, 700, make_grid(2, 100));
  std::vector<ArslanovCandidate> prefix;
  for (const ArslanovCandidate& c : long_run.candidates) {
    if (c.s_n <= 300) prefix.push_back(c);
  }
  CHECK(prefix == short_run.candidates);
}

TEST_CASE("arslanov: parallel and serial searches agree") {
  const Nat fhat = testing::arslanov_corpus()[5].code;
  const ArslanovRun a = run_search(fhat, 500, make_grid(4, 1000));
  const ArslanovRun b = reference::run_search(fhat, 500, make_grid(4, 1000));
  CHECK(a.candidates == b.candidates);
  REQUIRE(a.probes.size() == b.probes.size());
  for (std::size_t i = 0; i < a.probes.size(); ++i) {
    CHECK(a.probes[i].report.verified == b.probes[i].report.verified);
    CHECK(a.probes[i].report.image_code == b.probes[i].report.image_code);
  }
}

TEST_CASE("arslanov: stage-constant corpus yields an agreeing candidate") {
  const auto corpus = testing::arslanov_corpus();
  REQUIRE(corpus.size() == 10);
  for (const auto& entry : corpus) {
    CAPTURE(entry.name);
    const ArslanovRun run = run_search(entry.code, 600, make_grid(8, 4000), 4);
    CHECK_FALSE(agreeing_probes(run).empty());
  }
}
