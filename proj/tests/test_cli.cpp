#include <cstdio>
#include <filesystem>
#include <functional>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "corpus.hpp"
#include "doctest.h"
#include "fixlab/trace.hpp"

using namespace fixlab;
using trace::Json;

namespace {

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result call(std::vector<std::string> args) {
  args.insert(args.begin(), "fixlab");
  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("fixlab_test_" + name)).string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const std::string& path, const std::string& text) { std::ofstream(path, std::ios::binary) << text; }

// Rewrites a trace with an edited payload and a matching checksum.
void forge(const std::string& path, const std::function<void(Json&)>& edit) {
  Json doc = Json::parse(slurp(path));
  Json payload = doc["payload"];
  edit(payload);
  spit(path, trace::render(trace::make_document(doc["subcommand"].get<std::string>(), doc["config"], payload)));
}

std::string candidate_file() {
  const std::string path = temp_path("candidates.txt");
  std::string text = "; late and early candidates\n";
  for (const auto& [e, code] : testing::injury_candidates()) text += std::to_string(e) + " = #" + to_string(code) + "\n";
  spit(path, text);
  return path;
}

}  // namespace

TEST_CASE("cli: eval prints the outcome") {
  const Result r = call({"eval", "--program", "(const 5)", "--input", "7", "--budget", "100"});
  CHECK(r.code == 0);
  CHECK(r.out.rfind("converged 5", 0) == 0);
  const Result loop = call({"eval", "-p", "loop", "-b", "50"});
  CHECK(loop.code == 0);
  CHECK(loop.out == "exhausted after 50 steps\n");
}

TEST_CASE("cli: usage errors exit 1") {
  const Result parse = call({"eval", "--program", "(comp succ"});
  CHECK(parse.code == 1);
  CHECK(parse.err.find("offset 10") != std::string::npos);
  CHECK(call({"eval", "--program", "id", "--budget", "-3"}).code == 1);
  CHECK(call({"eval", "--program", "id", "--input", "x7"}).code == 1);
  CHECK(call({}).code == 1);
  CHECK(call({"frobnicate"}).code == 1);
  CHECK(call({"eval"}).code == 1);
  CHECK(call({"injury", "--stages", "10"}).code == 1);
  CHECK(call({"probe", "--mode", "nope", "--g", "id"}).code == 1);
  CHECK(call({"arslanov", "--fhat", "left", "--stages", "0"}).code == 1);
  CHECK(call({"eval", "--help"}).code == 0);
}

TEST_CASE("cli: candidate files report the failing line") {
  const std::string path = temp_path("bad_candidates.txt");
  spit(path, "0 = id\n\n(const 1)\n3 = (comp succ\n");
  const Result r = call({"injury", "--candidates", "@" + path});
  CHECK(r.code == 1);
  CHECK(r.err.find(":4:") != std::string::npos);
  CHECK(r.err.find("offset 14") != std::string::npos);
  spit(path, "0 = id\n0 = succ\n");
  CHECK(call({"injury", "--candidates", "@" + path}).code == 1);
}

TEST_CASE("cli: checksum is FNV-1a 64 of the compact payload") {
  CHECK(trace::checksum(Json(1)) == "af63ac4c86019afc");
  CHECK(trace::checksum(Json::parse(R"({"a":[1,"2"]})")) == "c5022d974b0bdecf");
}

TEST_CASE("cli: injury traces are byte-identical and audit clean") {
  const std::string cands = candidate_file();
  const std::string a = temp_path("inj_a.json"), b = temp_path("inj_b.json");
  REQUIRE(call({"injury", "--stages", "600", "--candidates", "@" + cands, "--out", a}).code == 0);
  REQUIRE(call({"injury", "--stages", "600", "--candidates", "@" + cands, "--out", b}).code == 0);
  CHECK(slurp(a) == slurp(b));
  const Json doc = trace::load_document(slurp(a));
  CHECK(doc["schema"] == "fixlab-trace/1");
  CHECK(doc["config"]["lowness_bound"] == 5);
  const Result r = call({"injury", "--audit", a});
  CHECK(r.code == 0);
  CHECK(r.out == "audit clean\n");
}

TEST_CASE("cli: forged injury traces exit 2") {
  const std::string cands = candidate_file();
  const std::string path = temp_path("inj_forged.json");
  REQUIRE(call({"injury", "--stages", "600", "--candidates", "@" + cands, "--out", path}).code == 0);
  const std::string clean = slurp(path);

  SUBCASE("edited payload without a new checksum") {
    Json doc = Json::parse(clean);
    doc["payload"]["state"]["stage"] = 601;
    spit(path, trace::render(doc));
    const Result r = call({"injury", "--audit", path});
    CHECK(r.code == 2);
    CHECK(r.err.find("checksum") != std::string::npos);
  }
  SUBCASE("a b1 event removed from the log") {
    forge(path, [](Json& p) {
      auto& log = p["state"]["log"];
      for (auto it = log.begin(); it != log.end(); ++it) {
        if ((*it)["action"] == "b1-enumerate") {
          const Json element = (*it)["payload"][2];
          log.erase(it);
          auto& A = p["state"]["A"];
          A.erase(std::find(A.begin(), A.end(), element));
          return;
        }
      }
      FAIL("no b1 in the log");
    });
    const Result r = call({"injury", "--audit", path});
    CHECK(r.code == 2);
    CHECK(r.err.find("violation") != std::string::npos);
  }
  SUBCASE("an element in A that no event put there") {
    forge(path, [](Json& p) { p["state"]["A"].push_back("123456789"); });
    CHECK(call({"injury", "--audit", path}).code == 2);
  }
  SUBCASE("a certificate that does not replay") {
    forge(path, [](Json& p) {
      auto& cert = p["certificates"][0];
      for (auto& f : cert["evidence"]) {
        if (f["set"]["kind"] == "graph") f["element"] = trace::nat(pair(0, 999999));
      }
    });
    CHECK(call({"injury", "--audit", path}).code == 2);
  }
  SUBCASE("wrong subcommand is a usage error") { CHECK(call({"adn-diag", "--audit", path}).code == 1); }
}

TEST_CASE("cli: adn-diag traces audit and catch forgeries") {
  const std::string path = temp_path("adn.json");
  const Result r = call({"adn-diag", "--candidates", "12", "--stages", "300", "--out", path});
  REQUIRE(r.code == 0);
  CHECK(call({"adn-diag", "--audit", path}).code == 0);
  forge(path, [](Json& p) { p["state"]["delta"].push_back(p["state"]["delta"][0]); });
  CHECK(call({"adn-diag", "--audit", path}).code == 2);
}

TEST_CASE("cli: probe certificates replay, forged ones do not") {
  const std::string path = temp_path("probe.json");
  REQUIRE(call({"probe", "--mode", "dnc", "--g", "(const 0)", "--e-max", "8", "--out", path}).code == 0);
  const Json doc = trace::load_document(slurp(path));
  REQUIRE_FALSE(doc["payload"]["certificates"].empty());
  CHECK(call({"probe", "--audit", path}).code == 0);
  forge(path, [](Json& p) { p["certificates"][0]["witness"][0] = "7"; p["certificates"][0]["evidence"][0]["stage"] = 0; });
  CHECK(call({"probe", "--audit", path}).code == 2);
}

TEST_CASE("cli: recomputed subcommands detect edited payloads") {
  const std::string path = temp_path("fix.json");
  REQUIRE(call({"fixpoint", "--transform", "(const 5)", "--inputs", "4", "--budget", "500", "--out", path}).code == 0);
  CHECK(call({"fixpoint", "--audit", path}).code == 0);
  forge(path, [](Json& p) { p["report"]["verified"] = false; });
  CHECK(call({"fixpoint", "--audit", path}).code == 2);
}

TEST_CASE("trace: states survive the round trip") {
  const ConstructionState st = run(testing::injury_candidates(), 400);
  CHECK(trace::to_construction_state(Json::parse(trace::construction_state(st).dump())) == st);
  const DiagonalState ds = run_diagonal(15, 300);
  CHECK(trace::to_diagonal_state(Json::parse(trace::diagonal_state(ds).dump())) == ds);
  for (const Certificate& c : disagreement_certificates(st, testing::injury_candidates())) {
    CHECK(trace::to_certificate(Json::parse(trace::certificate(c).dump())) == c);
  }
  const Nat big = Nat(1) << 300;
  CHECK(trace::to_nat(trace::nat(big)) == big);
  CHECK_THROWS_AS(trace::to_nat(Json("12a")), trace::TraceError);
  CHECK_THROWS_AS(trace::load_document("{}"), trace::TraceError);
}
