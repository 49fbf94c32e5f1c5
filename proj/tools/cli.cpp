#include "cli.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fixlab/adn.hpp"
#include "fixlab/arslanov.hpp"
#include "fixlab/fpf.hpp"
#include "fixlab/injury.hpp"
#include "fixlab/recursion.hpp"
#include "fixlab/syntax.hpp"
#include "fixlab/trace.hpp"

namespace fixlab::cli {

namespace {

using trace::Json;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Program program_arg(const std::string& flag, const std::string& text) {
  try {
    return parse_program(text);
  } catch (const ParseError& e) {
    throw UsageError(flag + ": parse error " + e.what());
  }
}

Nat nat_arg(const std::string& flag, const std::string& text) {
  try {
    return parse_nat(text);
  } catch (const std::invalid_argument&) {
    throw UsageError(flag + ": expected a nonnegative integer, got '" + text + "'");
  }
}

Json program_json(const Program& p) { return {{"code", trace::nat(p->code)}, {"text", print_program(p)}}; }

Nat code_of(const Json& config, const char* key) { return trace::to_nat(config.at(key).at("code")); }

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  return s.substr(first, s.find_last_not_of(" \t\r") - first + 1);
}

// One candidate per line, `[e =] program`; unnumbered lines take the next
// index. Inline lists separate entries with commas.
Json read_candidates(const std::string& spec) {
  std::string text = spec;
  std::string origin = "--candidates";
  if (!spec.empty() && spec[0] == '@') {
    origin = spec.substr(1);
    text = read_file(origin);
  } else {
    std::replace(text.begin(), text.end(), ',', '\n');
  }
  Json out = Json::object();
  std::istringstream lines(text);
  std::string line;
  Steps next = 0;
  for (int number = 1; std::getline(lines, line); ++number) {
    if (trim(line.substr(0, line.find(';'))).empty()) continue;
    Steps index = next;
    std::string body = line;
    const auto eq = line.find('=');
    if (eq != std::string::npos) {
      index = to_steps(nat_arg(origin + ":" + std::to_string(number), trim(line.substr(0, eq))));
      body = std::string(eq + 1, ' ') + line.substr(eq + 1);  // keeps error offsets relative to the line
    }
    const std::string key = std::to_string(index);
    if (out.contains(key)) throw UsageError(origin + ":" + std::to_string(number) + ": candidate " + key + " given twice");
    out[key] = program_json(program_arg(origin + ":" + std::to_string(number), body));
    next = index + 1;
  }
  return out;
}

Candidates candidates_of(const Json& config) {
  Candidates c;
  for (const auto& [key, p] : config.at("candidates").items()) c[to_steps(parse_nat(key))] = trace::to_nat(p.at("code"));
  return c;
}

std::vector<GridPoint> grid_of(const Json& config) {
  return make_grid(config.at("grid_inputs").get<Steps>(), config.at("grid_budget").get<Steps>());
}

struct Outcome {
  Json payload;
  std::vector<std::string> problems;  // audit violations found by the run itself
  std::string summary;
};

// Every payload is a function of the echoed config alone.

Outcome compute_eval(const Json& config) {
  const EvalOutcome out = eval(code_of(config, "program"), trace::to_nat(config.at("input")),
                               config.at("budget").get<Steps>());
  Outcome o;
  o.payload = {{"outcome", trace::outcome(out)}};
  o.summary = out.converged() ? "converged " + to_string(out.value) + " (" + std::to_string(out.steps_used) + " steps)"
                              : "exhausted after " + std::to_string(out.steps_used) + " steps";
  return o;
}

Outcome compute_fixpoint(const Json& config) {
  const Nat t = code_of(config, "transform");
  const std::vector<GridPoint> grid = grid_of(config);
  Outcome o;
  if (config.at("param").get<bool>()) {
    std::vector<Nat> range;
    for (Steps n = 0; n <= config.at("n_max").get<Steps>(); ++n) range.push_back(n);
    const ParamFixedPointReport r = check_fixpoint_param(t, range, grid, config.at("grid_budget").get<Steps>());
    o.payload = {{"report", trace::param_report(r)}};
    o.summary = "f = " + to_string(r.f_code) + (r.verified ? " verified" : " not verified") + " on n <= " +
                std::to_string(range.size() - 1);
  } else {
    const Nat e = fixpoint(t);
    const FixedPointReport r = verify_fixed_point(e, t, grid);
    o.payload = {{"fixed_code", trace::nat(e)}, {"report", trace::fixed_point_report(r)}};
    o.summary = "fixed point " + to_string(e) + (r.verified ? " verified" : " not verified") + " on the grid";
  }
  return o;
}

void check_certificate(const Certificate& c, const std::string& where, std::vector<std::string>& problems) {
  if (!permanence_ok(c)) problems.push_back(where + ": permanent certificate cites a non-monotone fact");
  if (!evidence_replays(c)) problems.push_back(where + ": evidence does not replay");
}

Outcome compute_probe(const Json& config) {
  const std::string mode = config.at("mode");
  Outcome o;
  Json certs = Json::array();
  std::vector<Certificate> found;
  if (mode == "dnc") {
    const Nat g = code_of(config, "g");
    for (Steps e = 0; e <= config.at("e_max").get<Steps>(); ++e) {
      if (auto c = dnc_violation(g, e, config.at("budget").get<Steps>())) found.push_back(std::move(*c));
    }
  } else if (mode == "fpf") {
    const Nat f = code_of(config, "f");
    for (Steps n = 0; n <= config.at("n_max").get<Steps>(); ++n) {
      if (auto c = fpf_discrepancy(f, n, config.at("stage").get<Steps>())) found.push_back(std::move(*c));
    }
  } else {
    FpfPlusWitnessQuery q;
    q.delta_code = code_of(config, "delta");
    q.g_code = code_of(config, "g");
    q.n_bound = config.at("n_bound").get<Steps>();
    q.budget = config.at("budget").get<Steps>();
    q.grid = grid_of(config);
    const FpfPlusResult r = fpf_plus_refute(q);
    o.payload["result"] = trace::fpf_plus_result(r);
    if (r.certificate) found.push_back(*r.certificate);
    o.summary = std::string(fpf_plus_status_name(r.status)) + " ";
  }
  for (std::size_t i = 0; i < found.size(); ++i) {
    certs.push_back(trace::certificate(found[i]));
    check_certificate(found[i], "certificate " + std::to_string(i), o.problems);
  }
  o.payload["certificates"] = std::move(certs);
  o.summary += std::to_string(found.size()) + " certificate(s)";
  return o;
}

Outcome compute_arslanov(const Json& config) {
  const ArslanovRun run = run_search(code_of(config, "fhat"), config.at("stages").get<Steps>(), grid_of(config),
                                     config.at("probe_limit").get<Steps>());
  Outcome o;
  o.payload = {{"run", trace::arslanov_run(run)}};
  o.summary = std::to_string(run.candidates.size()) + " candidate(s), " + std::to_string(agreeing_probes(run).size()) +
              " of " + std::to_string(run.probes.size()) + " probe(s) agree on the grid";
  return o;
}

Json injury_certificates(const ConstructionState& state, const Candidates& candidates) {
  Json certs = Json::array();
  for (const Certificate& c : disagreement_certificates(state, candidates)) certs.push_back(trace::certificate(c));
  return certs;
}

Outcome compute_injury(const Json& config) {
  const Candidates candidates = candidates_of(config);
  InjuryEngine engine(candidates, config.at("lowness_bound").get<Steps>());
  engine.run_to(config.at("stages").get<Steps>());
  const ConstructionState& state = engine.state();
  const std::vector<AuditViolation> violations = audit(state);
  Outcome o;
  o.payload = {{"state", trace::construction_state(state)},
               {"audit", trace::audit_violations(violations)},
               {"certificates", injury_certificates(state, candidates)}};
  for (const AuditViolation& v : violations) {
    o.problems.push_back(std::string(audit_rule_name(v.rule)) + " at stage " + std::to_string(v.stage) + ": " + v.detail);
  }
  o.summary = std::to_string(state.log.size()) + " action(s), |A| = " + std::to_string(state.A.size()) + ", " +
              std::to_string(o.payload["certificates"].size()) + " certificate(s)";
  return o;
}

Json adn_verdicts(const DiagonalState& state, const Json& config) {
  const DeltaSpec spec = DeltaSpec::from_state(state);
  AdnVerifyOptions options;
  options.budget = config.at("grid_budget").get<Steps>();
  options.domain_grid = grid_of(config);
  std::set<Nat> points;
  for (Steps n = 0; n <= config.at("n_bound").get<Steps>(); ++n) points.insert(n);
  for (const auto& [n, x] : spec.graph) points.insert(n);
  options.points.assign(points.begin(), points.end());
  Json out = Json::object();
  for (const auto& [e, c] : state.candidates) {
    const std::vector<AdnVerdict> vs = adn_verify(Nat(e), PsiSpec::layout(), spec, options);
    Json list = Json::array();
    for (const AdnVerdict& v : vs) list.push_back(trace::adn_verdict(v));
    out[std::to_string(e)] = {{"summary", std::string(adn_violation_name(summarize(vs)))}, {"verdicts", list}};
  }
  return out;
}

Outcome compute_adn(const Json& config) {
  const DiagonalState state = run_diagonal(config.at("candidate_count").get<Steps>(), config.at("stages").get<Steps>());
  const std::vector<DiagonalViolation> violations = audit_diagonal(state);
  Outcome o;
  o.payload = {{"state", trace::diagonal_state(state)},
               {"audit", trace::diagonal_violations(violations)},
               {"verdicts", adn_verdicts(state, config)}};
  for (const DiagonalViolation& v : violations) {
    o.problems.push_back(std::string(diagonal_audit_rule_name(v.rule)) + ": " + v.detail);
  }
  Steps killed = 0, certified = 0;
  for (const auto& [e, c] : state.candidates) killed += c.status != DiagonalStatus::Waiting;
  for (const auto& [e, v] : o.payload["verdicts"].items()) certified += v["summary"] == "condition-3";
  o.summary = std::to_string(killed) + " of " + std::to_string(state.candidates.size()) + " candidate(s) killed, " +
              std::to_string(certified) + " with a condition-3 certificate";
  return o;
}

// Offline re-audit of a loaded trace. Returns the problems found.
std::vector<std::string> audit_trace(const Json& doc) {
  const std::string sub = doc.at("subcommand");
  const Json& config = doc.at("config");
  const Json& payload = doc.at("payload");
  std::vector<std::string> problems;
  auto mismatch = [&](const Json& stored, const Json& recomputed, const std::string& what) {
    if (stored != recomputed) problems.push_back(what + " does not match the recomputed value");
  };
  if (sub == "eval" || sub == "fixpoint" || sub == "arslanov") {
    const Outcome o = sub == "eval" ? compute_eval(config) : sub == "fixpoint" ? compute_fixpoint(config)
                                                                             : compute_arslanov(config);
    mismatch(payload, o.payload, "payload");
  } else if (sub == "probe") {
    std::size_t i = 0;
    for (const Json& c : payload.at("certificates")) {
      check_certificate(trace::to_certificate(c), "certificate " + std::to_string(i++), problems);
    }
  } else if (sub == "injury") {
    const ConstructionState state = trace::to_construction_state(payload.at("state"));
    if (state.stage != config.at("stages").get<Steps>()) problems.push_back("state stage differs from the config");
    const std::vector<AuditViolation> violations = audit(state);
    for (const AuditViolation& v : violations) {
      problems.push_back(std::string(audit_rule_name(v.rule)) + " at stage " + std::to_string(v.stage) + ": " +
                         v.detail);
    }
    mismatch(payload.at("audit"), trace::audit_violations(violations), "recorded audit");
    std::size_t i = 0;
    for (const Json& c : payload.at("certificates")) {
      check_certificate(trace::to_certificate(c), "certificate " + std::to_string(i++), problems);
    }
    mismatch(payload.at("certificates"), injury_certificates(state, candidates_of(config)), "certificate list");
  } else if (sub == "adn-diag") {
    const DiagonalState state = trace::to_diagonal_state(payload.at("state"));
    const std::vector<DiagonalViolation> violations = audit_diagonal(state);
    for (const DiagonalViolation& v : violations) {
      problems.push_back(std::string(diagonal_audit_rule_name(v.rule)) + ": " + v.detail);
    }
    mismatch(payload.at("audit"), trace::diagonal_violations(violations), "recorded audit");
    for (const auto& [e, entry] : payload.at("verdicts").items()) {
      for (const Json& v : entry.at("verdicts")) {
        if (v.at("evidence").is_null()) continue;
        check_certificate(trace::to_certificate(v.at("evidence")), "verdict for candidate " + e, problems);
      }
    }
  } else {
    throw trace::TraceError("unknown subcommand '" + sub + "' in trace");
  }
  return problems;
}

struct Common {
  std::string out_path;
  std::string audit_path;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--out", c.out_path, "Write the JSON trace here instead of stdout");
  app->add_option("--audit", c.audit_path, "Re-audit a trace written by this subcommand");
}

void add_grid(CLI::App* app, Steps& inputs, Steps& budget) {
  app->add_option("--inputs", inputs, "Grid inputs 0..N-1")->capture_default_str();
  app->add_option("--budget", budget, "Grid step budget")->capture_default_str();
}

void require(const std::string& value, const std::string& flag) {
  if (value.empty()) throw UsageError(flag + " is required");
}

int emit(const std::string& subcommand, Json config, const Outcome& o, const Common& common, std::ostream& out,
         std::ostream& err) {
  const Json doc = trace::make_document(subcommand, std::move(config), o.payload);
  const std::string text = trace::render(doc);
  if (common.out_path.empty()) {
    out << text;
  } else {
    std::ofstream file(common.out_path, std::ios::binary);
    if (!file) throw UsageError("cannot write '" + common.out_path + "'");
    file << text;
    out << o.summary << "\n";
  }
  for (const std::string& p : o.problems) err << "violation: " << p << "\n";
  return o.problems.empty() ? kExitOk : kExitAudit;
}

int replay(const std::string& subcommand, const Common& common, std::ostream& out, std::ostream& err) {
  const std::string text = read_file(common.audit_path);
  Json doc;
  try {
    doc = trace::load_document(text);
  } catch (const trace::TraceError& e) {
    err << "violation: " << e.what() << "\n";
    return kExitAudit;
  }
  if (doc.at("subcommand") != subcommand) {
    throw UsageError("trace was written by '" + doc.at("subcommand").get<std::string>() + "', not '" + subcommand + "'");
  }
  std::vector<std::string> problems;
  try {
    problems = audit_trace(doc);
  } catch (const std::exception& e) {
    problems.push_back(std::string("malformed trace: ") + e.what());
  }
  for (const std::string& p : problems) err << "violation: " << p << "\n";
  out << (problems.empty() ? "audit clean" : "audit failed: " + std::to_string(problems.size()) + " violation(s)")
      << "\n";
  return problems.empty() ? kExitOk : kExitAudit;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fixed points, injury and diagonal constructions on a numbered toy language", "fixlab"};
  app.require_subcommand(1, 1);
  app.set_version_flag("--version", std::string(trace::kToolVersion));

  std::function<int()> action;

  // eval
  Common eval_common;
  std::string eval_program, eval_input = "0";
  Steps eval_budget = 10'000;
  auto* eval_cmd = app.add_subcommand("eval", "Run a program on one input within a step budget");
  eval_cmd->add_option("--program,-p", eval_program, "Program text or #code");
  eval_cmd->add_option("--input,-x", eval_input, "Input (decimal)")->capture_default_str();
  eval_cmd->add_option("--budget,-b", eval_budget, "Step budget")->capture_default_str();
  add_common(eval_cmd, eval_common);
  eval_cmd->callback([&] {
    action = [&] {
      if (!eval_common.audit_path.empty()) return replay("eval", eval_common, out, err);
      require(eval_program, "--program");
      Json config = {{"program", program_json(program_arg("--program", eval_program))},
                     {"input", trace::nat(nat_arg("--input", eval_input))},
                     {"budget", eval_budget}};
      const Outcome o = compute_eval(config);
      if (eval_common.out_path.empty()) {
        out << o.summary << "\n";
        return kExitOk;
      }
      return emit("eval", std::move(config), o, eval_common, out, err);
    };
  });

  // fixpoint
  Common fix_common;
  std::string fix_transform;
  bool fix_param = false;
  Steps fix_n_max = 10, fix_inputs = 16, fix_budget = 10'000;
  auto* fix_cmd = app.add_subcommand("fixpoint", "Fixed point of a transform, verified on a grid");
  fix_cmd->add_option("--transform,-t", fix_transform, "Transform program");
  fix_cmd->add_flag("--param", fix_param, "Treat the transform as binary on <n, e> and build the parameterized form");
  fix_cmd->add_option("--n-max", fix_n_max, "Largest parameter checked with --param")->capture_default_str();
  add_grid(fix_cmd, fix_inputs, fix_budget);
  add_common(fix_cmd, fix_common);
  fix_cmd->callback([&] {
    action = [&] {
      if (!fix_common.audit_path.empty()) return replay("fixpoint", fix_common, out, err);
      require(fix_transform, "--transform");
      Json config = {{"transform", program_json(program_arg("--transform", fix_transform))},
                     {"param", fix_param},
                     {"n_max", fix_n_max},
                     {"grid_inputs", fix_inputs},
                     {"grid_budget", fix_budget}};
      const Outcome o = compute_fixpoint(config);
      return emit("fixpoint", std::move(config), o, fix_common, out, err);
    };
  });

  // probe
  Common probe_common;
  std::string probe_mode = "dnc", probe_g, probe_f, probe_delta;
  Steps probe_e_max = 15, probe_n_max = 15, probe_stage = 10'000, probe_n_bound = 1, probe_inputs = 16,
        probe_budget = 10'000;
  auto* probe_cmd = app.add_subcommand("probe", "Search for DNC, FPF or FPF+ violation certificates");
  probe_cmd->add_option("--mode", probe_mode, "dnc | fpf | fpf-plus")
      ->check(CLI::IsMember({"dnc", "fpf", "fpf-plus"}))
      ->capture_default_str();
  probe_cmd->add_option("--g", probe_g, "Candidate g (dnc, fpf-plus)");
  probe_cmd->add_option("--f", probe_f, "Candidate f (fpf)");
  probe_cmd->add_option("--delta", probe_delta, "Binary delta on <n, x> (fpf-plus)");
  probe_cmd->add_option("--e-max", probe_e_max, "dnc: indices 0..e-max")->capture_default_str();
  probe_cmd->add_option("--n-max", probe_n_max, "fpf: indices 0..n-max")->capture_default_str();
  probe_cmd->add_option("--stage", probe_stage, "fpf: enumeration stage")->capture_default_str();
  probe_cmd->add_option("--n-bound", probe_n_bound, "fpf-plus: parameters 0..n-bound")->capture_default_str();
  add_grid(probe_cmd, probe_inputs, probe_budget);
  add_common(probe_cmd, probe_common);
  probe_cmd->callback([&] {
    action = [&] {
      if (!probe_common.audit_path.empty()) return replay("probe", probe_common, out, err);
      Json config = {{"mode", probe_mode}};
      if (probe_mode == "dnc") {
        require(probe_g, "--g");
        config["g"] = program_json(program_arg("--g", probe_g));
        config["e_max"] = probe_e_max;
        config["budget"] = probe_budget;
      } else if (probe_mode == "fpf") {
        require(probe_f, "--f");
        config["f"] = program_json(program_arg("--f", probe_f));
        config["n_max"] = probe_n_max;
        config["stage"] = probe_stage;
      } else {
        require(probe_g, "--g");
        require(probe_delta, "--delta");
        config["g"] = program_json(program_arg("--g", probe_g));
        config["delta"] = program_json(program_arg("--delta", probe_delta));
        config["n_bound"] = probe_n_bound;
        config["budget"] = probe_budget;
        config["grid_inputs"] = probe_inputs;
        config["grid_budget"] = probe_budget;
      }
      const Outcome o = compute_probe(config);
      return emit("probe", std::move(config), o, probe_common, out, err);
    };
  });

  // arslanov
  Common ars_common;
  std::string ars_fhat;
  Steps ars_stages = 10'000, ars_inputs = 16, ars_budget = 10'000, ars_limit = kDefaultProbeLimit;
  auto* ars_cmd = app.add_subcommand("arslanov", "Fixed-point candidates h(n) for n entering K");
  ars_cmd->add_option("--fhat", ars_fhat, "Approximation on <x, s>");
  ars_cmd->add_option("--stages", ars_stages, "Largest stage")->capture_default_str();
  ars_cmd->add_option("--probe-limit", ars_limit, "Candidates probed on the grid")->capture_default_str();
  add_grid(ars_cmd, ars_inputs, ars_budget);
  add_common(ars_cmd, ars_common);
  ars_cmd->callback([&] {
    action = [&] {
      if (!ars_common.audit_path.empty()) return replay("arslanov", ars_common, out, err);
      require(ars_fhat, "--fhat");
      if (ars_stages == 0) throw UsageError("--stages must be at least 1");
      Json config = {{"fhat", program_json(program_arg("--fhat", ars_fhat))},
                     {"stages", ars_stages},
                     {"probe_limit", ars_limit},
                     {"grid_inputs", ars_inputs},
                     {"grid_budget", ars_budget}};
      const Outcome o = compute_arslanov(config);
      return emit("arslanov", std::move(config), o, ars_common, out, err);
    };
  });

  // injury
  Common inj_common;
  std::string inj_candidates;
  Steps inj_stages = 1000;
  std::optional<Steps> inj_lowness;
  auto* inj_cmd = app.add_subcommand("injury", "Finite-injury construction against candidate functions");
  inj_cmd->add_option("--stages", inj_stages, "Stages to run")->capture_default_str();
  inj_cmd->add_option("--candidates", inj_candidates, "@file, or a comma-separated list of [e =] program");
  inj_cmd->add_option("--lowness-bound", inj_lowness, "Lowness requirements L_e for e below this (default: 1 + largest e)");
  add_common(inj_cmd, inj_common);
  inj_cmd->callback([&] {
    action = [&] {
      if (!inj_common.audit_path.empty()) return replay("injury", inj_common, out, err);
      require(inj_candidates, "--candidates");
      Json config = {{"candidates", read_candidates(inj_candidates)}, {"stages", inj_stages}};
      config["lowness_bound"] = inj_lowness ? *inj_lowness : default_lowness_bound(candidates_of(config));
      const Outcome o = compute_injury(config);
      return emit("injury", std::move(config), o, inj_common, out, err);
    };
  });

  // adn-diag
  Common adn_common;
  Steps adn_count = 50, adn_stages = 10'000, adn_n_bound = 0, adn_inputs = 16, adn_budget = 10'000;
  auto* adn_cmd = app.add_subcommand("adn-diag", "Diagonal delta against the first candidates, with verdicts");
  adn_cmd->add_option("--candidates", adn_count, "Number of candidates e = 0, 1, ...")->capture_default_str();
  adn_cmd->add_option("--stages", adn_stages, "Stages to run")->capture_default_str();
  adn_cmd->add_option("--n-bound", adn_n_bound, "Also verify at points 0..n-bound")->capture_default_str();
  add_grid(adn_cmd, adn_inputs, adn_budget);
  add_common(adn_cmd, adn_common);
  adn_cmd->callback([&] {
    action = [&] {
      if (!adn_common.audit_path.empty()) return replay("adn-diag", adn_common, out, err);
      Json config = {{"candidate_count", adn_count},
                     {"stages", adn_stages},
                     {"n_bound", adn_n_bound},
                     {"grid_inputs", adn_inputs},
                     {"grid_budget", adn_budget}};
      const Outcome o = compute_adn(config);
      return emit("adn-diag", std::move(config), o, adn_common, out, err);
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }
  try {
    return action();
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

}  // namespace fixlab::cli
