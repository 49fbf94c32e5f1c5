#include "fixlab/trace.hpp"

#include <array>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <utility>

namespace fixlab::trace {

namespace {

constexpr std::array<std::pair<SetKind, std::string_view>, 5> kSetKinds{{
    {SetKind::Domain, "domain"},
    {SetKind::Graph, "graph"},
    {SetKind::Halting, "halting"},
    {SetKind::Nonempty, "nonempty"},
    {SetKind::Constructed, "constructed"},
}};

std::string_view set_kind_name(SetKind k) {
  for (const auto& [kind, name] : kSetKinds) {
    if (kind == k) return name;
  }
  return "?";
}

SetKind parse_set_kind(const std::string& name) {
  for (const auto& [kind, n] : kSetKinds) {
    if (n == name) return kind;
  }
  throw TraceError("unknown set kind '" + name + "'");
}

std::string_view kind_name(CertificateKind k) { return k == CertificateKind::Permanent ? "permanent" : "provisional"; }

CertificateKind parse_kind(const std::string& name) {
  if (name == "permanent") return CertificateKind::Permanent;
  if (name == "provisional") return CertificateKind::Provisional;
  throw TraceError("unknown certificate kind '" + name + "'");
}

RequirementId parse_requirement(const std::string& name) {
  if (name.size() < 2 || (name[0] != 'L' && name[0] != 'R')) throw TraceError("bad requirement '" + name + "'");
  RequirementId r;
  r.kind = name[0] == 'L' ? RequirementId::Kind::L : RequirementId::Kind::R;
  r.index = to_steps(parse_nat(std::string_view(name).substr(1)));
  return r;
}

template <class T>
T field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw TraceError(std::string("missing field '") + key + "'");
  return j.at(key).get<T>();
}

const Json& sub(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw TraceError(std::string("missing field '") + key + "'");
  return j.at(key);
}

Json optional_nat(const std::optional<Nat>& n) { return n ? nat(*n) : Json(nullptr); }

std::optional<Nat> to_optional_nat(const Json& j) {
  if (j.is_null()) return std::nullopt;
  return to_nat(j);
}

}  // namespace

std::string checksum(const Json& payload) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : payload.dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Json make_document(std::string_view subcommand, Json config, Json payload) {
  Json doc;
  doc["schema"] = std::string(kSchema);
  doc["tool_version"] = std::string(kToolVersion);
  doc["subcommand"] = std::string(subcommand);
  doc["config"] = std::move(config);
  doc["checksum"] = checksum(payload);
  doc["payload"] = std::move(payload);
  return doc;
}

std::string render(const Json& document) { return document.dump(2) + "\n"; }

Json load_document(std::string_view text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw TraceError(std::string("not a trace: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("schema") || doc["schema"] != std::string(kSchema)) {
    throw TraceError("unsupported or missing schema tag");
  }
  for (const char* key : {"subcommand", "config", "payload", "checksum"}) sub(doc, key);
  if (doc["checksum"] != checksum(doc["payload"])) throw TraceError("checksum does not match payload");
  return doc;
}

Json nat(const Nat& n) { return to_string(n); }

Nat to_nat(const Json& j) {
  if (j.is_string()) {
    try {
      return parse_nat(j.get<std::string>());
    } catch (const std::invalid_argument&) {
    }
  }
  if (j.is_number_unsigned()) return Nat(j.get<std::uint64_t>());
  throw TraceError("expected a natural number, got " + j.dump());
}

Json nats(const std::vector<Nat>& v) {
  Json out = Json::array();
  for (const Nat& n : v) out.push_back(nat(n));
  return out;
}

Steps to_steps_checked(const Json& j) {
  if (j.is_number_unsigned()) return j.get<Steps>();
  const Nat n = to_nat(j);
  if (n > Nat(std::numeric_limits<Steps>::max())) throw TraceError("step count out of range");
  return static_cast<Steps>(n);
}

Json outcome(const EvalOutcome& out) {
  Json j;
  j["status"] = out.converged() ? "converged" : "exhausted";
  j["steps_used"] = out.steps_used;
  j["use"] = nat(out.use);
  if (out.converged()) j["value"] = nat(out.value);
  return j;
}

Json grid(const std::vector<GridPoint>& g) {
  Json out = Json::array();
  for (const GridPoint& p : g) out.push_back({{"input", nat(p.input)}, {"budget", p.budget}});
  return out;
}

Json fixed_point_report(const FixedPointReport& r) {
  Json j;
  j["fixed_code"] = nat(r.fixed_code);
  j["transform_code"] = nat(r.transform_code);
  j["transform_converged"] = r.transform_converged;
  j["image_code"] = r.transform_converged ? nat(r.image_code) : Json(nullptr);
  j["verified"] = r.verified;
  Json points = Json::array();
  for (const PointReport& p : r.points) {
    points.push_back({{"input", nat(p.point.input)},
                      {"budget", p.point.budget},
                      {"agreement", std::string(agreement_name(p.agreement))},
                      {"fixed_side", outcome(p.fixed_side)},
                      {"image_side", outcome(p.image_side)}});
  }
  j["points"] = std::move(points);
  return j;
}

Json param_report(const ParamFixedPointReport& r) {
  Json j;
  j["f_code"] = nat(r.f_code);
  j["h_code"] = nat(r.h_code);
  j["f_total_on_range"] = r.f_total_on_range;
  j["verified"] = r.verified;
  j["n_range"] = nats(r.n_range);
  Json per = Json::array();
  for (const FixedPointReport& p : r.per_n) per.push_back(fixed_point_report(p));
  j["per_n"] = std::move(per);
  return j;
}

Json certificate(const Certificate& c) {
  Json j;
  j["kind"] = std::string(kind_name(c.kind));
  j["subject"] = c.subject;
  j["witness"] = nats(c.witness);
  j["stage_or_budget"] = c.stage_or_budget;
  Json ev = Json::array();
  for (const MembershipFact& f : c.evidence) {
    ev.push_back({{"element", nat(f.element)},
                  {"set", {{"kind", std::string(set_kind_name(f.set.kind))}, {"index", nat(f.set.index)}}},
                  {"stage", f.stage},
                  {"in", f.in}});
  }
  j["evidence"] = std::move(ev);
  return j;
}

Certificate to_certificate(const Json& j) {
  Certificate c;
  c.kind = parse_kind(field<std::string>(j, "kind"));
  c.subject = field<std::string>(j, "subject");
  for (const Json& w : sub(j, "witness")) c.witness.push_back(to_nat(w));
  c.stage_or_budget = to_steps_checked(sub(j, "stage_or_budget"));
  for (const Json& f : sub(j, "evidence")) {
    MembershipFact fact;
    fact.element = to_nat(sub(f, "element"));
    const Json& set = sub(f, "set");
    fact.set.kind = parse_set_kind(field<std::string>(set, "kind"));
    fact.set.index = to_nat(sub(set, "index"));
    fact.stage = to_steps_checked(sub(f, "stage"));
    fact.in = field<bool>(f, "in");
    c.evidence.push_back(std::move(fact));
  }
  return c;
}

Json fpf_plus_result(const FpfPlusResult& r) {
  Json j;
  j["status"] = std::string(fpf_plus_status_name(r.status));
  j["deciding_n"] = r.deciding_n;
  j["certificate"] = r.certificate ? certificate(*r.certificate) : Json(nullptr);
  return j;
}

Json candidates(const Candidates& c) {
  Json j = Json::object();
  for (const auto& [e, code] : c) j[std::to_string(e)] = nat(code);
  return j;
}

Candidates to_candidates(const Json& j) {
  Candidates c;
  if (!j.is_object()) throw TraceError("candidates must be an object");
  for (const auto& [key, code] : j.items()) c[to_steps(parse_nat(key))] = to_nat(code);
  return c;
}

Json construction_state(const ConstructionState& s) {
  Json j;
  j["stage"] = s.stage;
  j["lowness_bound"] = s.lowness_bound;
  Json a = Json::array();
  for (const Nat& x : s.A) a.push_back(nat(x));  // std::set: already sorted
  j["A"] = std::move(a);
  Json r = Json::object();
  for (const auto& [e, v] : s.restraints) r[std::to_string(e)] = nat(v);
  j["restraints"] = std::move(r);
  Json w = Json::object();
  for (const auto& [e, v] : s.witnesses) w[std::to_string(e)] = nat(v);
  j["witnesses"] = std::move(w);
  Json used = Json::array();
  for (const Nat& x : s.used_witnesses) used.push_back(nat(x));
  j["used_witnesses"] = std::move(used);
  Json log = Json::array();
  for (const ActionEvent& ev : s.log) {
    log.push_back({{"stage", ev.stage},
                   {"requirement", requirement_name(ev.requirement)},
                   {"action", std::string(action_name(ev.action))},
                   {"payload", nats(ev.payload)}});
  }
  j["log"] = std::move(log);
  return j;
}

ConstructionState to_construction_state(const Json& j) {
  ConstructionState s;
  s.stage = to_steps_checked(sub(j, "stage"));
  s.lowness_bound = to_steps_checked(sub(j, "lowness_bound"));
  for (const Json& x : sub(j, "A")) s.A.insert(to_nat(x));
  for (const auto& [e, v] : sub(j, "restraints").items()) s.restraints[to_steps(parse_nat(e))] = to_nat(v);
  for (const auto& [e, v] : sub(j, "witnesses").items()) s.witnesses[to_steps(parse_nat(e))] = to_nat(v);
  for (const Json& x : sub(j, "used_witnesses")) s.used_witnesses.insert(to_nat(x));
  for (const Json& ev : sub(j, "log")) {
    ActionEvent event;
    event.stage = to_steps_checked(sub(ev, "stage"));
    event.requirement = parse_requirement(field<std::string>(ev, "requirement"));
    const auto action = parse_action(field<std::string>(ev, "action"));
    if (!action) throw TraceError("unknown action " + sub(ev, "action").dump());
    event.action = *action;
    for (const Json& p : sub(ev, "payload")) event.payload.push_back(to_nat(p));
    s.log.push_back(std::move(event));
  }
  return s;
}

Json audit_violations(const std::vector<AuditViolation>& v) {
  Json out = Json::array();
  for (const AuditViolation& a : v) {
    out.push_back({{"rule", std::string(audit_rule_name(a.rule))}, {"stage", a.stage}, {"detail", a.detail}});
  }
  return out;
}

Json arslanov_run(const ArslanovRun& run) {
  Json j;
  j["fhat_code"] = nat(run.fhat_code);
  j["h_code"] = nat(run.h_code);
  j["stage"] = run.stage;
  Json cands = Json::array();
  for (const ArslanovCandidate& c : run.candidates) {
    cands.push_back({{"n", c.n}, {"s_n", c.s_n}, {"h_of_n", nat(c.h_of_n)}});
  }
  j["candidates"] = std::move(cands);
  Json probes = Json::array();
  for (const ArslanovProbe& p : run.probes) {
    probes.push_back({{"n", p.n}, {"h_of_n", nat(p.h_of_n)}, {"report", fixed_point_report(p.report)}});
  }
  j["probes"] = std::move(probes);
  return j;
}

Json diagonal_state(const DiagonalState& s) {
  Json j;
  j["stage"] = s.stage;
  j["candidate_count"] = s.candidate_count;
  Json cands = Json::object();
  for (const auto& [e, c] : s.candidates) {
    cands[std::to_string(e)] = {{"witness", nat(c.witness)},
                                {"secondary", nat(c.secondary)},
                                {"status", std::string(diagonal_status_name(c.status))},
                                {"observed", optional_nat(c.observed)},
                                {"kill_stage", c.kill_stage ? Json(*c.kill_stage) : Json(nullptr)},
                                {"secondary_value", optional_nat(c.secondary_value)}};
  }
  j["candidates"] = std::move(cands);
  Json delta = Json::array();
  for (const DeltaEntry& d : s.delta) {
    delta.push_back({{"n", nat(d.n)}, {"x", nat(d.x)}, {"stage", d.stage}, {"candidate", d.candidate}});
  }
  j["delta"] = std::move(delta);
  Json obl = Json::array();
  for (const Obligation& o : s.obligations) {
    obl.push_back({{"m", nat(o.m)}, {"value", nat(o.value)}, {"stage", o.stage}, {"candidate", o.candidate}});
  }
  j["obligations"] = std::move(obl);
  return j;
}

DiagonalState to_diagonal_state(const Json& j) {
  DiagonalState s;
  s.stage = to_steps_checked(sub(j, "stage"));
  s.candidate_count = to_steps_checked(sub(j, "candidate_count"));
  for (const auto& [key, c] : sub(j, "candidates").items()) {
    DiagonalCandidate d;
    d.witness = to_nat(sub(c, "witness"));
    d.secondary = to_nat(sub(c, "secondary"));
    const auto status = parse_diagonal_status(field<std::string>(c, "status"));
    if (!status) throw TraceError("unknown candidate status");
    d.status = *status;
    d.observed = to_optional_nat(sub(c, "observed"));
    if (!sub(c, "kill_stage").is_null()) d.kill_stage = to_steps_checked(sub(c, "kill_stage"));
    d.secondary_value = to_optional_nat(sub(c, "secondary_value"));
    s.candidates[to_steps(parse_nat(key))] = std::move(d);
  }
  for (const Json& d : sub(j, "delta")) {
    s.delta.push_back({to_nat(sub(d, "n")), to_nat(sub(d, "x")), to_steps_checked(sub(d, "stage")),
                       to_steps_checked(sub(d, "candidate"))});
  }
  for (const Json& o : sub(j, "obligations")) {
    s.obligations.push_back({to_nat(sub(o, "m")), to_nat(sub(o, "value")), to_steps_checked(sub(o, "stage")),
                             to_steps_checked(sub(o, "candidate"))});
  }
  return s;
}

Json diagonal_violations(const std::vector<DiagonalViolation>& v) {
  Json out = Json::array();
  for (const DiagonalViolation& d : v) {
    out.push_back({{"rule", std::string(diagonal_audit_rule_name(d.rule))}, {"detail", d.detail}});
  }
  return out;
}

Json adn_verdict(const AdnVerdict& v) {
  Json j;
  j["candidate"] = nat(v.candidate);
  j["n"] = v.n;
  j["violated"] = std::string(adn_violation_name(v.violated));
  j["evidence"] = v.evidence ? certificate(*v.evidence) : Json(nullptr);
  return j;
}

}  // namespace fixlab::trace
