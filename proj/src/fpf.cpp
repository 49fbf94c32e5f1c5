#include "fixlab/fpf.hpp"

#include <algorithm>
#include <array>

namespace fixlab {

std::string set_name(const SetId& set) {
  switch (set.kind) {
    case SetKind::Domain: return "W[" + to_string(set.index) + "]";
    case SetKind::Graph: return "graph[" + to_string(set.index) + "]";
    case SetKind::Halting: return "K";
    case SetKind::Nonempty: return "nonempty[" + to_string(set.index) + "]";
    case SetKind::Constructed: return "A";
  }
  return "?";
}

namespace {

bool domain_member(const Nat& code, const Nat& n, Steps stage) {
  return n <= stage && eval(code, n, stage).converged();
}

MembershipFact graph_fact(const Nat& code, const Nat& x, const Nat& v, Steps stage, bool in = true) {
  return {pair(x, v), {SetKind::Graph, code}, stage, in};
}

MembershipFact domain_fact(const Nat& code, const Nat& n, Steps stage, bool in) {
  return {n, {SetKind::Domain, code}, stage, in};
}

}  // namespace

std::optional<bool> replay_fact(const MembershipFact& fact) {
  bool member = false;
  switch (fact.set.kind) {
    case SetKind::Domain: member = domain_member(fact.set.index, fact.element, fact.stage); break;
    case SetKind::Halting: member = domain_member(fact.element, fact.element, fact.stage); break;
    case SetKind::Graph: {
      const auto [x, v] = unpair(fact.element);
      const EvalOutcome out = eval(fact.set.index, x, fact.stage);
      member = out.converged() && out.value == v;
      break;
    }
    case SetKind::Nonempty: {
      const Steps t = to_steps(fact.element);
      member = !enumerate_domain(fact.set.index, t).empty();
      break;
    }
    case SetKind::Constructed: return std::nullopt;
  }
  return member == fact.in;
}

bool permanence_ok(const Certificate& cert) {
  if (cert.kind == CertificateKind::Provisional) return true;
  return std::all_of(cert.evidence.begin(), cert.evidence.end(),
                     [](const MembershipFact& f) { return f.in || f.set.kind == SetKind::Constructed; });
}

bool evidence_replays(const Certificate& cert) {
  return std::all_of(cert.evidence.begin(), cert.evidence.end(),
                     [](const MembershipFact& f) { return replay_fact(f).value_or(true); });
}

std::optional<Certificate> dnc_violation(const Nat& g, const Nat& e, Steps budget) {
  const EvalOutcome ge = eval(g, e, budget);
  if (!ge.converged()) return std::nullopt;
  const EvalOutcome ee = eval(e, e, budget);
  if (!ee.converged() || ee.value != ge.value) return std::nullopt;
  Certificate cert;
  cert.kind = CertificateKind::Permanent;
  cert.subject = "g(e) = phi_e(e)";
  cert.witness = {e, ge.value};
  // The least budget showing both facts, so larger budgets give the same certificate.
  const Steps b = std::max(ge.steps_used, ee.steps_used);
  cert.stage_or_budget = b;
  cert.evidence = {graph_fact(g, e, ge.value, b), graph_fact(e, e, ee.value, b)};
  return cert;
}

std::optional<Certificate> fpf_discrepancy(const Nat& f, const Nat& n, Steps stage) {
  const EvalOutcome fn = eval(f, n, stage);
  if (!fn.converged()) return std::nullopt;
  const StageSet image = enumerate_domain(fn.value, stage);
  const StageSet source = enumerate_domain(n, stage);
  std::vector<Steps> diff;
  std::set_symmetric_difference(image.members.begin(), image.members.end(), source.members.begin(),
                                source.members.end(), std::back_inserter(diff));
  if (diff.empty()) return std::nullopt;
  const Steps x = diff.front();
  const bool in_image = image.contains(x);
  Certificate cert;
  cert.kind = CertificateKind::Provisional;
  cert.subject = "W_f(n) != W_n";
  cert.witness = {n, fn.value, x};
  cert.stage_or_budget = stage;
  cert.evidence = {graph_fact(f, n, fn.value, stage), domain_fact(fn.value, x, stage, in_image),
                   domain_fact(n, x, stage, !in_image)};
  return cert;
}

std::string_view fpf_plus_status_name(FpfPlusStatus s) {
  switch (s) {
    case FpfPlusStatus::Certified: return "certified";
    case FpfPlusStatus::None: return "none";
    case FpfPlusStatus::GDiverged: return "g-diverged";
  }
  return "?";
}

FpfPlusResult fpf_plus_refute(const FpfPlusWitnessQuery& q) {
  FpfPlusResult result;
  std::vector<Nat> g_values;
  for (Steps n = 0; n <= q.n_bound; ++n) {
    const EvalOutcome gn = eval(q.g_code, n, q.budget);
    if (!gn.converged()) {
      result.status = FpfPlusStatus::GDiverged;
      result.deciding_n = n;
      return result;
    }
    g_values.push_back(gn.value);
  }

  Certificate cert;
  cert.kind = CertificateKind::Provisional;
  cert.subject = "g computes fixed points of delta(n, -) for all n <= bound";
  cert.stage_or_budget = q.budget;
  for (Steps n = 0; n <= q.n_bound; ++n) {
    const Nat& gn = g_values[n];
    const Nat arg = pair(n, gn);
    const EvalOutcome d = eval(q.delta_code, arg, q.budget);
    if (!d.converged()) {
      result.status = FpfPlusStatus::None;
      result.deciding_n = n;
      return result;
    }
    cert.witness.push_back(gn);
    cert.evidence.push_back(graph_fact(q.g_code, n, gn, q.budget));
    cert.evidence.push_back(graph_fact(q.delta_code, arg, d.value, q.budget));
    const Program lhs = decode(gn);
    const Program rhs = decode(d.value);
    for (const GridPoint& p : q.grid) {
      const EvalOutcome a = eval(lhs, p.input, p.budget);
      const EvalOutcome b = eval(rhs, p.input, p.budget);
      if (compare_outcomes(a, b) == Agreement::Disagree) {
        result.status = FpfPlusStatus::None;
        result.deciding_n = n;
        return result;
      }
      const bool conv = a.converged();
      const Nat v = conv ? a.value : Nat(0);
      cert.evidence.push_back(conv ? graph_fact(gn, p.input, v, p.budget) : domain_fact(gn, p.input, p.budget, false));
      cert.evidence.push_back(conv ? graph_fact(d.value, p.input, v, p.budget)
                                   : domain_fact(d.value, p.input, p.budget, false));
    }
  }
  result.status = FpfPlusStatus::Certified;
  result.certificate = std::move(cert);
  return result;
}

Nat lift_fpf_to_fpfplus(const Nat& delta) {
  const std::array<Nat, 2> kids{delta, build::right()->code};
  return node_code(Op::Comp, kids);
}

}  // namespace fixlab
