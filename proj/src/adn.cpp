#include "fixlab/adn.hpp"

#include <algorithm>
#include <array>
#include <set>

namespace fixlab {

using namespace build;

Program psi_program() {
  // <e, <x, z>>: z = 0 -> phi_e(x), otherwise diverge
  return cases(comp(right(), right()), apply(left(), comp(left(), right())), loop());
}

EvalOutcome psi(const Nat& n, Steps budget) { return eval(psi_program(), n, budget); }

bool psi_divergent_region(const Nat& n) { return std::get<2>(untriple(n)) != 0; }

Nat diagonal_witness(Steps e) { return triple(e, 0, 1); }
Nat secondary_point(Steps e) { return triple(e, 1, 1); }

Program delta_program() {
  const Program n = left();
  const Program e = comp(left(), n);
  const Program a = comp(left(), comp(right(), n));
  const Program z = comp(right(), comp(right(), n));
  const Program test = add(add(a, differ(z, konst(1))), differ(apply(e, n), right()));
  return cases(test, konst(canonical_nonempty_code()), loop());
}

EvalOutcome delta(const Nat& n, const Nat& x, Steps budget) { return eval(delta_program(), pair(n, x), budget); }

namespace {

constexpr std::array<std::pair<DiagonalStatus, std::string_view>, 3> kStatusNames{{
    {DiagonalStatus::Waiting, "waiting"},
    {DiagonalStatus::Killed, "killed"},
    {DiagonalStatus::SecondaryObserved, "secondary-observed"},
}};

// Everything a stage does once the evaluations are known.
template <class Evaluate>
void perform_stage(DiagonalState& st, Evaluate&& evaluate) {
  const Steps s = st.stage;
  if (s < st.candidate_count && !st.candidates.contains(s)) {
    DiagonalCandidate c;
    c.witness = diagonal_witness(s);
    c.secondary = secondary_point(s);
    st.candidates[s] = std::move(c);
  }
  for (auto& [e, c] : st.candidates) {
    if (c.status == DiagonalStatus::Waiting) {
      const EvalOutcome out = evaluate(e, c.witness);
      if (!out.converged()) continue;
      c.status = DiagonalStatus::Killed;
      c.observed = out.value;
      c.kill_stage = s;
      st.delta.push_back({c.witness, out.value, s, e});
    } else if (c.status == DiagonalStatus::Killed) {
      const EvalOutcome out = evaluate(e, c.secondary);
      if (!out.converged()) continue;
      c.status = DiagonalStatus::SecondaryObserved;
      c.secondary_value = out.value;
      st.obligations.push_back({c.secondary, out.value, s, e});
    }
  }
  st.stage = s + 1;
}

}  // namespace

std::string_view diagonal_status_name(DiagonalStatus s) {
  for (const auto& [k, name] : kStatusNames) {
    if (k == s) return name;
  }
  return "?";
}

std::optional<DiagonalStatus> parse_diagonal_status(std::string_view name) {
  for (const auto& [k, n] : kStatusNames) {
    if (n == name) return k;
  }
  return std::nullopt;
}

DiagonalState diagonal_step(const DiagonalState& state, Steps budget) {
  DiagonalState next = state;
  perform_stage(next, [&](Steps e, const Nat& point) { return eval(Nat(e), point, budget); });
  return next;
}

struct DiagonalEngine::Runs {
  // keyed by (candidate, point)
  std::map<std::pair<Steps, Nat>, Machine> machines;
};

DiagonalEngine::DiagonalEngine(Steps candidate_count) : runs_(std::make_unique<Runs>()) {
  state_.candidate_count = candidate_count;
}

DiagonalEngine::~DiagonalEngine() = default;
DiagonalEngine::DiagonalEngine(DiagonalEngine&&) noexcept = default;
DiagonalEngine& DiagonalEngine::operator=(DiagonalEngine&&) noexcept = default;

void DiagonalEngine::step() {
  const Steps budget = state_.stage;
  perform_stage(state_, [&](Steps e, const Nat& point) {
    auto key = std::make_pair(e, point);
    auto it = runs_->machines.find(key);
    if (it == runs_->machines.end()) it = runs_->machines.emplace(key, Machine(decode_cached(e), point)).first;
    it->second.advance(budget);
    EvalOutcome out = it->second.outcome();
    if (out.converged()) runs_->machines.erase(it);
    return out;
  });
}

void DiagonalEngine::run_to(Steps stage) {
  while (state_.stage < stage) step();
}

DiagonalState run_diagonal(Steps candidate_count, Steps stages) {
  DiagonalEngine engine(candidate_count);
  engine.run_to(stages);
  return engine.state();
}

std::string_view diagonal_audit_rule_name(DiagonalAuditRule r) {
  switch (r) {
    case DiagonalAuditRule::Sparsity: return "sparsity";
    case DiagonalAuditRule::WitnessRegion: return "witness-region";
    case DiagonalAuditRule::Obligation: return "obligation";
    case DiagonalAuditRule::KillSoundness: return "kill-soundness";
    case DiagonalAuditRule::DistinctWitnesses: return "distinct-witnesses";
  }
  return "?";
}

std::vector<DiagonalViolation> audit_diagonal(const DiagonalState& state) {
  std::vector<DiagonalViolation> out;
  auto flag = [&](DiagonalAuditRule r, std::string d) { out.push_back({r, std::move(d)}); };

  std::map<Nat, Nat> first_x;
  for (const DeltaEntry& d : state.delta) {
    const auto [it, fresh] = first_x.emplace(d.n, d.x);
    if (!fresh) flag(DiagonalAuditRule::Sparsity, "delta defined twice at n = " + to_string(d.n));
    if (!psi_divergent_region(d.n)) flag(DiagonalAuditRule::WitnessRegion, "psi converges region at " + to_string(d.n));
  }

  std::set<Nat> points;
  for (const auto& [e, c] : state.candidates) {
    if (!points.insert(c.witness).second) flag(DiagonalAuditRule::DistinctWitnesses, "shared point " + to_string(c.witness));
    if (!points.insert(c.secondary).second) {
      flag(DiagonalAuditRule::DistinctWitnesses, "shared point " + to_string(c.secondary));
    }
    if (!psi_divergent_region(c.witness)) flag(DiagonalAuditRule::WitnessRegion, "witness of " + std::to_string(e));
    if (c.status == DiagonalStatus::Waiting) continue;
    // a killed candidate converges on its witness to the recorded value by the kill stage
    const EvalOutcome out = eval(Nat(e), c.witness, c.kill_stage.value_or(0));
    if (!c.observed || !out.converged() || out.value != *c.observed) {
      flag(DiagonalAuditRule::KillSoundness, "candidate " + std::to_string(e) + " does not replay");
      continue;
    }
    const bool entered = std::any_of(state.delta.begin(), state.delta.end(), [&](const DeltaEntry& d) {
      return d.n == c.witness && d.x == *c.observed && d.candidate == e;
    });
    if (!entered) flag(DiagonalAuditRule::KillSoundness, "candidate " + std::to_string(e) + " has no delta entry");
  }
  for (const DeltaEntry& d : state.delta) {
    const auto c = state.candidates.find(d.candidate);
    if (c == state.candidates.end() || c->second.witness != d.n) {
      flag(DiagonalAuditRule::KillSoundness, "delta entry at " + to_string(d.n) + " has no killing candidate");
    }
  }

  for (const Obligation& o : state.obligations) {
    const auto it = first_x.find(o.m);
    if (it != first_x.end() && it->second == o.value) {
      flag(DiagonalAuditRule::Obligation, "delta defined at obligated point " + to_string(o.m));
    }
    for (const DeltaEntry& d : state.delta) {
      if (d.n == o.m && d.x == o.value) flag(DiagonalAuditRule::Obligation, "entry on obligation");
    }
  }
  return out;
}

DeltaSpec DeltaSpec::from_state(const DiagonalState& state) {
  DeltaSpec spec;
  spec.form = Form::Graph;
  for (const DeltaEntry& d : state.delta) spec.graph.emplace(d.n, d.x);
  return spec;
}

std::string_view adn_violation_name(AdnViolation v) {
  switch (v) {
    case AdnViolation::NoneYet: return "none-yet";
    case AdnViolation::Condition2: return "condition-2";
    case AdnViolation::Condition3: return "condition-3";
    case AdnViolation::FDiverged: return "f-diverged";
  }
  return "?";
}

namespace {

MembershipFact graph_fact(const Nat& code, const Nat& x, const Nat& v, Steps stage) {
  return {pair(x, v), {SetKind::Graph, code}, stage, true};
}

// Evaluates delta at (n, x) in the requested form. For the frozen graph the
// answer is read off, and the evidence is the delta program itself run
// until it shows the entry.
struct DeltaProbe {
  bool converged = false;
  MembershipFact fact;
};

DeltaProbe probe_delta(const DeltaSpec& spec, const Nat& n, const Nat& x, Steps budget) {
  DeltaProbe p;
  switch (spec.form) {
    case DeltaSpec::Form::Binary: {
      const EvalOutcome out = eval(spec.code, pair(n, x), budget);
      if (out.converged()) p = {true, graph_fact(spec.code, pair(n, x), out.value, out.steps_used)};
      break;
    }
    case DeltaSpec::Form::Unary: {
      const EvalOutcome out = eval(spec.code, x, budget);
      if (out.converged()) p = {true, graph_fact(spec.code, x, out.value, out.steps_used)};
      break;
    }
    case DeltaSpec::Form::Graph: {
      const auto it = spec.graph.find(n);
      if (it == spec.graph.end() || it->second != x) break;
      const Program d = delta_program();
      Machine m(d, pair(n, x));
      for (Steps b = std::max<Steps>(budget, 1024); !m.advance(b); b *= 2) {
      }
      p = {true, graph_fact(d->code, pair(n, x), m.outcome().value, m.steps_used())};
      break;
    }
  }
  return p;
}

bool may_be_defined(const DeltaSpec& spec, const Nat& n) { return spec.form != DeltaSpec::Form::Graph || spec.graph.contains(n); }

}  // namespace

std::vector<AdnVerdict> adn_verify(const Nat& f, const PsiSpec& psi_spec, const DeltaSpec& delta_spec,
                                   const AdnVerifyOptions& options) {
  std::vector<Nat> points = options.points;
  if (points.empty()) {
    for (Steps n = 0; n <= options.n_bound; ++n) points.push_back(n);
  }
  const std::vector<GridPoint> grid =
      options.domain_grid.empty() ? make_grid(16, options.budget) : options.domain_grid;
  const Program f_prog = decode(f);

  // psi(n) up front: the layout decides divergence without running.
  struct Point {
    Nat n;
    bool psi_converged = false;
    Nat psi_value;
  };
  std::vector<Point> divergent, defined;
  for (const Nat& n : points) {
    Point p;
    p.n = n;
    if (!psi_spec.code && psi_divergent_region(n)) {
      divergent.push_back(std::move(p));
      continue;
    }
    const EvalOutcome out = psi_spec.code ? eval(*psi_spec.code, n, options.budget) : psi(n, options.budget);
    p.psi_converged = out.converged();
    p.psi_value = out.value;
    (p.psi_converged ? defined : divergent).push_back(std::move(p));
  }

  std::vector<AdnVerdict> verdicts;
  std::map<Nat, std::optional<Nat>> f_values;
  auto f_at = [&](const Nat& n) -> const std::optional<Nat>& {
    auto it = f_values.find(n);
    if (it != f_values.end()) return it->second;
    const EvalOutcome out = eval(f_prog, n, options.budget);
    auto& slot = f_values[n];
    if (out.converged()) {
      slot = out.value;
    } else {
      AdnVerdict v{f, to_steps(n), AdnViolation::FDiverged, std::nullopt};
      verdicts.push_back(std::move(v));
    }
    return slot;
  };

  for (const Point& p : divergent) {
    if (!may_be_defined(delta_spec, p.n)) continue;
    const auto& fn = f_at(p.n);
    if (!fn) continue;
    const DeltaProbe d = probe_delta(delta_spec, p.n, *fn, options.budget);
    if (!d.converged) continue;
    Certificate cert;
    cert.kind = CertificateKind::Permanent;
    cert.subject = "psi(n) diverges and delta(n, f(n)) converges";
    cert.witness = {f, p.n, *fn};
    cert.stage_or_budget = options.budget;
    cert.evidence = {graph_fact(f, p.n, *fn, options.budget), d.fact};
    verdicts.push_back({f, to_steps(p.n), AdnViolation::Condition3, std::move(cert)});
    break;
  }

  if (summarize(verdicts) == AdnViolation::Condition3) {
    std::sort(verdicts.begin(), verdicts.end(), [](const AdnVerdict& a, const AdnVerdict& b) { return a.n < b.n; });
    return verdicts;
  }
  for (const Point& p : defined) {
    const auto& fn = f_at(p.n);
    if (!fn) continue;
    const Program lhs = decode(*fn);
    const Program rhs = decode(p.psi_value);
    for (const GridPoint& g : grid) {
      const bool in_f = g.input <= g.budget && eval(lhs, g.input, g.budget).converged();
      const bool in_psi = g.input <= g.budget && eval(rhs, g.input, g.budget).converged();
      if (in_f == in_psi) continue;
      Certificate cert;
      cert.kind = CertificateKind::Provisional;
      cert.subject = "W_f(n) != W_psi(n) on the grid";
      cert.witness = {f, p.n, *fn, p.psi_value, g.input};
      cert.stage_or_budget = g.budget;
      cert.evidence = {graph_fact(f, p.n, *fn, options.budget),
                       {g.input, {SetKind::Domain, *fn}, g.budget, in_f},
                       {g.input, {SetKind::Domain, p.psi_value}, g.budget, in_psi}};
      verdicts.push_back({f, to_steps(p.n), AdnViolation::Condition2, std::move(cert)});
      break;
    }
  }
  std::sort(verdicts.begin(), verdicts.end(), [](const AdnVerdict& a, const AdnVerdict& b) { return a.n < b.n; });
  return verdicts;
}

AdnViolation summarize(const std::vector<AdnVerdict>& verdicts) {
  AdnViolation worst = AdnViolation::NoneYet;
  for (const AdnVerdict& v : verdicts) {
    if (v.violated == AdnViolation::Condition3) return v.violated;
    if (v.violated == AdnViolation::Condition2) worst = v.violated;
  }
  return worst;
}

}  // namespace fixlab
