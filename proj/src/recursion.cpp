#include "fixlab/recursion.hpp"

#include <algorithm>
#include <array>

namespace fixlab {

using namespace build;

std::vector<GridPoint> make_grid(Steps inputs, Steps budget) {
  std::vector<GridPoint> grid;
  for (Steps k = 0; k < inputs; ++k) grid.push_back({Nat(k), budget});
  return grid;
}

std::vector<GridPoint> standard_grid() { return make_grid(16, 10'000); }

std::string_view agreement_name(Agreement a) {
  switch (a) {
    case Agreement::ConvergedEqual: return "converged-equal";
    case Agreement::BothExhausted: return "both-exhausted";
    case Agreement::Disagree: return "disagree";
    case Agreement::TransformDiverged: return "transform-diverged";
  }
  return "?";
}

Agreement compare_outcomes(const EvalOutcome& a, const EvalOutcome& b) {
  if (a.converged() && b.converged()) return a.value == b.value ? Agreement::ConvergedEqual : Agreement::Disagree;
  if (!a.converged() && !b.converged()) return Agreement::BothExhausted;
  return Agreement::Disagree;
}

Program diagonal_program() {
  // code of apply(apply(const u, const u), id); id has code 0
  return quote_binary(Op::Apply, quote_binary(Op::Apply, quote_const(id()), quote_const(id())), konst(0));
}

Nat diagonal(const Nat& u) {
  const std::array<Nat, 2> self{const_code(u), const_code(u)};
  const std::array<Nat, 2> outer{node_code(Op::Apply, self), Nat(0)};
  return node_code(Op::Apply, outer);
}

Nat fixpoint(const Nat& transform) {
  const std::array<Nat, 2> kids{transform, diagonal_program()->code};
  return diagonal(node_code(Op::Comp, kids));
}

namespace {

// <n, u> -> h(<n, D(u)>)
Nat param_body(const Nat& h) {
  const std::array<Nat, 2> kids{h, pair_of(left(), comp(diagonal_program(), right()))->code};
  return node_code(Op::Comp, kids);
}

}  // namespace

Nat fixpoint_param(const Nat& h) {
  return comp(diagonal_program(), quote_smn(konst(param_body(h)), id()))->code;
}

Nat param_fixed_point(const Nat& h, const Nat& n) { return diagonal(smn(param_body(h), n)); }

FixedPointReport verify_fixed_point(const Nat& e, const Nat& transform, std::span<const GridPoint> grid,
                                    Steps transform_budget) {
  FixedPointReport report;
  report.fixed_code = e;
  report.transform_code = transform;
  const EvalOutcome image = eval(transform, e, transform_budget);
  report.transform_converged = image.converged();
  if (image.converged()) report.image_code = image.value;

  const Program fixed = decode(e);
  const Program mapped = image.converged() ? decode(image.value) : nullptr;
  report.verified = image.converged();
  for (const GridPoint& point : grid) {
    PointReport p;
    p.point = point;
    if (!mapped) {
      p.agreement = Agreement::TransformDiverged;
    } else {
      p.fixed_side = eval(fixed, point.input, point.budget);
      p.image_side = eval(mapped, point.input, point.budget);
      p.agreement = compare_outcomes(p.fixed_side, p.image_side);
      if (p.agreement == Agreement::Disagree) report.verified = false;
    }
    report.points.push_back(std::move(p));
  }
  return report;
}

FixedPointReport verify_fixed_point(const Nat& e, const Nat& transform, std::span<const GridPoint> grid) {
  Steps budget = 0;
  for (const GridPoint& p : grid) budget = std::max(budget, p.budget);
  return verify_fixed_point(e, transform, grid, budget);
}

ParamFixedPointReport check_fixpoint_param(const Nat& h, std::span<const Nat> n_range,
                                           std::span<const GridPoint> grid, Steps f_budget) {
  ParamFixedPointReport report;
  report.h_code = h;
  report.f_code = fixpoint_param(h);
  report.n_range.assign(n_range.begin(), n_range.end());
  report.f_total_on_range = true;
  report.verified = true;
  const Program f = decode(report.f_code);
  for (const Nat& n : n_range) {
    const EvalOutcome fn = eval(f, n, f_budget);
    if (!fn.converged()) {
      report.f_total_on_range = false;
      report.verified = false;
      report.per_n.push_back(FixedPointReport{});
      continue;
    }
    // e -> h(<n, e>) is coded by smn(h, n).
    FixedPointReport point = verify_fixed_point(fn.value, smn(h, n), grid);
    report.verified = report.verified && point.verified;
    report.per_n.push_back(std::move(point));
  }
  return report;
}

}  // namespace fixlab
