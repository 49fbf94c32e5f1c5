#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "fixlab/machine.hpp"

namespace fixlab {

struct GridPoint {
  Nat input;
  Steps budget = 0;
};

/// Inputs 0..15 at budget 10^4.
std::vector<GridPoint> standard_grid();
std::vector<GridPoint> make_grid(Steps inputs, Steps budget);

enum class Agreement {
  ConvergedEqual,
  BothExhausted,
  Disagree,
  TransformDiverged,
};

std::string_view agreement_name(Agreement a);

/// Extensional comparison at one grid point; symmetric in its arguments.
Agreement compare_outcomes(const EvalOutcome& a, const EvalOutcome& b);

struct PointReport {
  GridPoint point;
  Agreement agreement = Agreement::Disagree;
  EvalOutcome fixed_side;
  EvalOutcome image_side;
};

struct FixedPointReport {
  Nat fixed_code;
  Nat transform_code;
  bool transform_converged = false;
  Nat image_code;  // t(e), when transform_converged
  std::vector<PointReport> points;
  bool verified = false;
};

struct ParamFixedPointReport {
  Nat f_code;
  Nat h_code;
  std::vector<Nat> n_range;
  std::vector<FixedPointReport> per_n;
  bool f_total_on_range = false;
  bool verified = false;
};

/// Program computing u -> code of (y -> phi_{phi_u(u)}(y)).
Program diagonal_program();
/// Host-side value of diagonal_program() on u.
Nat diagonal(const Nat& u);

/// e* = D(v) with v a code of t . D. Then phi_{e*} = phi_{t(e*)} whenever t
/// converges at e*; otherwise e* diverges everywhere. t is never run.
Nat fixpoint(const Nat& transform);

/// Code of a total f with phi_{f(n)} = phi_{h(<n, f(n)>)} wherever h
/// converges. Built from h's code alone; h is never run.
Nat fixpoint_param(const Nat& h);
/// Host-side value of the function coded by fixpoint_param(h) at n.
Nat param_fixed_point(const Nat& h, const Nat& n);

/// Evaluates t(e) (within transform_budget), then phi_e and phi_{t(e)} on
/// each grid point. Never claims more than agreement on the grid.
FixedPointReport verify_fixed_point(const Nat& e, const Nat& transform, std::span<const GridPoint> grid,
                                    Steps transform_budget);
FixedPointReport verify_fixed_point(const Nat& e, const Nat& transform, std::span<const GridPoint> grid);

/// Builds fixpoint_param(h) and, for each n, checks f(n) against
/// h(<n, f(n)>) on the grid. f(n) is computed by running the returned code.
ParamFixedPointReport check_fixpoint_param(const Nat& h, std::span<const Nat> n_range,
                                           std::span<const GridPoint> grid, Steps f_budget);

}  // namespace fixlab
