#pragma once

#include <functional>
#include <optional>

#include "halfcell/grid.hpp"
#include "halfcell/model.hpp"

namespace halfcell {

struct MonotonicityViolation : std::runtime_error {
  int node;
  explicit MonotonicityViolation(const std::string& msg, int node_ = -1)
      : std::runtime_error(msg), node(node_) {}
};

struct ObliquenessTooWeak : std::runtime_error {
  explicit ObliquenessTooWeak(const std::string& msg) : std::runtime_error(msg) {}
};

struct NonConvergence : std::runtime_error {
  double residual;
  GridFn best;
  NonConvergence(const std::string& msg, double res, GridFn u)
      : std::runtime_error(msg), residual(res), best(std::move(u)) {}
};

// One linear row: sum_j w_j u_j = rhs (diagonal included in entries).
// The discrete equation at a node is  max_c (row_c . u - rhs_c) + c0 * u = 0.
struct SchemeRow {
  std::vector<std::pair<int, double>> entries;
  double rhs = 0.0;
};

// Gradient-nonlinearity hook: the equation gains + scale*H(p0 + grad_scale*Du),
// resolved by lagged outer iteration in solve_stationary.
struct HTermHook {
  Expr h;
  double scale = 1.0;
  double grad_scale = 1.0;
  VectorXd p0;
};

struct DiscreteScheme {
  int num_nodes = 0;
  std::vector<std::vector<SchemeRow>> rows;  // per node, per control
  std::vector<double> c0;                    // zeroth-order coefficient per node
  std::optional<HTermHook> interior_hterm;
  std::optional<HTermHook> boundary_hterm;
  // Gradient evaluator for hterm hooks (physical coordinates).
  std::function<VectorXd(const GridFn&, int)> gradient;
  // Sparse stencil of component d of `gradient` at a node, as (node, weight)
  // pairs; lets the solver fold the hterm linearization into the matrix.
  std::function<std::vector<std::pair<int, double>>(int, int)> grad_stencil;
  std::vector<NodeClass> node_class;  // all Interior for torus schemes

  // Verifies positive diagonal / nonpositive off-diagonal weights on every row.
  void audit_monotone() const;

  double node_residual(const GridFn& u, int i) const;
  double residual_sup(const GridFn& u) const;
  // Separate interior and boundary sup residuals (boundary = Bottom rows).
  std::pair<double, double> residual_split(const GridFn& u) const;
};

// --- assembly ---------------------------------------------------------------

struct TorusAssembly {
  VectorXd p_offset;                 // drift acts on (p_offset + Du)
  double c0 = 0.0;                   // discount coefficient
  VectorXd frozen_x;                 // slow variable baked into coefficients
  std::optional<HTermHook> hterm;    // overrides op's hterm handling
  std::vector<double> rhs_extra;     // added to every control's rhs, per node
};

DiscreteScheme assemble_interior(const OperatorSpec& op, const TorusGrid& grid,
                                 const TorusAssembly& opt);

struct StripAssembly {
  VectorXd p_offset;                      // shared by interior drift and boundary rows
  double c0_interior = 0.0;               // eps u term
  double c0_bottom = 0.0;                 // alpha u term on boundary rows
  double boundary_rhs_scale = 1.0;        // multiplies g
  double interior_rhs_scale = 1.0;        // multiplies f (eps-problem scaling)
  std::vector<double> interior_rhs_extra; // e.g. lambda + eps*ubar, per node
  std::function<VectorXd(const VectorXd&)> slow_x;  // y -> x; default 0
  double hterm_scale = 1.0;
  double hterm_grad_scale = 1.0;
  // Far-field corrector v: the lid imposes D(u - v).n = 0 (discretely, the
  // lid difference of v becomes the row's rhs) so that truncation does not
  // pin the oscillating part of the solution.
  std::function<double(const VectorXd&)> lid_field;
};

// Interior + oblique-Neumann bottom rows + homogeneous-Neumann lid rows.
DiscreteScheme assemble_strip(const OperatorSpec& op, const BoundaryOperatorSpec& bop,
                              const StripGrid& grid, const StripAssembly& opt);

// Cell aspect ratio h_z/h_t keeping the rotation stencil of the
// terrain-following coefficients monotone (1.0 for flat domains); throws
// MonotonicityViolation when no uniform ratio works.
double strip_aspect(const OperatorSpec& op, const DomainSpec& dom);

// --- solve ------------------------------------------------------------------

struct SolveOptions {
  double tol_linear = 1e-10;
  double tol_nonlinear = 1e-8;
  int max_policy_iterations = 60;
  int max_lagged_iterations = 400;
  int max_pseudo_time_steps = 2000000;
  double cfl = 0.9;
  bool pseudo_time = false;  // monotone explicit marching instead of direct solve
};

struct SolveResult {
  GridFn u;
  double residual = 0.0;
  int iterations = 0;
  std::vector<int> policy;  // chosen control per node (multi-control case)
  std::vector<double> residual_history;
};

SolveResult solve_stationary(const DiscreteScheme& s, const SolveOptions& opt = {});

}  // namespace halfcell
