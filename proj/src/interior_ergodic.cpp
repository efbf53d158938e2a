#include "halfcell/interior_ergodic.hpp"

#include <algorithm>
#include <cmath>

namespace halfcell {

namespace {

double richardson(double d1, double l1, double d2, double l2) {
  return (d1 * l2 - d2 * l1) / (d1 - d2);
}

}  // namespace

ErgodicSolution lambda_torus(const OperatorSpec& op, const TorusGrid& grid,
                             const ErgodicOptions& opt, const VectorXd& p_offset,
                             const VectorXd& frozen_x) {
  if (opt.deltas.empty()) throw std::invalid_argument("lambda_torus: empty delta schedule");
  for (std::size_t i = 1; i < opt.deltas.size(); ++i)
    if (opt.deltas[i] >= opt.deltas[i - 1])
      throw std::invalid_argument("lambda_torus: delta schedule must decrease");

  ErgodicSolution out;
  GridFn last_u;
  std::vector<double> extrapolated;
  for (std::size_t i = 0; i < opt.deltas.size(); ++i) {
    TorusAssembly asm_opt;
    asm_opt.p_offset = p_offset;
    asm_opt.frozen_x = frozen_x;
    asm_opt.rhs_extra = opt.rhs_extra;
    asm_opt.c0 = opt.deltas[i];
    DiscreteScheme scheme = assemble_interior(op, grid, asm_opt);
    SolveResult sol = solve_stationary(scheme, opt.solve);
    last_u = sol.u;
    const double est = -opt.deltas[i] * sol.u[0];
    out.history.emplace_back(opt.deltas[i], est);
    if (i > 0)
      extrapolated.push_back(richardson(opt.deltas[i - 1], out.history[i - 1].second,
                                        opt.deltas[i], est));
  }

  out.constant = extrapolated.empty() ? out.history.back().second : extrapolated.back();
  if (extrapolated.size() >= 2) {
    const double jump = std::abs(extrapolated.back() - extrapolated[extrapolated.size() - 2]);
    if (jump > 10.0 * opt.stability_tol)
      throw ExtrapolationUnstable("lambda_torus: extrapolated estimates differ by " +
                                  std::to_string(jump));
  }

  out.corrector.resize(last_u.size());
  const double anchor = last_u[0];
  for (std::size_t i = 0; i < last_u.size(); ++i) out.corrector[i] = last_u[i] - anchor;

  // Residual of the ergodic equation itself: assemble with zero discount and
  // measure sup |F_h(corrector) - lambda|.
  TorusAssembly res_opt;
  res_opt.p_offset = p_offset;
  res_opt.frozen_x = frozen_x;
  res_opt.rhs_extra = opt.rhs_extra;
  res_opt.c0 = 0.0;
  DiscreteScheme scheme0 = assemble_interior(op, grid, res_opt);
  double res = 0.0;
  for (int i = 0; i < scheme0.num_nodes; ++i)
    res = std::max(res, std::abs(scheme0.node_residual(out.corrector, i) - out.constant));
  out.residual_sup = res;
  return out;
}

ErgodicSolution drift_cell_lambda(const LinearCoeffs& coeffs, const VectorXd& p,
                                  const TorusGrid& grid, const ErgodicOptions& opt) {
  OperatorSpec op = OperatorSpec::linear(coeffs);
  return lambda_torus(op, grid, opt, p);
}

LinearityReport linearity_audit(const LinearCoeffs& coeffs, const TorusGrid& grid,
                                const std::vector<VectorXd>& p_samples,
                                const ErgodicOptions& opt) {
  if (p_samples.empty()) throw std::invalid_argument("linearity_audit: no samples");
  const int dim = coeffs.dim;
  LinearityReport report;
  Eigen::MatrixXd P(static_cast<int>(p_samples.size()), dim);
  Eigen::VectorXd L(static_cast<int>(p_samples.size()));
  for (std::size_t k = 0; k < p_samples.size(); ++k) {
    ErgodicSolution sol = drift_cell_lambda(coeffs, p_samples[k], grid, opt);
    report.samples.emplace_back(p_samples[k], sol.constant);
    P.row(static_cast<int>(k)) = p_samples[k].transpose();
    L(static_cast<int>(k)) = sol.constant;
  }
  report.fitted_map = P.colPivHouseholderQr().solve(L);
  report.max_deviation = 0.0;
  for (std::size_t k = 0; k < p_samples.size(); ++k)
    report.max_deviation = std::max(
        report.max_deviation,
        std::abs(report.samples[k].second - report.fitted_map.dot(p_samples[k])));
  return report;
}

E1Result e1_criterion(const OperatorSpec& op, const TorusGrid& grid,
                      const ErgodicOptions& opt, double tol) {
  // Drop the zeroth-order data and probe the drift against the inward normal:
  // solve the cell problem of sup_c { -tr(A_c D^2 w) - b_c.(q + Dw) } with
  // q = -e_N. The source terms f_c are removed; the hterm (gradient
  // nonlinearity) is kept since it is part of the principal operator.
  OperatorSpec probe = op;
  for (LinearCoeffs& c : probe.controls)
    c.f = Expr::constant(0.0);
  VectorXd q = VectorXd::Zero(op.dim);
  q(op.dim - 1) = -1.0;
  ErgodicSolution sol = lambda_torus(probe, grid, opt, q);
  return E1Result{sol.constant <= tol, sol.constant};
}

}  // namespace halfcell
