#pragma once

#include "halfcell/scheme.hpp"

namespace halfcell {

struct ExtrapolationUnstable : std::runtime_error {
  explicit ExtrapolationUnstable(const std::string& msg) : std::runtime_error(msg) {}
};

// Ergodic constant plus corrector (normalized to 0 at the anchor node),
// residual of the ergodic equation and the (parameter, estimate) history.
struct ErgodicSolution {
  double constant = 0.0;
  GridFn corrector;
  double residual_sup = 0.0;
  std::vector<std::pair<double, double>> history;
};

struct ErgodicOptions {
  std::vector<double> deltas{1e-2, 5e-3, 2.5e-3};
  double stability_tol = 1e-3;  // successive-extrapolation agreement
  std::vector<double> rhs_extra;  // nodal source added to every control
  SolveOptions solve;
};

// Small-discount approximation of F(D^2 u, Du, y) = lambda on the torus:
// solve F + delta*u = 0 for a decreasing delta schedule, estimate
// lambda = -delta*u(anchor) with Richardson extrapolation (first order in
// delta). p_offset shifts the drift argument: drift acts on (p_offset + Du).
ErgodicSolution lambda_torus(const OperatorSpec& op, const TorusGrid& grid,
                             const ErgodicOptions& opt = {},
                             const VectorXd& p_offset = VectorXd(),
                             const VectorXd& frozen_x = VectorXd());

// Cell constant of -tr(A D^2 v) - b.(p + Dv) = lambda_bar(p) on the torus.
ErgodicSolution drift_cell_lambda(const LinearCoeffs& coeffs, const VectorXd& p,
                                  const TorusGrid& grid, const ErgodicOptions& opt = {});

struct LinearityReport {
  VectorXd fitted_map;   // lambda_bar(p) ~ fitted_map . p
  double max_deviation;
  std::vector<std::pair<VectorXd, double>> samples;
};

// Fits a linear map to lambda_bar(p) samples and reports the worst deviation.
LinearityReport linearity_audit(const LinearCoeffs& coeffs, const TorusGrid& grid,
                                const std::vector<VectorXd>& p_samples,
                                const ErgodicOptions& opt = {});

struct E1Result {
  bool satisfied;
  double lambda_hat;
};

// Ergodic constant of the drift-only operator with gradient offset -f_N
// (f_N = last coordinate direction); satisfied iff lambda_hat <= tol, i.e. a
// bounded periodic subsolution at level zero exists.
E1Result e1_criterion(const OperatorSpec& op, const TorusGrid& grid,
                      const ErgodicOptions& opt = {}, double tol = 1e-6);

}  // namespace halfcell
