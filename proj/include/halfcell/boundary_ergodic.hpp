#pragma once

#include "halfcell/interior_ergodic.hpp"

namespace halfcell {

enum class UniquenessFlag { UniqueConsistent, SuspectNonunique };

inline const char* to_string(UniquenessFlag f) {
  return f == UniquenessFlag::UniqueConsistent ? "unique-consistent" : "suspect-nonunique";
}

struct MuSchedules {
  std::vector<double> eps{1e-6, 1e-7};      // interior penalization, decreasing
  std::vector<double> alphas{1e-1, 3e-2, 1e-2};  // boundary penalization, decreasing
  std::vector<double> heights{5.0, 10.0};   // strip truncation heights R
  int nodes_per_unit = 64;                  // vertical resolution
  int n_t = 64;                             // tangential nodes (ignored in 1d)
  double suspect_tol = 1e-2;                // on alpha*||corrector||_inf
  double stability_tol = 1e-3;
  SolveOptions solve;
};

struct PenalizedSample {
  double height, alpha, eps, value;  // value = -alpha * u(anchor)
};

struct MuResult {
  double mu = 0.0;
  GridFn corrector;                 // finest solve, normalized at the anchor
  UniquenessFlag flag = UniquenessFlag::UniqueConsistent;
  double r_drift = 0.0;             // |mu(R_last) - mu(R_first)|
  double alpha_corrector_mass = 0.0;  // alpha_min * sup|corrector| at finest solve
  std::vector<PenalizedSample> history;
  std::vector<double> mu_per_height;
  double interior_residual = 0.0;   // sup |F_h(corrector) - lambda|
  double boundary_residual = 0.0;   // sup |L_h(corrector) - mu| on the bottom
};

// Slow-variable field: y -> value of the interior corrector ubar (or any
// bounded periodic function entering the interior right-hand side).
using FieldFn = std::function<double(const VectorXd&)>;

// One penalized solve of the truncated problem
//   F(D^2 u, p0 + Du, y) + eps*u = lambda + eps*ubar(y)   in the strip,
//   L(p0 + Du, y) + alpha*u = 0                           on the bottom,
//   Du . n = 0                                            on the lid.
GridFn solve_penalized(const OperatorSpec& op, const BoundaryOperatorSpec& bop,
                       const StripGrid& grid, double lambda, const FieldFn& ubar,
                       double eps, double alpha, const VectorXd& p0 = VectorXd(),
                       const SolveOptions& solve = {});

// Boundary ergodic constant: mu = lim_{alpha->0} lim_{eps->0} -alpha*u(anchor),
// extrapolated linearly in eps (last two values of the schedule) and then in
// alpha (last two values), repeated for each truncation height.
MuResult mu_limit(const OperatorSpec& op, const BoundaryOperatorSpec& bop,
                  const DomainSpec& dom, double lambda, const FieldFn& ubar = {},
                  const VectorXd& p0 = VectorXd(), const MuSchedules& sched = {});

struct MuVerification {
  double interior_residual;
  double boundary_residual;
  double r_drift;
};

// Residuals of (lambda, mu, corrector) in the discrete ergodic system.
MuVerification verify_mu(const OperatorSpec& op, const BoundaryOperatorSpec& bop,
                         const StripGrid& grid, double lambda, double mu,
                         const GridFn& corrector, const VectorXd& p0 = VectorXd());

}  // namespace halfcell
