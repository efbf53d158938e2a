#pragma once

#include "halfcell/boundary_ergodic.hpp"
#include "halfcell/interior_ergodic.hpp"

namespace halfcell {

struct NonzeroCellConstant : std::runtime_error {
  double lambda_bar;
  NonzeroCellConstant(const std::string& msg, double lb)
      : std::runtime_error(msg), lambda_bar(lb) {}
};

struct AffinityViolation : std::runtime_error {
  double deviation;
  AffinityViolation(const std::string& msg, double dev)
      : std::runtime_error(msg), deviation(dev) {}
};

// Effective interior coefficients and effective boundary data at a frozen
// slow point. Convention: F_bar(M, p) = -tr(A_bar M) - b_bar.p - f_bar and
// mu_bar(p) = gamma_bar.p - g_bar (the effective Neumann condition is
// mu_bar(Du) = 0). gamma_bar points into the domain (positive last component
// for a unique original gamma with gamma.n > 0); solve_effective reorients.
struct EffectiveData {
  int dim = 1;
  Eigen::MatrixXd A_bar;
  VectorXd b_bar;
  double f_bar = 0.0;
  VectorXd gamma_bar;
  double g_bar = 0.0;
  double interior_affinity_deviation = 0.0;  // relative, off-basis samples
  double boundary_affinity_deviation = 0.0;
  VectorXd frozen_x;
};

struct CorrectorOptions {
  ErgodicOptions ergodic;
  double cell_tol = 1e-5;      // |lambda_bar(p)| below this counts as solvable
  double param_step = 1e-4;    // finite-difference step in (x, p)
  unsigned audit_seed = 7701;
  double affinity_throw_tol = 5e-2;  // relative deviation that raises
  // Whether the drift carries the 1/eps scaling (oscillating cell drift with
  // first corrector) or is O(1) (drift enters the cell source only).
  bool singular_drift = true;
};

// (H2) first corrector v(p, x, y): requires lambda_bar(p) ~ 0.
ErgodicSolution first_corrector(const LinearCoeffs& coeffs, const VectorXd& p,
                                const TorusGrid& grid, const CorrectorOptions& opt = {},
                                const VectorXd& frozen_x = VectorXd());

struct SecondCorrector {
  double F_bar = 0.0;
  GridFn w;
};

// (H3) second corrector and the effective constant F_bar(M, p, x): the cell
// source is f + tr(A (M + 2 S)) + b.(D_x v + M D_p v) with
// S = D^2_{xy} v + D^2_{yp} v M, parameter derivatives of the first corrector
// taken by centered finite differences over perturbed cell solves.
SecondCorrector second_corrector_and_Fbar(const LinearCoeffs& coeffs,
                                          const Eigen::MatrixXd& M, const VectorXd& p,
                                          const TorusGrid& grid,
                                          const CorrectorOptions& opt = {},
                                          const VectorXd& frozen_x = VectorXd());

// Samples F_bar on the (M, p) basis, solves the affine model and audits it on
// 3 random off-basis samples. Fills the interior half of EffectiveData.
EffectiveData effective_interior(const LinearCoeffs& coeffs, const TorusGrid& grid,
                                 const CorrectorOptions& opt = {},
                                 const VectorXd& frozen_x = VectorXd());

// Effective boundary data from the boundary cell problem: for the original
// condition (p + Dz).gamma = g on the oscillating boundary, mu_bar(p) is the
// unique constant with (p + Dz).gamma = g - mu_bar solvable; reported as
// mu_bar(p) = gamma_bar.p - g_bar (affine in p, audited at 2 extra samples).
EffectiveData effective_boundary(const OperatorSpec& op, const BoundaryOperatorSpec& bop,
                                 const DomainSpec& dom, const TorusGrid& torus,
                                 const MuSchedules& sched = {},
                                 const CorrectorOptions& opt = {},
                                 EffectiveData base = {});

// Single evaluation of mu_bar(p) (Eq. 4.2-style sign): solvability constant of
// the boundary cell problem at gradient offset p.
double mu_bar_at(const OperatorSpec& op, const BoundaryOperatorSpec& bop,
                 const DomainSpec& dom, const TorusGrid& torus, const VectorXd& p,
                 const MuSchedules& sched = {}, const ErgodicOptions& eopt = {});

}  // namespace halfcell
