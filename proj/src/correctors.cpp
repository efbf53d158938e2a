#include "halfcell/correctors.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace halfcell {

namespace {

LinearCoeffs drift_only(const LinearCoeffs& coeffs) {
  LinearCoeffs c = coeffs;
  c.f = Expr::constant(0.0);
  return c;
}

bool depends_on_x(const LinearCoeffs& coeffs) {
  auto has_x = [](const Expr& e) {
    if (!e.valid()) return false;
    for (const std::string& v : e.variables())
      if (!v.empty() && v[0] == 'x') return true;
    return false;
  };
  for (const Expr& e : coeffs.A)
    if (has_x(e)) return true;
  for (const Expr& e : coeffs.b)
    if (has_x(e)) return true;
  return has_x(coeffs.f);
}

GridFn corrector_at(const LinearCoeffs& coeffs, const VectorXd& p, const TorusGrid& grid,
                    const CorrectorOptions& opt, const VectorXd& x) {
  return first_corrector(coeffs, p, grid, opt, x).corrector;
}

}  // namespace

ErgodicSolution first_corrector(const LinearCoeffs& coeffs, const VectorXd& p,
                                const TorusGrid& grid, const CorrectorOptions& opt,
                                const VectorXd& frozen_x) {
  OperatorSpec op = OperatorSpec::linear(drift_only(coeffs));
  ErgodicSolution sol = lambda_torus(op, grid, opt.ergodic, p, frozen_x);
  if (std::abs(sol.constant) > opt.cell_tol)
    throw NonzeroCellConstant(
        "first corrector cell problem has nonzero constant " +
            std::to_string(sol.constant) + "; homogenization ansatz not applicable",
        sol.constant);
  return sol;
}

SecondCorrector second_corrector_and_Fbar(const LinearCoeffs& coeffs,
                                          const Eigen::MatrixXd& M, const VectorXd& p,
                                          const TorusGrid& grid,
                                          const CorrectorOptions& opt,
                                          const VectorXd& frozen_x) {
  const int dim = coeffs.dim;
  const int n = grid.num_nodes();
  const double step = opt.param_step;
  VectorXd x = frozen_x.size() ? frozen_x : VectorXd::Zero(dim);

  if (!opt.singular_drift) {
    // O(1) drift: no first corrector; the cell operator is pure diffusion and
    // the drift contributes b.p to the compatibility source.
    std::vector<double> source(n);
    for (int idx = 0; idx < n; ++idx) {
      Bindings bind = point_bindings(x, grid.point(idx));
      double src = 0.0;
      for (int i = 0; i < dim; ++i) {
        src += coeffs.b[i].eval(bind) * p[i];
        for (int j = 0; j < dim; ++j)
          src += coeffs.A[i * dim + j].eval(bind) * M(i, j);
      }
      source[idx] = src;
    }
    LinearCoeffs diff = coeffs;
    for (Expr& e : diff.b) e = Expr::constant(0.0);
    OperatorSpec op = OperatorSpec::linear(diff);
    ErgodicOptions eopt = opt.ergodic;
    eopt.rhs_extra = source;
    ErgodicSolution sol = lambda_torus(op, grid, eopt, VectorXd(), x);
    return SecondCorrector{sol.constant, sol.corrector};
  }

  // D_p v by centered differences over perturbed cell solves.
  std::vector<GridFn> Dpv(dim);
  for (int k = 0; k < dim; ++k) {
    VectorXd pp = p, pm = p;
    pp[k] += step;
    pm[k] -= step;
    GridFn vp = corrector_at(coeffs, pp, grid, opt, x);
    GridFn vm = corrector_at(coeffs, pm, grid, opt, x);
    Dpv[k].resize(n);
    for (int i = 0; i < n; ++i) Dpv[k][i] = (vp[i] - vm[i]) / (2 * step);
  }
  // D_x v only when coefficients carry slow dependence.
  std::vector<GridFn> Dxv(dim, GridFn(n, 0.0));
  if (depends_on_x(coeffs)) {
    for (int j = 0; j < dim; ++j) {
      VectorXd xp = x, xm = x;
      xp[j] += step;
      xm[j] -= step;
      GridFn vp = corrector_at(coeffs, p, grid, opt, xp);
      GridFn vm = corrector_at(coeffs, p, grid, opt, xm);
      for (int i = 0; i < n; ++i) Dxv[j][i] = (vp[i] - vm[i]) / (2 * step);
    }
  }

  // G_j = D_{x_j} v + sum_k M_{kj} D_{p_k} v; S_{ij} = d G_j / d y_i.
  std::vector<GridFn> G(dim);
  for (int j = 0; j < dim; ++j) {
    G[j].resize(n);
    for (int i = 0; i < n; ++i) {
      double v = Dxv[j][i];
      for (int k = 0; k < dim; ++k) v += M(k, j) * Dpv[k][i];
      G[j][i] = v;
    }
  }

  std::vector<double> source(n, 0.0);
  for (int idx = 0; idx < n; ++idx) {
    VectorXd y = grid.point(idx);
    Bindings bind = point_bindings(x, y);
    Eigen::MatrixXd A(dim, dim);
    VectorXd b(dim);
    for (int i = 0; i < dim; ++i) {
      b[i] = coeffs.b[i].eval(bind);
      for (int j = 0; j < dim; ++j) A(i, j) = coeffs.A[i * dim + j].eval(bind);
    }
    Eigen::MatrixXd S(dim, dim);
    for (int j = 0; j < dim; ++j) {
      VectorXd gj = torus_gradient(grid, G[j], idx);
      for (int i = 0; i < dim; ++i) S(i, j) = gj[i];
    }
    double src = (A.cwiseProduct(M + S + S.transpose())).sum();
    for (int i = 0; i < dim; ++i) src += b[i] * G[i][idx];
    source[idx] = src;
  }

  OperatorSpec op = OperatorSpec::linear(coeffs);
  ErgodicOptions eopt = opt.ergodic;
  eopt.rhs_extra = source;
  ErgodicSolution sol = lambda_torus(op, grid, eopt, VectorXd(), x);
  return SecondCorrector{sol.constant, sol.corrector};
}

EffectiveData effective_interior(const LinearCoeffs& coeffs, const TorusGrid& grid,
                                 const CorrectorOptions& opt, const VectorXd& frozen_x) {
  const int dim = coeffs.dim;
  EffectiveData eff;
  eff.dim = dim;
  eff.frozen_x = frozen_x.size() ? frozen_x : VectorXd::Zero(dim);
  VectorXd z = VectorXd::Zero(dim);
  Eigen::MatrixXd Z = Eigen::MatrixXd::Zero(dim, dim);

  auto fbar = [&](const Eigen::MatrixXd& M, const VectorXd& p) {
    return second_corrector_and_Fbar(coeffs, M, p, grid, opt, frozen_x).F_bar;
  };

  const double F0 = fbar(Z, z);
  eff.f_bar = -F0;
  eff.A_bar = Eigen::MatrixXd::Zero(dim, dim);
  eff.b_bar = VectorXd::Zero(dim);
  for (int i = 0; i < dim; ++i) {
    Eigen::MatrixXd M = Z;
    M(i, i) = 1.0;
    eff.A_bar(i, i) = F0 - fbar(M, z);
    VectorXd p = z;
    p[i] = 1.0;
    eff.b_bar[i] = F0 - fbar(Z, p);
  }
  for (int i = 0; i < dim; ++i)
    for (int j = i + 1; j < dim; ++j) {
      Eigen::MatrixXd M = Z;
      M(i, j) = M(j, i) = 1.0;
      eff.A_bar(i, j) = eff.A_bar(j, i) = (F0 - fbar(M, z)) / 2.0;
    }

  // Affinity audit on random off-basis samples.
  std::mt19937 rng(opt.audit_seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  double dev = 0.0;
  for (int s = 0; s < 3; ++s) {
    Eigen::MatrixXd M(dim, dim);
    for (int i = 0; i < dim; ++i)
      for (int j = i; j < dim; ++j) M(i, j) = M(j, i) = unif(rng);
    VectorXd p(dim);
    for (int i = 0; i < dim; ++i) p[i] = unif(rng);
    const double predicted =
        -(eff.A_bar.cwiseProduct(M)).sum() - eff.b_bar.dot(p) - eff.f_bar;
    const double actual = fbar(M, p);
    dev = std::max(dev, std::abs(actual - predicted) /
                            std::max(1.0, std::abs(actual)));
  }
  eff.interior_affinity_deviation = dev;
  if (dev > opt.affinity_throw_tol)
    throw AffinityViolation("effective interior operator is not affine to tolerance", dev);
  return eff;
}

double mu_bar_at(const OperatorSpec& op, const BoundaryOperatorSpec& bop,
                 const DomainSpec& dom, const TorusGrid& torus, const VectorXd& p,
                 const MuSchedules& sched, const ErgodicOptions& eopt) {
  // Eq. 4.2 boundary cell problem: the interior operator is drift-only (the
  // source belongs to the second corrector, not to z).
  OperatorSpec cell_op = op;
  for (LinearCoeffs& c : cell_op.controls) c.f = Expr::constant(0.0);
  ErgodicSolution cell = lambda_torus(cell_op, torus, eopt, p);
  FieldFn ubar = [torus, corr = cell.corrector](const VectorXd& y) {
    return torus_interpolate(torus, corr, y);
  };
  MuResult mu = mu_limit(cell_op, bop, dom, cell.constant, ubar, p, sched);
  if (mu.flag == UniquenessFlag::SuspectNonunique)
    throw ExtrapolationUnstable("boundary cell problem flagged suspect-nonunique");
  return -mu.mu;
}

EffectiveData effective_boundary(const OperatorSpec& op, const BoundaryOperatorSpec& bop,
                                 const DomainSpec& dom, const TorusGrid& torus,
                                 const MuSchedules& sched, const CorrectorOptions& opt,
                                 EffectiveData base) {
  const int dim = op.dim;
  base.dim = dim;
  VectorXd z = VectorXd::Zero(dim);
  const double mu0 = mu_bar_at(op, bop, dom, torus, z, sched, opt.ergodic);
  base.g_bar = -mu0;
  base.gamma_bar = VectorXd::Zero(dim);
  for (int k = 0; k < dim; ++k) {
    VectorXd p = z;
    p[k] = 1.0;
    base.gamma_bar[k] = mu_bar_at(op, bop, dom, torus, p, sched, opt.ergodic) - mu0;
  }

  std::mt19937 rng(opt.audit_seed + 1);
  std::uniform_real_distribution<double> unif(-0.5, 0.5);
  double dev = 0.0;
  for (int s = 0; s < 2; ++s) {
    VectorXd p(dim);
    for (int i = 0; i < dim; ++i) p[i] = unif(rng);
    const double predicted = base.gamma_bar.dot(p) - base.g_bar;
    const double actual = mu_bar_at(op, bop, dom, torus, p, sched, opt.ergodic);
    dev = std::max(dev, std::abs(actual - predicted) / std::max(1.0, std::abs(actual)));
  }
  base.boundary_affinity_deviation = dev;
  if (dev > opt.affinity_throw_tol)
    throw AffinityViolation("effective boundary data is not affine to tolerance", dev);
  return base;
}

}  // namespace halfcell
