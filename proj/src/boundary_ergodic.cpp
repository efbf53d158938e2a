#include "halfcell/boundary_ergodic.hpp"

#include <algorithm>
#include <cmath>

namespace halfcell {

namespace {

// Linear extrapolation of v(s) to s = 0 from the last two schedule points.
double extrap0(double s1, double v1, double s2, double v2) {
  return (s1 * v2 - s2 * v1) / (s1 - s2);
}

StripGrid grid_for(const OperatorSpec& op, const DomainSpec& dom, double height,
                   const MuSchedules& sched) {
  const double rho = strip_aspect(op, dom);
  const int n_z =
      static_cast<int>(std::lround(height * sched.nodes_per_unit / rho)) + 1;
  const int n_t = dom.dim == 1 ? 1 : sched.n_t;
  return StripGrid::make(dom, n_t, n_z, height);
}

}  // namespace

GridFn solve_penalized(const OperatorSpec& op, const BoundaryOperatorSpec& bop,
                       const StripGrid& grid, double lambda, const FieldFn& ubar,
                       double eps, double alpha, const VectorXd& p0,
                       const SolveOptions& solve) {
  StripAssembly opt;
  opt.p_offset = p0;
  opt.c0_interior = eps;
  opt.c0_bottom = alpha;
  opt.interior_rhs_extra.assign(grid.num_nodes(), lambda);
  if (ubar) {
    if (eps != 0.0)
      for (int i = 0; i < grid.num_nodes(); ++i)
        opt.interior_rhs_extra[i] += eps * ubar(grid.point(i));
    opt.lid_field = ubar;
  }
  DiscreteScheme scheme = assemble_strip(op, bop, grid, opt);
  return solve_stationary(scheme, solve).u;
}

MuResult mu_limit(const OperatorSpec& op, const BoundaryOperatorSpec& bop,
                  const DomainSpec& dom, double lambda, const FieldFn& ubar,
                  const VectorXd& p0, const MuSchedules& sched) {
  if (sched.eps.empty() || sched.alphas.empty() || sched.heights.empty())
    throw std::invalid_argument("mu_limit: empty schedule");

  MuResult out;
  GridFn finest_u;
  StripGrid finest_grid;
  bool unstable = false;

  for (double R : sched.heights) {
    const StripGrid grid = grid_for(op, dom, R, sched);
    std::vector<std::pair<double, double>> per_alpha;  // (alpha, eps-limit value)
    for (double alpha : sched.alphas) {
      double v_prev = 0.0, e_prev = 0.0, v_lim = 0.0;
      GridFn u;
      for (std::size_t ie = 0; ie < sched.eps.size(); ++ie) {
        const double eps = sched.eps[ie];
        u = solve_penalized(op, bop, grid, lambda, ubar, eps, alpha, p0, sched.solve);
        const double v = -alpha * u[grid.anchor()];
        out.history.push_back({R, alpha, eps, v});
        v_lim = ie == 0 ? v : extrap0(e_prev, v_prev, eps, v);
        v_prev = v;
        e_prev = eps;
      }
      per_alpha.emplace_back(alpha, v_lim);
      if (R == sched.heights.back() && alpha == sched.alphas.back()) {
        finest_u = u;
        finest_grid = grid;
      }
    }
    double mu_R;
    if (per_alpha.size() == 1) {
      mu_R = per_alpha.back().second;
    } else {
      const auto& [a1, v1] = per_alpha[per_alpha.size() - 2];
      const auto& [a2, v2] = per_alpha.back();
      mu_R = extrap0(a1, v1, a2, v2);
      if (per_alpha.size() >= 3) {
        const auto& [a0, v0] = per_alpha[per_alpha.size() - 3];
        const double other = extrap0(a0, v0, a1, v1);
        if (std::abs(other - mu_R) > 10.0 * sched.stability_tol) unstable = true;
      }
    }
    out.mu_per_height.push_back(mu_R);
  }

  out.mu = out.mu_per_height.back();
  out.r_drift = std::abs(out.mu_per_height.back() - out.mu_per_height.front());

  const double anchor = finest_u[finest_grid.anchor()];
  out.corrector.resize(finest_u.size());
  double sup = 0.0;
  for (std::size_t i = 0; i < finest_u.size(); ++i) {
    out.corrector[i] = finest_u[i] - anchor;
    sup = std::max(sup, std::abs(out.corrector[i]));
  }
  out.alpha_corrector_mass = sched.alphas.back() * sup;

  // The construction converges to a genuine (mu, corrector) pair only when
  // the corrector family stays bounded; alpha*||u - u(0)|| staying O(1) is
  // exactly the failure mode of the non-unique case.
  const double scale = 1.0 + std::abs(out.mu);
  if (unstable || out.alpha_corrector_mass > sched.suspect_tol * scale ||
      out.r_drift > 10.0 * sched.stability_tol * scale)
    out.flag = UniquenessFlag::SuspectNonunique;

  MuVerification ver = verify_mu(op, bop, finest_grid, lambda, out.mu, out.corrector, p0);
  out.interior_residual = ver.interior_residual;
  out.boundary_residual = ver.boundary_residual;
  return out;
}

MuVerification verify_mu(const OperatorSpec& op, const BoundaryOperatorSpec& bop,
                         const StripGrid& grid, double lambda, double mu,
                         const GridFn& corrector, const VectorXd& p0) {
  StripAssembly opt;
  opt.p_offset = p0;
  DiscreteScheme scheme = assemble_strip(op, bop, grid, opt);
  double res_int = 0.0, res_bot = 0.0;
  for (int i = 0; i < scheme.num_nodes; ++i) {
    const double r = scheme.node_residual(corrector, i);
    switch (scheme.node_class[i]) {
      case NodeClass::Interior:
        res_int = std::max(res_int, std::abs(r - lambda));
        break;
      case NodeClass::Bottom:
        res_bot = std::max(res_bot, std::abs(r - mu));
        break;
      case NodeClass::Lid:
        break;  // artificial truncation row
    }
  }
  return MuVerification{res_int, res_bot, 0.0};
}

}  // namespace halfcell
