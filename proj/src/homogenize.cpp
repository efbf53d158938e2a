#include "halfcell/homogenize.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace halfcell {

namespace {

bool tangential_slow_dependence(const OperatorSpec& op, const BoundaryOperatorSpec& bop) {
  auto has_x = [](const Expr& e) {
    if (!e.valid()) return false;
    for (const std::string& v : e.variables())
      if (!v.empty() && v[0] == 'x') return true;
    return false;
  };
  for (const LinearCoeffs& c : op.controls) {
    for (const Expr& e : c.A)
      if (has_x(e)) return true;
    for (const Expr& e : c.b)
      if (has_x(e)) return true;
    if (has_x(c.f)) return true;
  }
  for (const Expr& e : bop.gamma)
    if (has_x(e)) return true;
  return has_x(bop.g);
}

}  // namespace

EpsilonSolution solve_epsilon_problem(const OperatorSpec& op,
                                      const BoundaryOperatorSpec& bop,
                                      const DomainSpec& dom, double eps,
                                      const EpsilonOptions& opt) {
  if (opt.nodes_per_fast_period < 16)
    throw ResolutionInsufficient("need at least 16 nodes per fast period, got " +
                                 std::to_string(opt.nodes_per_fast_period));
  if (tangential_slow_dependence(op, bop))
    throw std::invalid_argument(
        "eps-problem assembly wraps one fast period tangentially; slow-variable "
        "coefficient dependence is not representable");

  const double R_fast = opt.R_lid / eps;
  const double rho = strip_aspect(op, dom);
  const int n_z =
      static_cast<int>(std::lround(R_fast * opt.nodes_per_fast_period / rho)) + 1;
  const int n_t = dom.dim == 1 ? 1 : opt.nodes_per_fast_period;
  StripGrid grid = StripGrid::make(dom, n_t, n_z, R_fast);

  StripAssembly a;
  a.c0_interior = eps * eps;
  a.c0_bottom = 0.0;
  a.interior_rhs_scale = eps * eps;
  a.boundary_rhs_scale = eps;
  a.hterm_scale = eps;
  a.hterm_grad_scale = 1.0 / eps;
  const double e = eps;
  a.slow_x = [e](const VectorXd& y) { return VectorXd(e * y); };
  DiscreteScheme scheme = assemble_strip(op, bop, grid, a);
  SolveResult sol = solve_stationary(scheme, opt.solve);

  EpsilonSolution out;
  out.eps = eps;
  out.grid = grid;
  out.u = std::move(sol.u);
  for (double v : out.u) out.sup_norm = std::max(out.sup_norm, std::abs(v));
  return out;
}

EffectiveSolution solve_effective(const EffectiveData& eff,
                                  const EffectiveSolveOptions& opt) {
  const int dim = eff.dim;
  LinearCoeffs c;
  c.dim = dim;
  c.A.reserve(dim * dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) c.A.push_back(Expr::constant(eff.A_bar(i, j)));
  for (int i = 0; i < dim; ++i) c.b.push_back(Expr::constant(eff.b_bar[i]));
  c.f = Expr::constant(eff.f_bar);

  // mu_bar(Du) = gamma_bar.Du - g_bar = 0; orient the direction downward for
  // the one-sided boundary stencil.
  double orient = eff.gamma_bar[dim - 1] > 0 ? -1.0 : 1.0;
  std::vector<Expr> gamma;
  for (int i = 0; i < dim; ++i) gamma.push_back(Expr::constant(orient * eff.gamma_bar[i]));
  BoundaryOperatorSpec bop;
  bop.dim = dim;
  bop.gamma = gamma;
  bop.g = Expr::constant(orient * eff.g_bar);

  DomainSpec dom;
  dom.kind = DomainSpec::Kind::HalfStrip;
  dom.dim = dim;
  dom.height = opt.R_lid;
  const int n_z = static_cast<int>(std::lround(opt.R_lid * opt.nodes_per_unit)) + 1;
  StripGrid grid = StripGrid::make(dom, dim == 1 ? 1 : opt.n_t, n_z, opt.R_lid);

  StripAssembly a;
  a.c0_interior = 1.0;
  DiscreteScheme scheme = assemble_strip(OperatorSpec::linear(c), bop, grid, a);
  SolveResult sol = solve_stationary(scheme, opt.solve);
  return EffectiveSolution{grid, std::move(sol.u)};
}

ConvergenceStudy convergence_study(const OperatorSpec& op,
                                   const BoundaryOperatorSpec& bop,
                                   const DomainSpec& dom,
                                   const EffectiveData* eff,
                                   const StudyOptions& opt) {
  ConvergenceStudy study;
  study.window_height = opt.window_height;

  EffectiveSolution ubar;
  EpsilonSolution ref;
  const bool self_ref = opt.reference_eps > 0.0;
  if (self_ref) {
    ref = solve_epsilon_problem(op, bop, dom, opt.reference_eps, opt.eps_opt);
    study.reference = "fine-grid eps=" + std::to_string(opt.reference_eps);
  } else {
    if (!eff) throw std::invalid_argument("convergence_study: no reference supplied");
    ubar = solve_effective(*eff, opt.eff_opt);
    study.reference = "effective";
  }

  auto reference_at = [&](const VectorXd& x) {
    if (!self_ref) {
      const double t = x.size() == 2 ? x[0] : 0.0;
      return strip_interpolate(ubar.grid, ubar.u, t, x[x.size() - 1]);
    }
    VectorXd y = x / opt.reference_eps;
    double t = 0.0, psi = 0.0;
    if (x.size() == 2) {
      t = y[0] - std::floor(y[0]);
      psi = ref.grid.dom.psi_at(t);
    }
    return strip_interpolate(ref.grid, ref.u, t, y[y.size() - 1] - psi);
  };

  for (double eps : opt.epsilons) {
    auto t0 = std::chrono::steady_clock::now();
    EpsilonSolution ue = solve_epsilon_problem(op, bop, dom, eps, opt.eps_opt);
    double err = 0.0;
    for (int idx = 0; idx < ue.grid.num_nodes(); ++idx) {
      VectorXd x = eps * ue.grid.point(idx);  // physical slow coordinates
      if (x[x.size() - 1] > opt.window_height) continue;
      err = std::max(err, std::abs(ue.u[idx] - reference_at(x)));
    }
    auto t1 = std::chrono::steady_clock::now();
    study.epsilons.push_back(eps);
    study.errors.push_back(err);
    study.runtimes.push_back(std::chrono::duration<double>(t1 - t0).count());
  }
  return study;
}

}  // namespace halfcell
