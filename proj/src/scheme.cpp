#include "halfcell/scheme.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>

namespace halfcell {

namespace {

void add_entry(SchemeRow& row, int idx, double w) {
  for (auto& e : row.entries)
    if (e.first == idx) {
      e.second += w;
      return;
    }
  row.entries.emplace_back(idx, w);
}

// Expand a Pucci operator into its diagonal-matrix control set
// sup { -tr(aM) : a = diag(a_i), a_i in {kappa, Kappa} }. Exact for diagonal
// Hessians; the monotone discretization works with axis second differences.
std::vector<LinearCoeffs> pucci_controls(const OperatorSpec& op) {
  std::vector<LinearCoeffs> out;
  int combos = 1 << op.dim;
  for (int m = 0; m < combos; ++m) {
    LinearCoeffs c;
    c.dim = op.dim;
    c.A.resize(op.dim * op.dim, Expr::constant(0.0));
    for (int i = 0; i < op.dim; ++i)
      c.A[i * op.dim + i] =
          Expr::constant((m >> i) & 1 ? op.pucci_Kappa : op.pucci_kappa);
    c.b.assign(op.dim, Expr::constant(0.0));
    c.f = Expr::constant(0.0);
    out.push_back(std::move(c));
  }
  return out;
}

const std::vector<LinearCoeffs>& control_list(const OperatorSpec& op,
                                              std::vector<LinearCoeffs>& scratch) {
  if (op.kind == OperatorSpec::Kind::PucciMinus) {
    scratch = pucci_controls(op);
    return scratch;
  }
  return op.controls;
}

// -tr(A D^2 u) on a 2D stencil with steps (hx, hz); nb maps offsets to node ids.
// Cross terms use the diagonal-rotation stencil; monotone iff
// |a12| <= min(a11*hz/hx, a22*hx/hz).
template <typename NB>
void add_diffusion_2d(SchemeRow& row, double a11, double a12, double a22, double hx,
                      double hz, NB nb, int node_for_error) {
  double am = std::abs(a12);
  double cxx = a11 - am * hx / hz;
  double czz = a22 - am * hz / hx;
  if (cxx < -1e-12 || czz < -1e-12)
    throw MonotonicityViolation(
        "cross-derivative coefficient too large for the rotation stencil "
        "(|a12| > min(a11*hz/hx, a22*hx/hz)); refine anisotropy or rescale",
        node_for_error);
  add_entry(row, nb(0, 0), 2 * cxx / (hx * hx) + 2 * czz / (hz * hz));
  add_entry(row, nb(1, 0), -cxx / (hx * hx));
  add_entry(row, nb(-1, 0), -cxx / (hx * hx));
  add_entry(row, nb(0, 1), -czz / (hz * hz));
  add_entry(row, nb(0, -1), -czz / (hz * hz));
  if (am > 0) {
    int s = a12 > 0 ? 1 : -1;
    double w = am / (hx * hz);
    add_entry(row, nb(0, 0), 2 * w);
    add_entry(row, nb(1, s), -w);
    add_entry(row, nb(-1, -s), -w);
  }
}

// -b d/dx_axis: central differencing when the diffusion weights already in
// the row keep it an M-matrix (second order), upwinded otherwise.
template <typename NB1>
void add_drift_1d(SchemeRow& row, double b, double h, NB1 nb) {
  if (b == 0.0) return;
  double wp = 0.0, wm = 0.0;
  for (const auto& e : row.entries) {
    if (e.first == nb(1)) wp = e.second;
    if (e.first == nb(-1)) wm = e.second;
  }
  const double c = b / (2 * h);
  if (nb(1) != nb(-1) && wp - c <= 0.0 && wm + c <= 0.0) {
    add_entry(row, nb(1), -c);
    add_entry(row, nb(-1), c);
    return;
  }
  if (b > 0) {
    add_entry(row, nb(0), b / h);
    add_entry(row, nb(1), -b / h);
  } else {
    add_entry(row, nb(0), -b / h);
    add_entry(row, nb(-1), b / h);
  }
}

}  // namespace

void DiscreteScheme::audit_monotone() const {
  for (int i = 0; i < num_nodes; ++i) {
    for (const auto& row : rows[i]) {
      double diag = 0.0;
      for (const auto& [j, w] : row.entries) {
        if (j == i)
          diag += w;
        else if (w > 1e-11)
          throw MonotonicityViolation("positive off-diagonal weight " +
                                          std::to_string(w) + " at node " +
                                          std::to_string(i),
                                      i);
      }
      if (diag + c0[i] <= 0)
        throw MonotonicityViolation("nonpositive diagonal at node " + std::to_string(i), i);
    }
  }
}

double strip_aspect(const OperatorSpec& op, const DomainSpec& dom) {
  if (dom.dim == 1 || dom.flat()) return 1.0;
  std::vector<LinearCoeffs> scratch;
  const auto& controls = control_list(op, scratch);
  const int nt = 256;
  double lo = 1.0, hi = std::numeric_limits<double>::infinity();
  VectorXd x = VectorXd::Zero(2);
  VectorXd y(2);
  for (int i = 0; i < nt; ++i) {
    const double t = static_cast<double>(i) / nt;
    const double dpsi = dom.psi_d1(t);
    for (int k = 0; k < 4; ++k) {
      y[0] = t;
      y[1] = dom.psi_at(t) + 0.25 * k;
      for (const auto& c : controls) {
        SampledLinear sm = sample_linear(c, x, y);
        const double a11 = sm.A(0, 0);
        const double a12t = std::abs(sm.A(0, 1) - a11 * dpsi);
        const double a22t = a11 * dpsi * dpsi - 2 * sm.A(0, 1) * dpsi + sm.A(1, 1);
        if (a12t <= 0) continue;
        lo = std::max(lo, a12t / a11);
        hi = std::min(hi, a22t / a12t);
      }
    }
  }
  if (lo * 1.02 > hi * 0.98)
    throw MonotonicityViolation(
        "no uniform cell aspect keeps the rotation stencil monotone for this "
        "boundary graph; reduce the graph slope or the anisotropy");
  if (lo <= 1.0 && hi >= 1.0) return 1.0;
  return std::sqrt(lo * 1.02 * std::min(hi * 0.98, 4.0 * lo));
}

double DiscreteScheme::node_residual(const GridFn& u, int i) const {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& row : rows[i]) {
    double v = -row.rhs;
    for (const auto& [j, w] : row.entries) v += w * u[j];
    best = std::max(best, v);
  }
  double r = best + c0[i] * u[i];
  NodeClass nc = node_class.empty() ? NodeClass::Interior : node_class[i];
  const std::optional<HTermHook>& hook =
      nc == NodeClass::Bottom ? boundary_hterm : interior_hterm;
  if (hook && nc != NodeClass::Lid) {
    VectorXd grad = gradient(u, i);
    VectorXd p = hook->p0.size() ? VectorXd(hook->p0 + hook->grad_scale * grad)
                                 : VectorXd(hook->grad_scale * grad);
    Bindings b;
    for (int d = 0; d < p.size(); ++d) b["p" + std::to_string(d + 1)] = p[d];
    b["pnorm"] = p.norm();
    r += hook->scale * hook->h.eval(b);
  }
  return r;
}

double DiscreteScheme::residual_sup(const GridFn& u) const {
  double r = 0.0;
  for (int i = 0; i < num_nodes; ++i) r = std::max(r, std::abs(node_residual(u, i)));
  return r;
}

std::pair<double, double> DiscreteScheme::residual_split(const GridFn& u) const {
  double ri = 0.0, rb = 0.0;
  for (int i = 0; i < num_nodes; ++i) {
    double r = std::abs(node_residual(u, i));
    if (!node_class.empty() && node_class[i] == NodeClass::Bottom)
      rb = std::max(rb, r);
    else
      ri = std::max(ri, r);
  }
  return {ri, rb};
}

DiscreteScheme assemble_interior(const OperatorSpec& op, const TorusGrid& grid,
                                 const TorusAssembly& opt) {
  std::vector<LinearCoeffs> scratch;
  const auto& controls = control_list(op, scratch);
  int n = grid.num_nodes();
  DiscreteScheme s;
  s.num_nodes = n;
  s.rows.resize(n);
  s.c0.assign(n, opt.c0);
  s.node_class.assign(n, NodeClass::Interior);
  VectorXd x = opt.frozen_x.size() ? opt.frozen_x : VectorXd::Zero(grid.dim);
  VectorXd p0 = opt.p_offset.size() ? opt.p_offset : VectorXd::Zero(grid.dim);

  for (int idx = 0; idx < n; ++idx) {
    int i, j;
    grid.coords(idx, i, j);
    VectorXd y = grid.point(idx);
    for (const auto& c : controls) {
      SampledLinear sm = sample_linear(c, x, y);
      SchemeRow row;
      if (grid.dim == 1) {
        double a = sm.A(0, 0);
        add_entry(row, grid.index(i), 2 * a / (grid.h * grid.h));
        add_entry(row, grid.index(i + 1), -a / (grid.h * grid.h));
        add_entry(row, grid.index(i - 1), -a / (grid.h * grid.h));
        add_drift_1d(row, sm.b[0], grid.h, [&](int d) { return grid.index(i + d); });
      } else {
        auto nb = [&](int di, int dj) { return grid.index(i + di, j + dj); };
        add_diffusion_2d(row, sm.A(0, 0), sm.A(0, 1), sm.A(1, 1), grid.h, grid.h, nb, idx);
        add_drift_1d(row, sm.b[0], grid.h, [&](int d) { return grid.index(i + d, j); });
        add_drift_1d(row, sm.b[1], grid.h, [&](int d) { return grid.index(i, j + d); });
      }
      row.rhs = sm.f + sm.b.dot(p0);
      if (!opt.rhs_extra.empty()) row.rhs += opt.rhs_extra[idx];
      s.rows[idx].push_back(std::move(row));
    }
  }
  if (opt.hterm) {
    s.interior_hterm = opt.hterm;
  } else if (op.kind != OperatorSpec::Kind::PucciMinus && op.controls[0].hterm) {
    HTermHook hook;
    hook.h = *op.controls[0].hterm;
    hook.p0 = p0;
    s.interior_hterm = hook;
  }
  TorusGrid gcopy = grid;
  s.gradient = [gcopy](const GridFn& u, int idx) { return torus_gradient(gcopy, u, idx); };
  s.grad_stencil = [gcopy](int idx, int d) { return torus_gradient_stencil(gcopy, idx, d); };
  return s;
}

DiscreteScheme assemble_strip(const OperatorSpec& op, const BoundaryOperatorSpec& bop,
                              const StripGrid& grid, const StripAssembly& opt) {
  std::vector<LinearCoeffs> scratch;
  const auto& controls = control_list(op, scratch);
  int n = grid.num_nodes();
  int dim = grid.dim;
  DiscreteScheme s;
  s.num_nodes = n;
  s.rows.resize(n);
  s.c0.assign(n, 0.0);
  s.node_class.resize(n);
  VectorXd p0 = opt.p_offset.size() ? opt.p_offset : VectorXd::Zero(dim);
  auto slow = opt.slow_x ? opt.slow_x
                         : [](const VectorXd& y) { return VectorXd(VectorXd::Zero(y.size())); };

  for (int idx = 0; idx < n; ++idx) {
    int i, k;
    grid.coords(idx, i, k);
    s.node_class[idx] = grid.cls(idx);
    VectorXd y = grid.point(idx);
    VectorXd x = slow(y);

    if (s.node_class[idx] == NodeClass::Lid) {
      SchemeRow row;
      add_entry(row, grid.index(i, k), 1.0 / grid.h_z);
      add_entry(row, grid.index(i, k - 1), -1.0 / grid.h_z);
      row.rhs = 0.0;
      if (opt.lid_field)
        row.rhs = (opt.lid_field(grid.point(grid.index(i, k))) -
                   opt.lid_field(grid.point(grid.index(i, k - 1)))) /
                  grid.h_z;
      s.rows[idx].push_back(std::move(row));
      continue;
    }

    if (s.node_class[idx] == NodeClass::Bottom) {
      Bindings bind = point_bindings(x, y);
      VectorXd gamma(dim);
      for (int d = 0; d < dim; ++d) gamma[d] = bop.gamma[d].eval(bind);
      double g = bop.g.valid() ? bop.g.eval(bind) : 0.0;
      SchemeRow row;
      double gz, gt = 0.0;
      if (dim == 1) {
        gz = gamma[0];
      } else {
        double dpsi = grid.dom.psi_d1(grid.t_of(idx));
        gt = gamma[0];
        gz = gamma[1] - gamma[0] * dpsi;
        if (std::abs(gz) < 10.0 * grid.h_t * std::abs(gt))
          throw ObliquenessTooWeak(
              "flattened boundary direction nearly tangential at node " +
              std::to_string(idx));
      }
      if (gz >= 0)
        throw ObliquenessTooWeak("boundary direction does not point out of the domain");
      // gz * (u(i,1)-u(i,0))/h_z + upwinded tangential part + c0_bottom*u = rhs
      add_entry(row, grid.index(i, 1), gz / grid.h_z);
      add_entry(row, grid.index(i, 0), -gz / grid.h_z);
      if (dim == 2) add_drift_1d(row, -gt, grid.h_t, [&](int d) { return grid.index(i + d, 0); });
      row.rhs = opt.boundary_rhs_scale * g - gamma.dot(p0);
      s.rows[idx].push_back(std::move(row));
      s.c0[idx] = opt.c0_bottom;
      continue;
    }

    // interior node: terrain-following transformed coefficients
    s.c0[idx] = opt.c0_interior;
    double dpsi = 0.0, d2psi = 0.0;
    if (dim == 2 && !grid.dom.flat()) {
      dpsi = grid.dom.psi_d1(grid.t_of(idx));
      d2psi = grid.dom.psi_d2(grid.t_of(idx));
    }
    for (const auto& c : controls) {
      SampledLinear sm = sample_linear(c, x, y);
      SchemeRow row;
      if (dim == 1) {
        double a = sm.A(0, 0);
        add_entry(row, grid.index(0, k), 2 * a / (grid.h_z * grid.h_z));
        add_entry(row, grid.index(0, k + 1), -a / (grid.h_z * grid.h_z));
        add_entry(row, grid.index(0, k - 1), -a / (grid.h_z * grid.h_z));
        add_drift_1d(row, sm.b[0], grid.h_z, [&](int d) { return grid.index(0, k + d); });
      } else {
        double a11 = sm.A(0, 0);
        double a12t = sm.A(0, 1) - a11 * dpsi;
        double a22t = a11 * dpsi * dpsi - 2 * sm.A(0, 1) * dpsi + sm.A(1, 1);
        double bt = sm.b[0];
        double bz = sm.b[1] - sm.b[0] * dpsi - a11 * d2psi;
        auto nb = [&](int di, int dk) { return grid.index(i + di, k + dk); };
        add_diffusion_2d(row, a11, a12t, a22t, grid.h_t, grid.h_z, nb, idx);
        add_drift_1d(row, bt, grid.h_t, [&](int d) { return grid.index(i + d, k); });
        add_drift_1d(row, bz, grid.h_z, [&](int d) { return grid.index(i, k + d); });
      }
      row.rhs = opt.interior_rhs_scale * sm.f + sm.b.dot(p0);
      if (!opt.interior_rhs_extra.empty()) row.rhs += opt.interior_rhs_extra[idx];
      s.rows[idx].push_back(std::move(row));
    }
  }

  if (op.kind != OperatorSpec::Kind::PucciMinus && op.controls[0].hterm) {
    HTermHook hook;
    hook.h = *op.controls[0].hterm;
    hook.p0 = p0;
    hook.scale = opt.hterm_scale;
    hook.grad_scale = opt.hterm_grad_scale;
    s.interior_hterm = hook;
  }
  if (bop.hterm) {
    HTermHook hook;
    hook.h = *bop.hterm;
    hook.p0 = p0;
    hook.scale = opt.boundary_rhs_scale;
    s.boundary_hterm = hook;
  }
  StripGrid gcopy = grid;
  s.gradient = [gcopy](const GridFn& u, int idx) { return strip_gradient(gcopy, u, idx); };
  s.grad_stencil = [gcopy](int idx, int d) { return strip_gradient_stencil(gcopy, idx, d); };
  return s;
}

namespace {

const std::optional<HTermHook>& node_hook(const DiscreteScheme& s, int i, NodeClass& nc) {
  nc = s.node_class.empty() ? NodeClass::Interior : s.node_class[i];
  static const std::optional<HTermHook> none;
  if (nc == NodeClass::Lid) return none;
  return nc == NodeClass::Bottom ? s.boundary_hterm : s.interior_hterm;
}

double hook_eval(const HTermHook& hook, const VectorXd& p) {
  Bindings b;
  for (int d = 0; d < p.size(); ++d) b["p" + std::to_string(d + 1)] = p[d];
  b["pnorm"] = p.norm();
  return hook.scale * hook.h.eval(b);
}

double hook_source(const DiscreteScheme& s, const GridFn& u, int i) {
  NodeClass nc;
  const std::optional<HTermHook>& hook = node_hook(s, i, nc);
  if (!hook) return 0.0;
  VectorXd grad = s.gradient(u, i);
  VectorXd p = hook->p0.size() ? VectorXd(hook->p0 + hook->grad_scale * grad)
                               : VectorXd(hook->grad_scale * grad);
  return hook_eval(*hook, p);
}

SolveResult pseudo_time_march(const DiscreteScheme& s, const SolveOptions& opt) {
  SolveResult res;
  res.u.assign(s.num_nodes, 0.0);
  double lam = 0.0;
  for (int i = 0; i < s.num_nodes; ++i) {
    double diag = 0.0;
    for (const auto& row : s.rows[i])
      for (const auto& [j, w] : row.entries)
        if (j == i) diag = std::max(diag, w);
    lam = std::max(lam, diag + s.c0[i]);
  }
  double tau = opt.cfl / lam;
  double res_sup = 0.0;
  for (int step = 0; step < opt.max_pseudo_time_steps; ++step) {
    res_sup = 0.0;
    GridFn next = res.u;
    for (int i = 0; i < s.num_nodes; ++i) {
      double r = s.node_residual(res.u, i);
      res_sup = std::max(res_sup, std::abs(r));
      next[i] -= tau * r;
    }
    res.u = std::move(next);
    ++res.iterations;
    if (res_sup < opt.tol_nonlinear) {
      res.residual = res_sup;
      return res;
    }
  }
  throw NonConvergence("pseudo-time marching did not reach tolerance", res_sup, res.u);
}

}  // namespace

SolveResult solve_stationary(const DiscreteScheme& s, const SolveOptions& opt) {
  if (opt.pseudo_time) return pseudo_time_march(s, opt);

  int n = s.num_nodes;
  SolveResult res;
  res.u.assign(n, 0.0);
  res.policy.assign(n, 0);
  bool has_hterm = s.interior_hterm || s.boundary_hterm;
  bool multi = false;
  for (int i = 0; i < n; ++i) multi = multi || s.rows[i].size() > 1;
  double tol = has_hterm ? opt.tol_nonlinear : opt.tol_linear;
  int max_iter = has_hterm ? opt.max_lagged_iterations
                           : (multi ? opt.max_policy_iterations : 1);

  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  std::vector<int> prev_policy;
  for (int iter = 0; iter < max_iter; ++iter) {
    // freeze policy and nonlinear source at the current iterate
    std::vector<int> policy(n, 0);
    if (multi && (iter > 0 || has_hterm)) {
      for (int i = 0; i < n; ++i) {
        int best = 0;
        double best_v = -std::numeric_limits<double>::infinity();
        for (size_t c = 0; c < s.rows[i].size(); ++c) {
          double v = -s.rows[i][c].rhs;
          for (const auto& [j, w] : s.rows[i][c].entries) v += w * res.u[j];
          if (v > best_v + 1e-14) {
            best_v = v;
            best = static_cast<int>(c);
          }
        }
        policy[i] = best;
      }
    }

    std::vector<Eigen::Triplet<double>> trips;
    Eigen::VectorXd rhs(n);
    for (int i = 0; i < n; ++i) {
      const SchemeRow& row = s.rows[i][std::min<size_t>(policy[i], s.rows[i].size() - 1)];
      for (const auto& [j, w] : row.entries) trips.emplace_back(i, j, w);
      trips.emplace_back(i, i, s.c0[i]);
      rhs[i] = row.rhs;
      if (has_hterm && s.grad_stencil) {
        // Newton step on the gradient nonlinearity: its linearization around
        // the current iterate joins the matrix, the affine remainder the rhs.
        NodeClass nc;
        const std::optional<HTermHook>& hook = node_hook(s, i, nc);
        if (hook) {
          VectorXd grad = s.gradient(res.u, i);
          VectorXd p = hook->p0.size() ? VectorXd(hook->p0 + hook->grad_scale * grad)
                                       : VectorXd(hook->grad_scale * grad);
          rhs[i] -= hook_eval(*hook, p);
          for (int d = 0; d < p.size(); ++d) {
            const double step = 1e-6 * (1.0 + std::abs(p[d]));
            VectorXd pp = p, pm = p;
            pp[d] += step;
            pm[d] -= step;
            const double q =
                hook->grad_scale * (hook_eval(*hook, pp) - hook_eval(*hook, pm)) /
                (2 * step);
            if (q == 0.0) continue;
            for (const auto& [j, w] : s.grad_stencil(i, d)) trips.emplace_back(i, j, q * w);
            rhs[i] += q * grad[d];
          }
        }
      } else if (has_hterm && iter > 0) {
        rhs[i] -= hook_source(s, res.u, i);
      }
    }
    Eigen::SparseMatrix<double> A(n, n);
    A.setFromTriplets(trips.begin(), trips.end());
    lu.compute(A);
    if (lu.info() != Eigen::Success)
      throw NonConvergence("sparse factorization failed", -1.0, res.u);
    Eigen::VectorXd sol = lu.solve(rhs);
    double du = 0.0;
    for (int i = 0; i < n; ++i) {
      du = std::max(du, std::abs(res.u[i] - sol[i]));
      res.u[i] = sol[i];
    }

    res.policy = policy;
    res.residual = s.residual_sup(res.u);
    res.residual_history.push_back(res.residual);
    ++res.iterations;
    if (res.residual < tol) return res;
    // LU roundoff floor: a fixed policy / fixed source solve cannot improve
    double unorm = 0.0;
    for (double v : res.u) unorm = std::max(unorm, std::abs(v));
    double floor = 1e-9 * (1.0 + unorm);
    if (!has_hterm && !multi && res.residual < floor) return res;
    if (!has_hterm && multi && iter > 0 && policy == prev_policy && res.residual < floor)
      return res;
    if (has_hterm && iter > 0 && du < tol) return res;
    prev_policy = policy;
  }
  throw NonConvergence("stationary solve did not converge", res.residual, res.u);
}

}  // namespace halfcell
