#include "halfcell/model.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>

namespace halfcell {

OperatorSpec OperatorSpec::linear(int dim, std::vector<Expr> A, std::vector<Expr> b, Expr f) {
  OperatorSpec op;
  op.kind = Kind::Linear;
  op.dim = dim;
  LinearCoeffs c;
  c.dim = dim;
  c.A = std::move(A);
  c.b = std::move(b);
  c.f = std::move(f);
  op.controls.push_back(std::move(c));
  return op;
}

OperatorSpec OperatorSpec::linear(LinearCoeffs c) {
  OperatorSpec op;
  op.kind = Kind::Linear;
  op.dim = c.dim;
  op.controls.push_back(std::move(c));
  return op;
}

OperatorSpec OperatorSpec::pucci(int dim, double kappa, double Kappa) {
  OperatorSpec op;
  op.kind = Kind::PucciMinus;
  op.dim = dim;
  op.pucci_kappa = kappa;
  op.pucci_Kappa = Kappa;
  return op;
}

BoundaryOperatorSpec BoundaryOperatorSpec::oblique(int dim, std::vector<Expr> gamma, Expr g) {
  BoundaryOperatorSpec b;
  b.dim = dim;
  b.gamma = std::move(gamma);
  b.g = std::move(g);
  return b;
}

double DomainSpec::psi_at(double t) const {
  if (flat()) return 0.0;
  return psi.eval({{"y1", t}});
}

double DomainSpec::psi_d1(double t) const {
  if (flat()) return 0.0;
  const double h = 1e-5;
  return (psi_at(t + h) - psi_at(t - h)) / (2 * h);
}

double DomainSpec::psi_d2(double t) const {
  if (flat()) return 0.0;
  const double h = 1e-4;
  return (psi_at(t + h) - 2 * psi_at(t) + psi_at(t - h)) / (h * h);
}

Bindings point_bindings(const VectorXd& x, const VectorXd& y) {
  Bindings b;
  for (int i = 0; i < x.size(); ++i) b["x" + std::to_string(i + 1)] = x[i];
  for (int i = 0; i < y.size(); ++i) b["y" + std::to_string(i + 1)] = y[i];
  return b;
}

SampledLinear sample_linear(const LinearCoeffs& c, const VectorXd& x, const VectorXd& y) {
  Bindings bind = point_bindings(x, y);
  SampledLinear s;
  int n = c.dim;
  s.A = MatrixXd::Zero(n, n);
  s.b = VectorXd::Zero(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) s.A(i, j) = c.A[i * n + j].eval(bind);
  for (int i = 0; i < n; ++i) s.b[i] = c.b[i].eval(bind);
  s.f = c.f.valid() ? c.f.eval(bind) : 0.0;
  return s;
}

namespace {

double hterm_value(const Expr& h, const VectorXd& p) {
  Bindings b;
  for (int i = 0; i < p.size(); ++i) b["p" + std::to_string(i + 1)] = p[i];
  b["pnorm"] = p.norm();
  return h.eval(b);
}

double linear_value(const LinearCoeffs& c, const MatrixXd& M, const VectorXd& p,
                    const VectorXd& x, const VectorXd& y) {
  SampledLinear s = sample_linear(c, x, y);
  double v = -(s.A * M).trace() - s.b.dot(p) - s.f;
  if (c.hterm) v += hterm_value(*c.hterm, p);
  return v;
}

double pucci_minus(const MatrixXd& M, double kappa, double Kappa) {
  // sup over kappa*Id <= a <= Kappa*Id of -tr(aM), via the eigenvalues of M
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(M);
  double v = 0.0;
  for (int i = 0; i < M.rows(); ++i) {
    double lam = es.eigenvalues()[i];
    v += lam > 0 ? -kappa * lam : -Kappa * lam;
  }
  return v;
}

}  // namespace

double evaluate_operator(const OperatorSpec& op, const MatrixXd& M, const VectorXd& p,
                         const VectorXd& x, const VectorXd& y) {
  if (M.rows() != op.dim || p.size() != op.dim)
    throw std::invalid_argument("evaluate_operator: dimension mismatch");
  switch (op.kind) {
    case OperatorSpec::Kind::PucciMinus:
      return pucci_minus(M, op.pucci_kappa, op.pucci_Kappa);
    case OperatorSpec::Kind::Linear:
      return linear_value(op.controls[0], M, p, x, y);
    case OperatorSpec::Kind::HJB: {
      double best = -std::numeric_limits<double>::infinity();
      for (const auto& c : op.controls) best = std::max(best, linear_value(c, M, p, x, y));
      return best;
    }
  }
  throw std::logic_error("unreachable");
}

int argmax_control(const OperatorSpec& op, const MatrixXd& M, const VectorXd& p,
                   const VectorXd& x, const VectorXd& y) {
  int best = 0;
  double best_v = -std::numeric_limits<double>::infinity();
  for (size_t c = 0; c < op.controls.size(); ++c) {
    double v = linear_value(op.controls[c], M, p, x, y);
    if (v > best_v + 1e-14) {
      best_v = v;
      best = static_cast<int>(c);
    }
  }
  return best;
}

double evaluate_boundary(const BoundaryOperatorSpec& bop, const VectorXd& p,
                         const VectorXd& x, const VectorXd& y) {
  Bindings bind = point_bindings(x, y);
  double v = 0.0;
  for (int i = 0; i < bop.dim; ++i) v += bop.gamma[i].eval(bind) * p[i];
  v -= bop.g.valid() ? bop.g.eval(bind) : 0.0;
  if (bop.hterm) v += bop.hterm->eval({{"pnorm", p.norm()}});
  return v;
}

DistanceResult signed_distance_and_normal(const DomainSpec& dom, const VectorXd& x) {
  int n = dom.dim;
  DistanceResult r;
  r.n = VectorXd::Zero(n);
  if (n == 1) {
    r.d = x[0];
    r.n[0] = -1.0;
    return r;
  }
  double t = x[0];
  double psi = dom.psi_at(t);
  double dpsi = dom.psi_d1(t);
  double norm = std::sqrt(1.0 + dpsi * dpsi);
  r.n[0] = dpsi / norm;
  r.n[1] = -1.0 / norm;
  r.d = (x[1] - psi) / norm;
  return r;
}

bool AuditReport::all_pass() const {
  for (const auto& e : entries)
    if (!e.pass) return false;
  return true;
}

AuditReport audit_assumptions(const OperatorSpec& op, const BoundaryOperatorSpec& bop,
                              const DomainSpec& dom, int probes, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  int n = op.dim;
  auto rand_vec = [&](double scale) {
    VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = scale * unif(rng);
    return v;
  };
  auto rand_sym = [&](double scale) {
    MatrixXd m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j <= i; ++j) m(i, j) = m(j, i) = scale * unif(rng);
    return m;
  };
  auto rand_psd = [&](double scale) {
    MatrixXd r = rand_sym(scale);
    return MatrixXd(r.transpose() * r);
  };

  AuditReport rep;

  // (F3)-type ellipticity: [F(M,p,x) - F(M+N,p,x)] / tr(N) >= kappa > 0.
  {
    double worst = std::numeric_limits<double>::infinity();
    for (int k = 0; k < probes; ++k) {
      MatrixXd M = rand_sym(3.0);
      MatrixXd N = rand_psd(2.0);
      VectorXd p = rand_vec(10.0), x = rand_vec(2.0), y = rand_vec(2.0);
      double trN = N.trace();
      if (trN < 1e-10) continue;
      double drop = evaluate_operator(op, M, p, x, y) - evaluate_operator(op, M + N, p, x, y);
      worst = std::min(worst, drop / trN);
    }
    rep.entries.push_back({"F3-uniform-ellipticity", worst > 1e-10, worst,
                           "min [F(M)-F(M+N)]/tr(N) over probes"});
  }

  // (F2) directional ellipticity at moderate |p|: F(M+N,p)-F(M,p) <= -kappa (N phat, phat).
  {
    double worst = std::numeric_limits<double>::infinity();
    for (int k = 0; k < probes; ++k) {
      MatrixXd M = rand_sym(3.0);
      MatrixXd N = rand_psd(2.0);
      VectorXd p = rand_vec(100.0), x = rand_vec(2.0), y = rand_vec(2.0);
      if (p.norm() < 1e-8) continue;
      VectorXd ph = p.normalized();
      double dir = ph.dot(N * ph);
      if (dir < 1e-10) continue;
      double drop = evaluate_operator(op, M, p, x, y) - evaluate_operator(op, M + N, p, x, y);
      worst = std::min(worst, drop / dir);
    }
    rep.entries.push_back({"F2-degenerate-ellipticity", worst > 1e-10, worst,
                           "min [F(M)-F(M+N)]/(N phat,phat) over probes"});
  }

  // (F1) Lipschitz bounds via difference quotients.
  {
    double quot = 0.0;
    bool finite = true;
    const double step = 1e-4;
    for (int k = 0; k < probes; ++k) {
      MatrixXd M = rand_sym(3.0);
      VectorXd p = rand_vec(5.0), x = rand_vec(2.0), y = rand_vec(2.0);
      double base = evaluate_operator(op, M, p, x, y);
      for (int i = 0; i < n; ++i) {
        VectorXd dp = p;
        dp[i] += step;
        double q = std::abs(evaluate_operator(op, M, dp, x, y) - base) / step;
        if (!std::isfinite(q)) finite = false;
        quot = std::max(quot, q);
        VectorXd dy = y;
        dy[i] += step;
        double qy = std::abs(evaluate_operator(op, M, p, x, dy) - base) / step /
                    (1.0 + p.norm() + 2 * M.norm());
        if (!std::isfinite(qy)) finite = false;
        quot = std::max(quot, qy);
      }
    }
    rep.entries.push_back({"F1-lipschitz", finite, quot, "max difference quotient"});
  }

  // Symmetry and A >= nu*Id for each linear control.
  if (op.kind != OperatorSpec::Kind::PucciMinus) {
    double min_eig = std::numeric_limits<double>::infinity();
    double max_asym = 0.0;
    for (int k = 0; k < probes; ++k) {
      VectorXd x = rand_vec(2.0), y = rand_vec(2.0);
      for (const auto& c : op.controls) {
        SampledLinear s = sample_linear(c, x, y);
        max_asym = std::max(max_asym, (s.A - s.A.transpose()).norm());
        Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (s.A + s.A.transpose()));
        min_eig = std::min(min_eig, es.eigenvalues().minCoeff());
      }
    }
    rep.entries.push_back({"H1-A-symmetric", max_asym < 1e-10, max_asym, "max |A - A^T|"});
    rep.entries.push_back({"H1-A-elliptic", min_eig > 1e-10, min_eig, "min eigenvalue of A"});
  }

  // (L1) strict obliqueness: [L(p + t n, x) - L(p, x)] / t >= nu_L > 0 at boundary probes.
  if (!bop.gamma.empty()) {
    double worst = std::numeric_limits<double>::infinity();
    std::uniform_real_distribution<double> unif01(0.0, 1.0);
    for (int k = 0; k < probes; ++k) {
      VectorXd xb = VectorXd::Zero(n);
      if (n == 2) {
        xb[0] = unif01(rng);
        xb[1] = dom.psi_at(xb[0]);
      }
      VectorXd normal = signed_distance_and_normal(dom, xb).n;
      VectorXd p = rand_vec(5.0);
      double t = 0.5 + unif01(rng);
      double quot = (evaluate_boundary(bop, p + t * normal, xb, xb) -
                     evaluate_boundary(bop, p, xb, xb)) /
                    t;
      worst = std::min(worst, quot);
    }
    rep.entries.push_back({"L1-obliqueness", worst > 1e-10, worst,
                           "min [L(p+tn)-L(p)]/t at boundary probes"});
  }

  return rep;
}

}  // namespace halfcell
