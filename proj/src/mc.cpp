#include "halfcell/mc.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <thread>

namespace halfcell {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Expression sampler that short-circuits constants and reuses one binding map.
struct FieldSampler {
  bool is_const = true;
  double value = 0.0;
  Expr e;

  FieldSampler() = default;
  explicit FieldSampler(const Expr& expr) {
    if (!expr.valid()) return;
    e = expr;
    is_const = expr.variables().empty();
    if (is_const) value = expr.eval({});
  }
  double at(Bindings& bind) const { return is_const ? value : e.eval(bind); }
};

struct SampledProblem {
  int dim;
  std::vector<FieldSampler> A, b, gamma;
  FieldSampler f, g, psi, dpsi;

  explicit SampledProblem(const LinearCoeffs& c, const BoundaryOperatorSpec& bop,
                          const DomainSpec& dom)
      : dim(c.dim) {
    for (const Expr& e : c.A) A.emplace_back(e);
    for (const Expr& e : c.b) b.emplace_back(e);
    f = FieldSampler(c.f);
    for (const Expr& e : bop.gamma) gamma.emplace_back(e);
    g = FieldSampler(bop.g);
    if (dim == 2 && !dom.flat()) {
      psi = FieldSampler(dom.psi);
      // psi' sampled by the same centered difference step as the assembler
      dpsi.is_const = false;
    }
  }
};

struct Accumulators {
  std::vector<double>* int_f;
  std::vector<double>* int_g;
  std::vector<double>* k;
};

// One path; `snap` is called as snap(horizon_index) each time the running time
// crosses a horizon (ascending). Returns (int_f, int_g, k_T).
template <typename Snap>
void run_path(const SampledProblem& sp, const DomainSpec& dom, const VectorXd& x0,
              const McOptions& opt, std::uint64_t path_index,
              const std::vector<double>& horizons, Snap snap, double& int_f,
              double& int_g, double& k_acc) {
  std::mt19937_64 rng(splitmix64(opt.seed * 0x2545f4914f6cdd1dULL + path_index));
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const int dim = sp.dim;
  const double dt = opt.dt;
  const double sdt = std::sqrt(dt);
  const long steps = std::lround(opt.T / dt);

  double X0 = x0.size() > 0 ? x0[0] : 0.5;
  double X1 = dim == 2 ? (x0.size() > 1 ? x0[1] : 0.5) : 0.0;
  // 1D state: X0 is the height; 2D: (X0 tangential, X1 height)
  int_f = 0.0;
  int_g = 0.0;
  k_acc = 0.0;
  std::size_t next_h = 0;

  Bindings bind;
  auto set_bind = [&](double t, double z) {
    if (dim == 1) {
      bind["y1"] = z;
      bind["x1"] = 0.0;
    } else {
      bind["y1"] = t;
      bind["y2"] = z;
      bind["x1"] = 0.0;
      bind["x2"] = 0.0;
    }
  };

  const bool flat = dim == 1 || dom.flat();
  const double hpsi = 1e-5;
  auto psi_at = [&](double t) {
    if (flat) return 0.0;
    bind["y1"] = t;
    return sp.psi.e.eval(bind);
  };
  auto dpsi_at = [&](double t) {
    if (flat) return 0.0;
    return (psi_at(t + hpsi) - psi_at(t - hpsi)) / (2 * hpsi);
  };

  for (long s = 0; s < steps; ++s) {
    double t_here = dim == 2 ? X0 : 0.0;
    double z_here = dim == 2 ? X1 : X0;
    const double psi0 = psi_at(t_here);
    const double dpsi0 = dpsi_at(t_here);
    const double z_old = z_here - psi0;
    set_bind(t_here, z_here);

    // drift + diffusion proposal; sig_z2 is the noise variance rate of the
    // flattened height z = X_N - psi(X')
    double b0 = sp.b.empty() ? 0.0 : sp.b[0].at(bind);
    double b1 = dim == 2 && sp.b.size() > 1 ? sp.b[1].at(bind) : 0.0;
    double sig_z2;
    if (dim == 1) {
      const double a = sp.A[0].at(bind);
      sig_z2 = 2 * a;
      X0 += b0 * dt + std::sqrt(2 * a) * sdt * normal(rng);
    } else {
      const double a11 = sp.A[0].at(bind);
      const double a12 = sp.A[1].at(bind);
      const double a22 = sp.A[3].at(bind);
      const double l11 = std::sqrt(2 * a11);
      const double l21 = 2 * a12 / l11;
      const double l22 = std::sqrt(std::max(2 * a22 - l21 * l21, 0.0));
      const double xi0 = normal(rng), xi1 = normal(rng);
      X0 += b0 * dt + sdt * l11 * xi0;
      X1 += b1 * dt + sdt * (l21 * xi0 + l22 * xi1);
      const double cz = l21 - dpsi0 * l11;
      sig_z2 = cz * cz + l22 * l22;
    }

    // bottom boundary: local time via the Brownian-bridge minimum of z over
    // the step (exact in law for frozen coefficients), pushed back along gamma
    double tt = dim == 2 ? X0 : 0.0;
    double psi_v = psi_at(tt);
    double z = (dim == 2 ? X1 : X0) - psi_v;
    // skip the bridge draw when the excursion probability is negligible
    if (z < 0 || z_old * z < 18.0 * sig_z2 * dt) {
      const double dz = z - z_old;
      const double bridge_min =
          0.5 * (z_old + z -
                 std::sqrt(dz * dz - 2.0 * sig_z2 * dt * std::log(unif(rng))));
      const double rise = std::max(0.0, -bridge_min);  // Skorokhod increment of z
      if (rise > 0) {
        // excursions up to ~10 step-sigmas are legitimate bridge draws; only
        // penetrations far beyond the step scale indicate dt is too coarse
        const double cap = std::max(opt.step_reject, 10.0 * std::sqrt(sig_z2 * dt));
        if (!(rise < cap))
          throw StepRejected("boundary penetration " + std::to_string(rise) +
                             " too large for dt");
        const double dpz = dpsi_at(tt);  // evaluates psi, clobbers bindings
        set_bind(tt, psi_v);
        double g0 = sp.gamma[0].at(bind);
        double g1 = dim == 2 ? sp.gamma[1].at(bind) : 0.0;
        const double gz = dim == 1 ? g0 : g1 - g0 * dpz;
        const double push = -rise / gz;  // gz < 0 by obliqueness
        if (!(push > 0))
          throw StepRejected("boundary direction degenerate during reflection");
        int_g += sp.g.at(bind) * push;  // g at the boundary foot
        if (dim == 1) {
          X0 -= push * g0;
          if (X0 < 0) X0 = 0.0;
        } else {
          X0 -= push * g0;
          X1 -= push * g1;
          const double pv = psi_at(X0);
          if (X1 < pv) X1 = pv;
        }
        k_acc += push;
      }
      z = (dim == 2 ? X1 : X0) - psi_at(dim == 2 ? X0 : 0.0);
    }
    // reflecting lid
    if (z > opt.height) {
      const double zr = 2 * opt.height - z;
      if (dim == 1)
        X0 = zr;
      else
        X1 = psi_at(X0) + zr;
    }

    set_bind(dim == 2 ? X0 : 0.0, dim == 2 ? X1 : X0);
    int_f += sp.f.at(bind) * dt;

    while (next_h < horizons.size() && (s + 1) * dt >= horizons[next_h] - 1e-12) {
      snap(next_h, k_acc);
      ++next_h;
    }
  }
}

int thread_count(const McOptions& opt) {
  if (opt.threads > 0) return opt.threads;
  unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

}  // namespace

PathBatch simulate_reflected(const LinearCoeffs& coeffs, const BoundaryOperatorSpec& bop,
                             const DomainSpec& dom, const VectorXd& x0,
                             const McOptions& opt) {
  SampledProblem sp(coeffs, bop, dom);
  PathBatch batch;
  batch.dt = opt.dt;
  batch.T = opt.T;
  batch.seed = opt.seed;
  batch.int_f.assign(opt.paths, 0.0);
  batch.int_g.assign(opt.paths, 0.0);
  batch.k_T.assign(opt.paths, 0.0);

  const int nthreads = thread_count(opt);
  std::vector<double> none;
  std::exception_ptr error;
  auto work = [&](int lo, int hi) {
    try {
      for (int p = lo; p < hi; ++p)
        run_path(sp, dom, x0, opt, static_cast<std::uint64_t>(p), none,
                 [](std::size_t, double) {}, batch.int_f[p], batch.int_g[p],
                 batch.k_T[p]);
    } catch (...) {
      error = std::current_exception();
    }
  };
  if (nthreads <= 1) {
    work(0, opt.paths);
  } else {
    std::vector<std::thread> pool;
    const int chunk = (opt.paths + nthreads - 1) / nthreads;
    for (int t = 0; t < nthreads; ++t)
      pool.emplace_back(work, t * chunk, std::min(opt.paths, (t + 1) * chunk));
    for (auto& th : pool) th.join();
  }
  if (error) std::rethrow_exception(error);

  double sum = 0.0, sq = 0.0;
  for (double k : batch.k_T) sum += k;
  batch.mean_k = sum / opt.paths;
  for (double k : batch.k_T) sq += (k - batch.mean_k) * (k - batch.mean_k);
  batch.se_k = std::sqrt(sq / (static_cast<double>(opt.paths) - 1)) /
               std::sqrt(static_cast<double>(opt.paths));
  return batch;
}

Lemma31Report lemma31_check(const LinearCoeffs& coeffs, const BoundaryOperatorSpec& bop,
                            const DomainSpec& dom, const VectorXd& x0,
                            const std::vector<double>& horizons, const McOptions& opt,
                            double slope_threshold) {
  if (horizons.size() < 2) throw std::invalid_argument("lemma31_check: need >= 2 horizons");
  SampledProblem sp(coeffs, bop, dom);
  McOptions o = opt;
  o.T = horizons.back();
  std::vector<double> sums(horizons.size(), 0.0);
  for (int p = 0; p < o.paths; ++p) {
    double f_acc, g_acc, k_acc;
    run_path(sp, dom, x0, o, static_cast<std::uint64_t>(p), horizons,
             [&](std::size_t h, double k) { sums[h] += k; }, f_acc, g_acc, k_acc);
  }
  Lemma31Report rep;
  for (std::size_t h = 0; h < horizons.size(); ++h)
    rep.growth.emplace_back(horizons[h], sums[h] / o.paths);
  const auto& [t1, m1] = rep.growth[rep.growth.size() - 2];
  const auto& [t2, m2] = rep.growth.back();
  rep.last_slope = (m2 - m1) / (t2 - t1);
  rep.diverges = rep.last_slope > slope_threshold;
  return rep;
}

MuEstimate mu_mc_estimate(const LinearCoeffs& coeffs, const BoundaryOperatorSpec& bop,
                          const DomainSpec& dom, double lambda, const VectorXd& x0,
                          const McOptions& opt, double min_denominator) {
  PathBatch batch = simulate_reflected(coeffs, bop, dom, x0, opt);
  const int n = opt.paths;
  if (batch.mean_k < min_denominator)
    throw DegenerateDenominator("mean local time " + std::to_string(batch.mean_k) +
                                " too small for the ratio estimator");
  double Sf = 0.0, Sg = 0.0, Sk = 0.0;
  for (int i = 0; i < n; ++i) {
    Sf += batch.int_f[i] + lambda * opt.T;
    Sg += batch.int_g[i];
    Sk += batch.k_T[i];
  }
  MuEstimate est;
  est.mean_k = Sk / n;
  est.mu_hat = -(Sf + Sg) / Sk;

  // jackknife over paths
  double mean_theta = 0.0;
  std::vector<double> theta(n);
  for (int i = 0; i < n; ++i) {
    const double fi = batch.int_f[i] + lambda * opt.T;
    theta[i] = -((Sf - fi) + (Sg - batch.int_g[i])) / (Sk - batch.k_T[i]);
    mean_theta += theta[i];
  }
  mean_theta /= n;
  double var = 0.0;
  for (int i = 0; i < n; ++i) var += (theta[i] - mean_theta) * (theta[i] - mean_theta);
  est.std_error = std::sqrt(var * (n - 1) / static_cast<double>(n));
  return est;
}

}  // namespace halfcell
