#include "halfcell/halfspace_average.hpp"

#include <algorithm>
#include <cmath>

namespace halfcell {

double boundary_average(const Expr& g, const VectorXd& q, double R,
                        int nodes_per_unit) {
  if (q.size() != 2) throw std::invalid_argument("boundary_average: 2D only");
  if (std::abs(q.norm() - 1.0) > 1e-9)
    throw std::invalid_argument("boundary_average: q must be a unit vector");
  // tangent of the line q.x = 0
  const double tx = q[1], ty = -q[0];
  const long n = std::lround(2 * R * nodes_per_unit);
  const double ds = 2 * R / static_cast<double>(n);
  double sum = 0.0;
  Bindings bind;
  for (long i = 0; i < n; ++i) {
    const double s = -R + (i + 0.5) * ds;
    bind["x1"] = bind["y1"] = s * tx;
    bind["x2"] = bind["y2"] = s * ty;
    sum += g.eval(bind);
  }
  return sum / static_cast<double>(n);
}

SlopeScan slope_scan(const Expr& g, const std::vector<double>& alphas,
                     const std::vector<double>& radii, int nodes_per_unit) {
  if (radii.size() < 2) throw std::invalid_argument("slope_scan: need >= 2 radii");
  SlopeScan scan;
  for (double alpha : alphas) {
    SlopeEntry entry;
    entry.alpha = alpha;
    const double norm = std::sqrt(1.0 + alpha * alpha);
    VectorXd q(2);
    q << alpha / norm, 1.0 / norm;

    // For a rational slope p/k the trace of g along the line is periodic with
    // super-period |(k, -p)|; snapping the radius to half-multiples of it
    // makes the average R-independent (equidistribution becomes exact).
    double period = 0.0;
    for (long den = 1; den <= 64; ++den) {
      const double num = alpha * den;
      if (std::abs(num - std::lround(num)) < 1e-9 * den) {
        period = std::sqrt(static_cast<double>(den) * den +
                           static_cast<double>(std::lround(num)) * std::lround(num));
        break;
      }
    }
    for (double R : radii) {
      double Reff = R;
      if (period > 0.0)
        Reff = std::max(1.0, std::round(2.0 * R / period)) * period / 2.0;
      entry.averages.emplace_back(Reff, boundary_average(g, q, Reff, nodes_per_unit));
    }

    // least-squares fit of average(R) = limit + c/R
    double s11 = 0, s1x = 0, sxx = 0, s1y = 0, sxy = 0;
    for (const auto& [R, a] : entry.averages) {
      const double x = 1.0 / R;
      s11 += 1;
      s1x += x;
      sxx += x * x;
      s1y += a;
      sxy += x * a;
    }
    const double det = s11 * sxx - s1x * s1x;
    entry.extrapolated = (s1y * sxx - s1x * sxy) / det;
    const double c = (s11 * sxy - s1x * s1y) / det;
    for (const auto& [R, a] : entry.averages)
      entry.fit_residual =
          std::max(entry.fit_residual, std::abs(a - entry.extrapolated - c / R));
    scan.entries.push_back(std::move(entry));
  }

  const SlopeEntry* axis = nullptr;
  const SlopeEntry* tilted = nullptr;
  for (const SlopeEntry& e : scan.entries) {
    if (e.alpha == 0.0) axis = &e;
    else if (!tilted || std::abs(e.alpha) < std::abs(tilted->alpha)) tilted = &e;
  }
  if (axis && tilted)
    scan.gap = std::abs(axis->extrapolated - tilted->extrapolated);
  return scan;
}

}  // namespace halfcell
