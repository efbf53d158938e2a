#pragma once

#include "halfcell/model.hpp"

namespace halfcell {

// Average of g along the boundary line q.x = 0 within radius R, by composite
// midpoint quadrature. q is a unit vector in the plane.
double boundary_average(const Expr& g, const VectorXd& q, double R,
                        int nodes_per_unit = 64);

struct SlopeEntry {
  double alpha = 0.0;          // slope parameter: q = (alpha, 1)/norm
  std::vector<std::pair<double, double>> averages;  // (R, average)
  double extrapolated = 0.0;   // fit average(R) = limit + c/R
  double fit_residual = 0.0;
};

struct SlopeScan {
  std::vector<SlopeEntry> entries;
  double gap = 0.0;  // |value(alpha = 0) - value(smallest nonzero alpha)|
};

// Scans slopes alpha (0 must be included); per alpha extrapolates the radius
// schedule to R -> infinity and reports the discontinuity gap between the
// axis-aligned average and the tilted limit.
SlopeScan slope_scan(const Expr& g, const std::vector<double>& alphas,
                     const std::vector<double>& radii, int nodes_per_unit = 64);

}  // namespace halfcell
