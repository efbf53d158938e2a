#pragma once

#include <cstdint>

#include "halfcell/model.hpp"

namespace halfcell {

struct StepRejected : std::runtime_error {
  explicit StepRejected(const std::string& msg) : std::runtime_error(msg) {}
};

struct DegenerateDenominator : std::runtime_error {
  explicit DegenerateDenominator(const std::string& msg) : std::runtime_error(msg) {}
};

struct McOptions {
  double dt = 2e-4;
  double T = 10.0;
  int paths = 100000;
  std::uint64_t seed = 1;
  int threads = 0;           // 0: hardware concurrency
  double height = 4.0;       // reflecting lid above the boundary
  double step_reject = 0.5;  // boundary penetration beyond this aborts
};

// Per-path accumulators of the reflected diffusion dX = b dt + sqrt(2A) dW
// with oblique boundary pushing: on penetration the proposal is projected
// back along gamma and d|k| accumulates the push length.
struct PathBatch {
  double dt = 0.0, T = 0.0;
  std::uint64_t seed = 0;
  std::vector<double> int_f;  // per path: integral of f ds
  std::vector<double> int_g;  // per path: integral of g d|k|
  std::vector<double> k_T;    // per path: |k|_T
  double mean_k = 0.0, se_k = 0.0;
};

PathBatch simulate_reflected(const LinearCoeffs& coeffs, const BoundaryOperatorSpec& bop,
                             const DomainSpec& dom, const VectorXd& x0,
                             const McOptions& opt);

struct Lemma31Report {
  bool diverges = false;
  std::vector<std::pair<double, double>> growth;  // (horizon, mean |k|)
  double last_slope = 0.0;
};

// Tracks E|k|_T across horizons; diverges iff the last-interval growth rate
// exceeds the threshold (boundary local time keeps accumulating).
Lemma31Report lemma31_check(const LinearCoeffs& coeffs, const BoundaryOperatorSpec& bop,
                            const DomainSpec& dom, const VectorXd& x0,
                            const std::vector<double>& horizons, const McOptions& opt,
                            double slope_threshold = 0.05);

struct MuEstimate {
  double mu_hat = 0.0;
  double std_error = 0.0;
  double mean_k = 0.0;
};

// Dynamic-programming ratio estimator: mu = -(E int (f+lambda) ds +
// E int g d|k|) / E |k|_T, with jackknife standard error.
MuEstimate mu_mc_estimate(const LinearCoeffs& coeffs, const BoundaryOperatorSpec& bop,
                          const DomainSpec& dom, double lambda, const VectorXd& x0,
                          const McOptions& opt, double min_denominator = 0.05);

}  // namespace halfcell
