#pragma once

#include "halfcell/correctors.hpp"

namespace halfcell {

struct ResolutionInsufficient : std::runtime_error {
  explicit ResolutionInsufficient(const std::string& msg) : std::runtime_error(msg) {}
};

struct EpsilonOptions {
  double R_lid = 4.0;               // slow-coordinate truncation height
  int nodes_per_fast_period = 32;   // >= 16 required
  SolveOptions solve;
};

struct EpsilonSolution {
  double eps = 0.0;
  StripGrid grid;   // fast-variable grid, tangential period 1
  GridFn u;
  double sup_norm = 0.0;
};

// Oscillating problem assembled in the fast variable y = x/eps on a strip of
// height R_lid/eps with exact tangential wrapping (coefficients must not
// depend on the slow tangential coordinate):
//   -tr(A D^2 U) - b.DU + eps*scale_H*H(DU/eps) + eps^2 U = eps^2 f,
//   gamma.DU = eps*g on the bottom, homogeneous Neumann lid.
// This is the fast-variable form of the eps-problem with 1/eps drift.
EpsilonSolution solve_epsilon_problem(const OperatorSpec& op,
                                      const BoundaryOperatorSpec& bop,
                                      const DomainSpec& dom, double eps,
                                      const EpsilonOptions& opt = {});

struct EffectiveSolveOptions {
  double R_lid = 4.0;
  int nodes_per_unit = 64;
  int n_t = 16;  // tangential nodes (2D); effective data is x-constant here
  SolveOptions solve;
};

struct EffectiveSolution {
  StripGrid grid;  // slow coordinates, flat boundary
  GridFn u;
};

// Effective problem -tr(A_bar D^2 u) - b_bar.Du + u = f_bar in the half-plane
// with gamma_bar.Du = g_bar on the boundary (reoriented so the boundary
// direction is admissible for the monotone scheme).
EffectiveSolution solve_effective(const EffectiveData& eff,
                                  const EffectiveSolveOptions& opt = {});

struct ConvergenceStudy {
  std::vector<double> epsilons;
  std::vector<double> errors;     // sup over the window K per epsilon
  std::vector<double> runtimes;   // seconds per epsilon solve
  std::string reference;          // "effective" or "fine-grid eps=..."
  double window_height = 2.0;
};

struct StudyOptions {
  std::vector<double> epsilons{0.25, 0.125, 0.0625, 0.03125};
  double window_height = 2.0;   // K = {0 <= x_N <= window_height}
  double reference_eps = 0.0;   // > 0: fine-grid self-reference instead of eff
  EpsilonOptions eps_opt;
  EffectiveSolveOptions eff_opt;
};

// e(eps) = sup_K |u^eps - reference| with the reference interpolated to the
// eps-grid sample points (slow physical coordinates).
ConvergenceStudy convergence_study(const OperatorSpec& op,
                                   const BoundaryOperatorSpec& bop,
                                   const DomainSpec& dom,
                                   const EffectiveData* eff,
                                   const StudyOptions& opt = {});

}  // namespace halfcell
