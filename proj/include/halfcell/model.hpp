#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "halfcell/expr.hpp"

namespace halfcell {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// One linear entry: F(M,p,x,y) = -tr(A(x,y) M) - b(x,y).p - f(x,y) [+ H(p)].
// A is stored row-major, dim*dim entries; b has dim entries.
struct LinearCoeffs {
  int dim = 1;
  std::vector<Expr> A;
  std::vector<Expr> b;
  Expr f;
  std::optional<Expr> hterm;  // smooth gradient nonlinearity over p1..pN
};

struct SampledLinear {
  MatrixXd A;
  VectorXd b;
  double f;
};

struct OperatorSpec {
  enum class Kind { Linear, HJB, PucciMinus };
  Kind kind = Kind::Linear;
  int dim = 1;
  std::vector<LinearCoeffs> controls;  // size 1 for Linear, >=1 for HJB
  double pucci_kappa = 1.0;            // Pucci ellipticity bounds
  double pucci_Kappa = 1.0;
  bool singular_drift = false;  // b carries the 1/eps factor of the singular problem
  double nu = 1.0;              // declared uniform ellipticity constant

  static OperatorSpec linear(int dim, std::vector<Expr> A, std::vector<Expr> b, Expr f);
  static OperatorSpec linear(LinearCoeffs c);
  static OperatorSpec pucci(int dim, double kappa, double Kappa);
};

// L(p,x,y) = p.gamma(x,y) - g(x,y) [+ H(|p|)].
struct BoundaryOperatorSpec {
  int dim = 1;
  std::vector<Expr> gamma;
  Expr g;
  std::optional<Expr> hterm;  // nonlinear term over variable "pnorm"

  static BoundaryOperatorSpec oblique(int dim, std::vector<Expr> gamma, Expr g);
};

struct DomainSpec {
  enum class Kind { Torus, HalfStrip, OscillatingHalfPlane };
  Kind kind = Kind::Torus;
  int dim = 1;
  Expr psi;            // boundary graph over y1..y_{N-1}; empty means flat
  double height = 4.0; // strip truncation height R
  double epsilon = 1.0;

  bool flat() const { return !psi.valid(); }
  double psi_at(double t) const;
  double psi_d1(double t) const;  // centered finite differences of psi
  double psi_d2(double t) const;
};

Bindings point_bindings(const VectorXd& x, const VectorXd& y);

SampledLinear sample_linear(const LinearCoeffs& c, const VectorXd& x, const VectorXd& y);

double evaluate_operator(const OperatorSpec& op, const MatrixXd& M, const VectorXd& p,
                         const VectorXd& x, const VectorXd& y);

// Index of the maximizing control at (M,p,x,y); ties broken by lowest index.
int argmax_control(const OperatorSpec& op, const MatrixXd& M, const VectorXd& p,
                   const VectorXd& x, const VectorXd& y);

double evaluate_boundary(const BoundaryOperatorSpec& bop, const VectorXd& p,
                         const VectorXd& x, const VectorXd& y);

// Signed distance (positive inside) and outward unit normal for graph domains.
// First-order in the boundary curvature; exact when psi is flat.
struct DistanceResult {
  double d;
  VectorXd n;
};
DistanceResult signed_distance_and_normal(const DomainSpec& dom, const VectorXd& x);

struct AuditEntry {
  std::string assumption;
  bool pass;
  double margin;
  std::string detail;
};

struct AuditReport {
  std::vector<AuditEntry> entries;
  bool all_pass() const;
};

// Samples random (M, N>=0, p, x, t) tuples and checks degenerate ellipticity,
// Lipschitz difference quotients and strict obliqueness.
AuditReport audit_assumptions(const OperatorSpec& op, const BoundaryOperatorSpec& bop,
                              const DomainSpec& dom, int probes, unsigned seed = 2024);

// Full problem data: interior operator, boundary operator, domain.
struct CoefficientSet {
  OperatorSpec op;
  BoundaryOperatorSpec bop;
  DomainSpec dom;
};

}  // namespace halfcell
