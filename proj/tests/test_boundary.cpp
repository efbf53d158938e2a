#include <cmath>

#include "doctest.h"
#include "halfcell/boundary_ergodic.hpp"

using namespace halfcell;

namespace {

CoefficientSet laplace_1d(double b, double g) {
  CoefficientSet set;
  set.op = OperatorSpec::linear(1, {Expr::constant(1.0)}, {Expr::constant(b)},
                                Expr::constant(0.0));
  set.bop = BoundaryOperatorSpec::oblique(1, {Expr::constant(-1.0)}, Expr::constant(g));
  set.dom.kind = DomainSpec::Kind::HalfStrip;
  set.dom.dim = 1;
  return set;
}

}  // namespace

TEST_CASE("constant data gives mu = -g exactly") {
  CoefficientSet set = laplace_1d(0.0, 0.7);
  MuResult res = mu_limit(set.op, set.bop, set.dom, 0.0);
  CHECK(std::abs(res.mu + 0.7) < 1e-6);
  CHECK(res.flag == UniquenessFlag::UniqueConsistent);
  CHECK(res.boundary_residual < 1e-4);
}

TEST_CASE("drift toward the boundary keeps the constant unique") {
  CoefficientSet set = laplace_1d(-1.0, 0.5);
  MuResult res = mu_limit(set.op, set.bop, set.dom, 0.0);
  CHECK(res.flag == UniquenessFlag::UniqueConsistent);
  CHECK(std::abs(res.mu + 0.5) < 1e-4);
  CHECK(res.r_drift < 1e-4);
}

TEST_CASE("drift away from the boundary is flagged as suspect") {
  // -u'' - u' admits bounded solutions for a range of boundary constants;
  // the schedule diagnostics must refuse to certify a unique limit
  CoefficientSet set = laplace_1d(1.0, 0.5);
  MuResult res = mu_limit(set.op, set.bop, set.dom, 0.0);
  CHECK(res.flag == UniquenessFlag::SuspectNonunique);
  CHECK(res.r_drift > 1e-2);
}

TEST_CASE("variable coefficients: mu matches the 1d flux oracle") {
  // divergence form -(a u')' with a = 2 + sin(2 pi y): integrating the
  // corrector ODE gives a constant flux a v' = C with <1/a>-weighted data;
  // with f = 0 and Neumann datum g the unique constant is -g.
  CoefficientSet set;
  set.op = OperatorSpec::linear(1, {Expr::parse("2 + sin(2*pi*y1)")},
                                {Expr::parse("2*pi*cos(2*pi*y1)")}, Expr::constant(0.0));
  set.bop = BoundaryOperatorSpec::oblique(1, {Expr::constant(-1.0)}, Expr::constant(0.3));
  set.dom.kind = DomainSpec::Kind::HalfStrip;
  set.dom.dim = 1;
  MuResult res = mu_limit(set.op, set.bop, set.dom, 0.0);
  CHECK(res.flag == UniquenessFlag::UniqueConsistent);
  CHECK(std::abs(res.mu + 0.3) < 1e-3);
}
