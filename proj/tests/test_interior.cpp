#include <cmath>

#include "doctest.h"
#include "halfcell/interior_ergodic.hpp"

using namespace halfcell;

namespace {

// Composite-Simpson average of fn over one period.
template <typename F>
double period_average(F fn, int panels = 1 << 14) {
  double s = 0.0;
  const double h = 1.0 / panels;
  for (int i = 0; i < panels; ++i)
    s += fn(i * h) + 4.0 * fn((i + 0.5) * h) + fn((i + 1) * h);
  return s * h / 6.0;
}

}  // namespace

TEST_CASE("1d ergodic constant matches the quadrature formula") {
  // lambda = -<f/a> / <1/a> for -a(y) u'' = f(y) + lambda
  auto a = [](double y) { return 1.0 + 0.3 * std::cos(2 * M_PI * y); };
  auto f = [](double y) { return std::sin(2 * M_PI * y) + 0.25; };
  const double oracle =
      -period_average([&](double y) { return f(y) / a(y); }) /
      period_average([&](double y) { return 1.0 / a(y); });

  OperatorSpec op = OperatorSpec::linear(1, {Expr::parse("1 + 0.3*cos(2*pi*y1)")},
                                         {Expr::constant(0.0)},
                                         Expr::parse("sin(2*pi*y1) + 0.25"));
  ErgodicSolution sol = lambda_torus(op, TorusGrid(1, 512));
  CHECK(std::abs(sol.constant - oracle) < 1e-5);
  CHECK(sol.residual_sup < 1e-3);  // O(delta_min) small-discount residual
  // corrector is anchored and bounded
  CHECK(sol.corrector[0] == doctest::Approx(0.0));
}

TEST_CASE("divergence-form cell constant vanishes for all gradient offsets") {
  LinearCoeffs c;
  c.dim = 1;
  c.A = {Expr::parse("2 + sin(2*pi*y1)")};
  c.b = {Expr::parse("2*pi*cos(2*pi*y1)")};
  c.f = Expr::constant(0.0);
  TorusGrid grid(1, 1024);
  for (double p : {-1.0, 0.5, 1.0}) {
    VectorXd pv(1);
    pv[0] = p;
    ErgodicSolution sol = drift_cell_lambda(c, pv, grid);
    CHECK(std::abs(sol.constant) < 1e-5);
  }
}

TEST_CASE("e1 criterion separates the drift directions") {
  auto make = [](double b) {
    return OperatorSpec::linear(1, {Expr::constant(1.0)}, {Expr::constant(b)},
                                Expr::constant(0.0));
  };
  TorusGrid grid(1, 128);
  E1Result toward = e1_criterion(make(-1.0), grid);
  CHECK(toward.satisfied);
  CHECK(std::abs(toward.lambda_hat + 1.0) < 1e-3);

  E1Result away = e1_criterion(make(1.0), grid);
  CHECK_FALSE(away.satisfied);
  CHECK(std::abs(away.lambda_hat - 1.0) < 1e-3);
}

TEST_CASE("lambda_bar is linear in p for linear operators") {
  LinearCoeffs c;
  c.dim = 1;
  c.A = {Expr::constant(1.0)};
  c.b = {Expr::parse("sin(2*pi*y1)")};
  c.f = Expr::constant(0.0);
  std::vector<VectorXd> samples;
  for (double p : {-1.0, 0.0, 0.4, 1.0}) {
    VectorXd v(1);
    v[0] = p;
    samples.push_back(v);
  }
  LinearityReport rep = linearity_audit(c, TorusGrid(1, 256), samples);
  CHECK(rep.max_deviation < 1e-6);
}
