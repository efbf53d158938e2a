#include <cmath>

#include "doctest.h"
#include "halfcell/halfspace_average.hpp"
#include "halfcell/mc.hpp"

using namespace halfcell;

TEST_CASE("boundary averages of simple data") {
  VectorXd q(2);
  q << 0.0, 1.0;
  CHECK(boundary_average(Expr::constant(0.3), q, 20.0) == doctest::Approx(0.3));
  // along the x1-axis, cos(2 pi x2) is identically 1
  CHECK(boundary_average(Expr::parse("cos(2*pi*x2)"), q, 20.0) ==
        doctest::Approx(1.0).epsilon(1e-6));
  // tilted line: the average decays towards the space average 0
  VectorXd qt(2);
  qt << 0.2, 1.0;
  qt.normalize();
  CHECK(std::abs(boundary_average(Expr::parse("cos(2*pi*x2)"), qt, 400.0)) < 2e-2);
}

TEST_CASE("slope scan exposes the discontinuity at slope zero") {
  SlopeScan scan = slope_scan(Expr::parse("cos(2*pi*x2)"), {0.0, 0.2},
                              {10.0, 20.0, 40.0, 80.0}, 64);
  CHECK(std::abs(scan.gap - 1.0) < 1e-2);
}

TEST_CASE("monte carlo runs are deterministic per seed") {
  LinearCoeffs c;
  c.dim = 1;
  c.A = {Expr::constant(1.0)};
  c.b = {Expr::constant(0.0)};
  c.f = Expr::constant(0.0);
  BoundaryOperatorSpec bop =
      BoundaryOperatorSpec::oblique(1, {Expr::constant(-1.0)}, Expr::constant(0.0));
  DomainSpec dom;
  dom.kind = DomainSpec::Kind::HalfStrip;
  dom.dim = 1;
  VectorXd x0(1);
  x0[0] = 0.5;
  McOptions opt;
  opt.dt = 1e-2;
  opt.T = 2.0;
  opt.paths = 500;
  opt.seed = 11;
  opt.threads = 1;
  PathBatch b1 = simulate_reflected(c, bop, dom, x0, opt);
  PathBatch b2 = simulate_reflected(c, bop, dom, x0, opt);
  CHECK(b1.mean_k == b2.mean_k);
  CHECK(b1.k_T == b2.k_T);
  // thread count must not change the per-path streams
  opt.threads = 4;
  PathBatch b4 = simulate_reflected(c, bop, dom, x0, opt);
  CHECK(b1.k_T == b4.k_T);

  opt.threads = 1;
  opt.seed = 12;
  PathBatch b3 = simulate_reflected(c, bop, dom, x0, opt);
  CHECK(b1.mean_k != b3.mean_k);
}

TEST_CASE("local time of reflected brownian motion matches the law") {
  LinearCoeffs c;
  c.dim = 1;
  c.A = {Expr::constant(1.0)};
  c.b = {Expr::constant(0.0)};
  c.f = Expr::constant(0.0);
  BoundaryOperatorSpec bop =
      BoundaryOperatorSpec::oblique(1, {Expr::constant(-1.0)}, Expr::constant(0.0));
  DomainSpec dom;
  dom.kind = DomainSpec::Kind::HalfStrip;
  dom.dim = 1;
  VectorXd x0 = VectorXd::Zero(1);
  McOptions opt;
  opt.dt = 5e-3;
  opt.T = 1.0;
  opt.paths = 4000;
  opt.seed = 5;
  opt.threads = 1;
  opt.height = 10.0;
  PathBatch b = simulate_reflected(c, bop, dom, x0, opt);
  const double oracle = 2.0 * std::sqrt(opt.T / M_PI);  // E|k|_T from zero start
  CHECK(std::abs(b.mean_k - oracle) < 4.0 * b.se_k);
}
