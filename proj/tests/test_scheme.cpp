#include <random>

#include "doctest.h"
#include "halfcell/scheme.hpp"

using namespace halfcell;

namespace {

OperatorSpec variable_1d() {
  return OperatorSpec::linear(1, {Expr::parse("2 + sin(2*pi*y1)")},
                              {Expr::parse("2*pi*cos(2*pi*y1)")},
                              Expr::parse("cos(2*pi*y1)"));
}

}  // namespace

TEST_CASE("interior assembly is monotone with hybrid drift") {
  TorusGrid grid(1, 128);
  TorusAssembly opt;
  opt.c0 = 1e-3;
  DiscreteScheme s = assemble_interior(variable_1d(), grid, opt);
  CHECK_NOTHROW(s.audit_monotone());

  // strong drift relative to h forces the upwind fallback; still monotone
  OperatorSpec strong = OperatorSpec::linear(
      1, {Expr::constant(0.01)}, {Expr::constant(5.0)}, Expr::constant(0.0));
  DiscreteScheme s2 = assemble_interior(strong, TorusGrid(1, 32), opt);
  CHECK_NOTHROW(s2.audit_monotone());
}

TEST_CASE("strip assembly over an oscillating graph is monotone") {
  DomainSpec dom;
  dom.kind = DomainSpec::Kind::OscillatingHalfPlane;
  dom.dim = 2;
  dom.psi = Expr::parse("0.2*sin(2*pi*y1)");
  OperatorSpec op = OperatorSpec::linear(
      2,
      {Expr::constant(1.0), Expr::constant(0.0), Expr::constant(0.0), Expr::constant(1.0)},
      {Expr::constant(0.0), Expr::constant(0.0)}, Expr::constant(0.0));
  BoundaryOperatorSpec bop = BoundaryOperatorSpec::oblique(
      2, {Expr::constant(0.0), Expr::constant(-1.0)}, Expr::constant(0.4));

  // max |psi'| = 0.4*pi > 1: square cells violate the rotation stencil bound,
  // the aspect helper restores it
  double rho = strip_aspect(op, dom);
  CHECK(rho > 1.0);
  int n_t = 32;
  int n_z = static_cast<int>(std::lround(2.0 * n_t / rho)) + 1;
  StripGrid grid = StripGrid::make(dom, n_t, n_z, 2.0);
  StripAssembly opt;
  opt.c0_interior = 1e-3;
  opt.c0_bottom = 1e-2;
  DiscreteScheme s = assemble_strip(op, bop, grid, opt);
  CHECK_NOTHROW(s.audit_monotone());

  StripGrid square = StripGrid::make(dom, n_t, 2 * n_t + 1, 2.0);
  CHECK_THROWS_AS(assemble_strip(op, bop, square, opt), MonotonicityViolation);
}

TEST_CASE("discrete comparison principle on 100 random source pairs") {
  TorusGrid grid(1, 64);
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::uniform_real_distribution<double> pos(0.0, 1.0);
  OperatorSpec op = variable_1d();
  for (int trial = 0; trial < 100; ++trial) {
    TorusAssembly a;
    a.c0 = 0.5;
    a.rhs_extra.resize(grid.num_nodes());
    for (double& v : a.rhs_extra) v = unif(rng);
    GridFn lo = solve_stationary(assemble_interior(op, grid, a)).u;
    for (double& v : a.rhs_extra) v += pos(rng);  // pointwise larger source
    GridFn hi = solve_stationary(assemble_interior(op, grid, a)).u;
    for (int i = 0; i < grid.num_nodes(); ++i) REQUIRE(lo[i] <= hi[i] + 1e-11);
  }
}

TEST_CASE("newton iteration resolves the gradient nonlinearity") {
  LinearCoeffs c;
  c.dim = 1;
  c.A = {Expr::constant(1.0)};
  c.b = {Expr::constant(0.0)};
  c.f = Expr::parse("cos(2*pi*y1)");
  c.hterm = Expr::parse("p1*p1/(1 + p1*p1)");
  TorusGrid grid(1, 128);
  TorusAssembly a;
  a.c0 = 1.0;
  DiscreteScheme s = assemble_interior(OperatorSpec::linear(c), grid, a);
  SolveResult res = solve_stationary(s);
  CHECK(res.residual < 1e-8);
  CHECK(res.iterations < 20);  // Newton, not a slow source lag
}
