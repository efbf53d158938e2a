#include "doctest.h"
#include "halfcell/config.hpp"
#include "halfcell/expr.hpp"

using namespace halfcell;

TEST_CASE("expression parsing and evaluation") {
  CHECK(Expr::parse("2 + 3*4").eval({}) == doctest::Approx(14.0));
  CHECK(Expr::parse("2^3 + 1").eval({}) == doctest::Approx(9.0));
  CHECK(Expr::parse("sin(pi/2)").eval({}) == doctest::Approx(1.0));
  CHECK(Expr::parse("max(1, min(3, 2))").eval({}) == doctest::Approx(2.0));
  CHECK(Expr::parse("abs(-3.5) + floor(1.9)").eval({}) == doctest::Approx(4.5));
  CHECK(Expr::parse("exp(0) + cos(0)").eval({}) == doctest::Approx(2.0));

  Expr e = Expr::parse("2*y1 + x1");
  Bindings b{{"y1", 3.0}, {"x1", 1.0}};
  CHECK(e.eval(b) == doctest::Approx(7.0));
  auto vars = e.variables();
  REQUIRE(vars.size() == 2);
  CHECK(vars[0] == "x1");
  CHECK(vars[1] == "y1");
}

TEST_CASE("expression errors") {
  CHECK_THROWS_AS(Expr::parse("2 +"), ParseError);
  CHECK_THROWS_AS(Expr::parse("sin(1"), ParseError);
  CHECK_THROWS_AS(Expr::parse("y1 y2"), ParseError);
  CHECK_THROWS_AS(Expr::parse("1/0").eval({}), EvalError);
  CHECK_THROWS_AS(Expr::parse("y1").eval({}), EvalError);  // unbound variable
}

TEST_CASE("expression round trip through str()") {
  Expr e = Expr::parse("1 + 0.5*sin(2*pi*y1)");
  Expr round = Expr::parse(e.str());
  for (double y : {0.0, 0.13, 0.77}) {
    Bindings b{{"y1", y}};
    CHECK(round.eval(b) == doctest::Approx(e.eval(b)).epsilon(1e-14));
  }
}

TEST_CASE("periodicity defect detects non-periodic data") {
  CHECK(periodicity_defect(Expr::parse("sin(2*pi*y1)"), {"y1"}) < 1e-10);
  CHECK(periodicity_defect(Expr::parse("y1"), {"y1"}) > 0.5);
}

TEST_CASE("config parsing, lists and overrides") {
  RunConfig cfg = RunConfig::parse_text(
      "# comment\n"
      "[problem]\n"
      "dim = 1\n"
      "A = \"1 + 0.5*sin(2*pi*y1)\"\n"
      "f = \"0\"\n"
      "gamma1 = \"-1\"\n"
      "[numerics]\n"
      "grid_n = 128\n"
      "deltas = 1e-2, 5e-3\n");
  CHECK(cfg.get_int("numerics", "grid_n", 0) == 128);
  CHECK(cfg.get("problem", "A") == "1 + 0.5*sin(2*pi*y1)");
  auto deltas = cfg.get_list("numerics", "deltas", {});
  REQUIRE(deltas.size() == 2);
  CHECK(deltas[1] == doctest::Approx(5e-3));
  CHECK_THROWS_AS(cfg.require("problem", "missing"), ConfigError);

  cfg.apply_override("numerics.grid_n=256");
  CHECK(cfg.get_int("numerics", "grid_n", 0) == 256);
  cfg.apply_override("g=\"0.5\"");  // section defaults to [problem]
  CHECK(cfg.get("problem", "g") == "0.5");

  CoefficientSet set = problem_from_config(cfg);
  CHECK(set.op.dim == 1);
  CHECK(set.op.kind == OperatorSpec::Kind::Linear);
  CHECK(set.bop.gamma[0].eval({}) == doctest::Approx(-1.0));
}

TEST_CASE("config rejects malformed input") {
  CHECK_THROWS_AS(RunConfig::parse_text("[problem\ndim = 1\n"), ConfigError);
  CHECK_THROWS_AS(RunConfig::parse_text("[problem]\njust a line\n"), ConfigError);
  RunConfig cfg = RunConfig::parse_text("[problem]\ndim = 3\n");
  CHECK_THROWS_AS(problem_from_config(cfg), ConfigError);
}
