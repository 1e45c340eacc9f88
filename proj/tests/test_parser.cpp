#include <doctest.h>

#include "jetinv/errors.hpp"
#include "jetinv/parser.hpp"

using namespace jetinv;

TEST_CASE("grammar") {
  const Expr x0 = Expr::x0(), x1 = Expr::x1(), x2 = Expr::x2();
  CHECK(parse_expression("x") == x0);
  CHECK(parse_expression("x'") == x1);
  CHECK(parse_expression("x''") == x2);
  CHECK(parse_expression("x' * x''") == x1 * x2);
  CHECK(parse_expression("-x2^2") == -(x2 * x2));
  CHECK(parse_expression("2^-1") == Expr(Rational(1, 2)));
  CHECK(parse_expression("x2^(3/2)") == pow(x2, Exponent(3, 2)));
  CHECK(parse_expression("x2^(-1/3)") == pow(x2, Exponent(-1, 3)));
  CHECK(parse_expression("1 - 2 - 3") == Expr(-4));
  CHECK(parse_expression("12/3/2") == Expr(2));
  CHECK(parse_expression("2*3^2") == Expr(18));
  CHECK(parse_expression("0.125") == Expr(Rational(1, 8)));
  CHECK(parse_expression("  t\n + 1 ") == Expr::t() + 1);
  CHECK(parse_expression("sqrt(x0)") == sqrt(x0));
}

TEST_CASE("render reads back") {
  for (const char *s :
       {"0", "-6*x2", "x2^(3/2)", "t - x0/2", "1/(x1 + 1)",
        "24*x2^3/(-3 + sqrt(9 - 2*x1*x2))^3", "(x0 + 1)^(-1/2)*t"}) {
    const Expr e = parse_expression(s);
    CHECK(parse_expression(render(e)) == e);
    CHECK(render(parse_expression(render(e))) == render(e));
  }
  CHECK(render(parse_expression("x2^3*(-2)")) == "-2*x2^3");
}

TEST_CASE("syntax errors carry a position") {
  try {
    parse_expression("x0 + * 2");
    FAIL("expected a syntax error");
  } catch (const SyntaxError &e) {
    CHECK(e.kind() == "SyntaxError");
    CHECK(e.offset() == 5);
    CHECK(e.line() == 1);
    CHECK(e.column() == 6);
  }
  try {
    parse_expression("t +\n y");
    FAIL("expected an unknown symbol");
  } catch (const UnknownSymbol &e) {
    CHECK(e.line() == 2);
    CHECK(e.column() == 2);
  }
  CHECK_THROWS_AS(parse_expression("x2^1.5"), BadExponent);
  CHECK_THROWS_AS(parse_expression("x2^(x1)"), BadExponent);
  CHECK_THROWS_AS(parse_expression("(x0 + 1"), SyntaxError);
  CHECK_THROWS_AS(parse_expression("2 x0"), SyntaxError);
  CHECK_THROWS_AS(parse_expression(""), SyntaxError);
  CHECK_THROWS_AS(parse_expression("1/0"), SyntaxError);
}

TEST_CASE("transformations") {
  const PointMap m = parse_transformation("t", "x + t^3", "t", "x - t^3");
  CHECK(m.multiplier() == Expr(1));
  CHECK_THROWS_AS(parse_transformation("t + x'", "x", "t - x'", "x"),
                  DependsOnJetVariables);
  CHECK_THROWS_AS(parse_transformation("t", "2*x", "t", "x"), InverseMismatch);
}
