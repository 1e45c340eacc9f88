#include <doctest.h>

#include <cmath>
#include <random>

#include "jetinv/bigfloat.hpp"
#include "jetinv/errors.hpp"
#include "jetinv/expr.hpp"
#include "jetinv/parser.hpp"
#include "random_poly.hpp"

using namespace jetinv;

namespace {

Expr P(const char *s) { return parse_expression(s); }

JetPoint point(Rational t, Rational x0, Rational x1, Rational x2) {
  return JetPoint{{t, x0, x1, x2}};
}

// Random rational function with radicals, for round trips through the
// canonical form.
Expr random_mixed(std::mt19937_64 &rng) {
  const Expr p = testing::random_polynomial(rng, {1, 3});
  const Expr q = testing::random_polynomial(rng, {1, 2});
  return p + sqrt(Expr::x1() * Expr::x1() + 1) * q +
         p / (Expr::x2() * Expr::x2() + 2);
}

} // namespace

TEST_CASE("rational helpers") {
  CHECK(exact_root(Rational(27, 8), 3) == Rational(3, 2));
  CHECK(exact_root(Rational(-8), 3) == Rational(-2));
  CHECK_FALSE(exact_root(Rational(2), 2).has_value());
  CHECK_FALSE(exact_root(Rational(-4), 2).has_value());
  CHECK(rational_pow(Rational(2, 3), -2) == Rational(9, 4));
  CHECK(rational_pow(Rational(5), 0) == 1);
  CHECK_THROWS_AS(rational_pow(Rational(0), -1), DivisionByZero);
}

TEST_CASE("exponent arithmetic stays reduced") {
  CHECK(Exponent(2, 4) == Exponent(1, 2));
  CHECK(Exponent(1, 2) + Exponent(1, 3) == Exponent(5, 6));
  CHECK(Exponent(3, 2) * Exponent(2, 3) == Exponent(1));
  CHECK(Exponent(-1, 2) < Exponent(1, 3));
  CHECK((-Exponent(3, 4)).is_negative());
  CHECK(Exponent(4).is_natural());
  CHECK_FALSE(Exponent(-1).is_natural());
}

TEST_CASE("canonical form") {
  const Expr x = Expr::x0(), y = Expr::x1();
  CHECK(x + x == 2 * x);
  CHECK(x - x == Expr());
  CHECK(x * y == y * x);
  CHECK(pow(x + 1, 2) == x * x + 2 * x + 1);
  CHECK((x + y) * (x - y) == x * x - y * y);
  CHECK(x / x == Expr(1));
  CHECK(pow(Expr(4), Exponent(1, 2)) == Expr(2));
  CHECK(sqrt(x) * sqrt(x) == x);
  CHECK(pow(sqrt(x + 1), 4) == pow(x + 1, 2));
  CHECK(Expr(Rational(1, 2)) + Expr(Rational(1, 2)) == Expr(1));
  CHECK(P("0*t").is_zero());
  CHECK(P("3").constant_value() == Rational(3));
  CHECK_FALSE(P("t").constant_value().has_value());
}

TEST_CASE("dependencies") {
  const Expr e = P("t*x2 + sqrt(x1^2 + 1)");
  CHECK(e.depends_on(Var::t));
  CHECK(e.depends_on(Var::x1));
  CHECK(e.depends_on(Var::x2));
  CHECK_FALSE(e.depends_on(Var::x0));
}

TEST_CASE("simplify is idempotent and preserves the canonical form") {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 20; ++k) {
    const Expr e = random_mixed(rng);
    const Expr s = simplify(e);
    CHECK(s == e);
    CHECK(simplify(s) == s);
  }
}

TEST_CASE("render and parse round trip") {
  std::mt19937_64 rng(12);
  for (int k = 0; k < 20; ++k) {
    const Expr e = random_mixed(rng);
    CHECK(parse_expression(render(e)) == e);
  }
}

TEST_CASE("derivatives") {
  const Expr x = Expr::x0();
  CHECK(diff(P("x0^3"), Var::x0) == 3 * x * x);
  CHECK(diff(P("t*x0"), Var::x1).is_zero());
  CHECK(diff(Expr(7), Var::t).is_zero());
  CHECK(diff(sqrt(x), Var::x0) == pow(x, Exponent(-1, 2)) / 2);
  CHECK(diff(P("1/(x0 + 1)"), Var::x0) == -pow(x + 1, -2));
  CHECK(diff(P("x0^5"), Var::x0, 3) == 60 * x * x);
  CHECK(diff(P("x0^2"), Var::x0, 3).is_zero());
  // Mixed partials commute.
  const Expr e = P("sqrt(t*x0 + x1^2 + 1) / (x2^2 + 1)");
  CHECK(diff(diff(e, Var::t), Var::x2) == diff(diff(e, Var::x2), Var::t));
}

TEST_CASE("derivative rules hold on random expressions") {
  std::mt19937_64 rng(13);
  for (int k = 0; k < 10; ++k) {
    const Expr a = random_mixed(rng), b = random_mixed(rng);
    for (Var v : kJetVars) {
      CHECK(diff(a * b, v) == diff(a, v) * b + a * diff(b, v));
      CHECK(diff(a + b, v) == diff(a, v) + diff(b, v));
    }
  }
}

TEST_CASE("derivatives agree with central differences") {
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> coord(-1.5, 1.5);
  for (int k = 0; k < 10; ++k) {
    const Expr e = random_mixed(rng);
    FloatPoint p{coord(rng), coord(rng), coord(rng), coord(rng)};
    for (Var v : kJetVars) {
      const double h = 1e-5;
      FloatPoint lo = p, hi = p;
      lo[index_of(v)] -= h;
      hi[index_of(v)] += h;
      const double fd = (eval_float(e, hi) - eval_float(e, lo)) / (2 * h);
      const double exact = eval_float(diff(e, v), p);
      CHECK(std::abs(fd - exact) <= 1e-6 * (1 + std::abs(exact)));
    }
  }
}

TEST_CASE("substitution") {
  Bindings b;
  b[index_of(Var::x0)] = P("t + 1");
  CHECK(substitute(P("x0^2 + x1"), b) == P("t^2 + 2*t + 1 + x1"));
  CHECK(substitute(P("sqrt(x0)"), b) == P("sqrt(t + 1)"));
  // Substitution commutes with evaluation.
  const Expr e = P("x0/(x0 + x2^2 + 1)");
  const JetPoint p = point(2, 0, 5, 3);
  CHECK(eval_exact(substitute(e, b), p) == eval_exact(e, point(2, 3, 5, 3)));
}

TEST_CASE("exact evaluation") {
  CHECK(eval_exact(P("x0/2 + x1^2"), point(0, 1, 3, 0)) == Rational(19, 2));
  CHECK(eval_exact(P("sqrt(x2)"), point(0, 0, 0, Rational(9, 4))) ==
        Rational(3, 2));
  CHECK_THROWS_AS(eval_exact(P("sqrt(x2)"), point(0, 0, 0, 2)),
                  NonRationalOperation);
  CHECK_THROWS_AS(eval_exact(P("1/x0"), point(0, 0, 0, 0)), DivisionByZero);
  CHECK_THROWS_AS(eval_exact(P("sqrt(x0)"), point(0, -1, 0, 0)), DomainError);
}

TEST_CASE("floating and MPFR evaluation agree") {
  const Expr e = P("sqrt(9 - 2*x1*x2) / (x0^2 + 1) + t^3");
  const JetPoint p = point(Rational(1, 3), Rational(-2, 7), Rational(1, 2), 1);
  const double f = eval_float(e, p);
  PrecisionScope scope(200);
  std::array<BigFloat, 4> q;
  for (int i = 0; i < 4; ++i) {
    q[i] = BigFloat(p.coords[i]);
  }
  CHECK(std::abs(eval_big(e, q).to_double() - f) < 1e-14);
  const PreciseValue pv = eval_precise(e, p);
  CHECK(std::abs(static_cast<double>(pv.value) - f) < 1e-14);
  CHECK(pv.error < 1e-60);
}

TEST_CASE("Laurent normal form cancels a linear factor") {
  const Expr x = Expr::x1();
  // x/(x + 1) = 1 - 1/(x + 1) and x^2/(2x - 1) is a polynomial plus a pole.
  CHECK(x * pow(x + 1, -1) == 1 - pow(x + 1, -1));
  CHECK(x * x / (2 * x - 1) == x / 2 + Rational(1, 4) + pow(2 * x - 1, -1) / 4);
  const Expr e = P("x1^3/(x1 + 2)^2 - x1");
  const JetPoint p = point(0, 0, Rational(5, 3), 0);
  CHECK(eval_exact(e, p) ==
        Rational(125, 27) / Rational(121, 9) - Rational(5, 3));
}

TEST_CASE("radicals over a common denominator keep their value") {
  const Expr e = P("sqrt(x1 + 1/x2) * (x1^2 + 1/x2)^(3/2)");
  for (const JetPoint &p :
       {point(0, 0, 2, 3), point(0, 0, Rational(1, 2), Rational(7, 5))}) {
    const double x1 = p.coords[2].get_d(), x2 = p.coords[3].get_d();
    const double ref =
        std::sqrt(x1 + 1 / x2) * std::pow(x1 * x1 + 1 / x2, 1.5);
    CHECK(std::abs(eval_float(e, p) - ref) < 1e-12 * ref);
  }
}

TEST_CASE("domain guards") {
  const auto guards = domain_guards(P("sqrt(9 - 2*x1*x2) + 1/x0"));
  REQUIRE(guards.size() == 2);
  bool positive = false, nonzero = false;
  for (const auto &g : guards) {
    positive |= g.kind == DomainGuard::Kind::Positive &&
                g.expr == P("9 - 2*x1*x2");
    nonzero |= g.kind == DomainGuard::Kind::NonZero && g.expr == Expr::x0();
  }
  CHECK(positive);
  CHECK(nonzero);
  CHECK(domain_guards(P("x0^3 + sqrt(2)")).empty());
}

TEST_CASE("expression size guard") {
  const std::size_t saved = expression_size_limit();
  set_expression_size_limit(200);
  CHECK_THROWS_AS(pow(P("t + x0 + x1 + x2 + 1"), 6), ExpressionTooLarge);
  set_expression_size_limit(saved);
  CHECK_NOTHROW(pow(P("t + x0 + x1 + x2 + 1"), 6));
}

TEST_CASE("gradient evaluation matches symbolic partials") {
  std::mt19937_64 rng(15);
  PrecisionScope scope(256);
  const JetPoint p = point(Rational(1, 3), Rational(-1, 2), Rational(3, 4), 1);
  std::array<BigFloat, 4> q;
  for (int i = 0; i < 4; ++i) {
    q[i] = BigFloat(p.coords[i]);
  }
  for (int k = 0; k < 10; ++k) {
    const Expr e = random_mixed(rng);
    const BigGradient g = eval_big_gradient(e, q);
    CHECK(abs(g.value - eval_big(e, q)).to_double() < 1e-60);
    for (Var v : kJetVars) {
      CHECK(abs(g.grad[index_of(v)] - eval_big(diff(e, v), q)).to_double() <
            1e-60);
    }
  }
  CHECK_THROWS_AS(eval_big_gradient(P("sqrt(x0)"), std::array<BigFloat, 4>{}),
                  DomainError);
}
