#include <doctest.h>

#include <bit>
#include <random>

#include <Eigen/LU>

#include "jetinv/bigfloat.hpp"
#include "jetinv/errors.hpp"
#include "jetinv/forms.hpp"
#include "jetinv/parser.hpp"
#include "jetinv/transform.hpp"
#include "random_poly.hpp"

using namespace jetinv;

namespace {

Form random_form(std::mt19937_64 &rng, int degree) {
  Form f(degree);
  for (Form::Basis b = 0; b < 16; ++b) {
    if (std::popcount(b) == degree && rng() % 3 != 0) {
      f.add(b, testing::random_polynomial(rng, {1, 2}));
    }
  }
  return f;
}

int sign_of_degree(int k) { return k % 2 == 0 ? 1 : -1; }

} // namespace

TEST_CASE("basis signs") {
  CHECK(wedge_sign(0b0001, 0b0010) == 1);
  CHECK(wedge_sign(0b0010, 0b0001) == -1);
  CHECK(wedge_sign(0b0011, 0b0001) == 0);
  CHECK(wedge_sign(0b0100, 0b0011) == 1);
  CHECK(wedge_sign(0b1000, 0b0111) == -1);
  const Form w = wedge(Form::differential(Var::x1), Form::differential(Var::t));
  CHECK(w.coefficient({0, 2}) == Expr(-1));
  CHECK(w.coefficient({2, 0}) == Expr(1));
  CHECK(w.coefficient({2, 2}).is_zero());
}

TEST_CASE("degree overflow") {
  std::mt19937_64 rng(30);
  CHECK_THROWS_AS(wedge(random_form(rng, 3), random_form(rng, 2)),
                  DegreeOverflow);
}

TEST_CASE("exterior algebra identities") {
  std::mt19937_64 rng(31);
  for (int k = 0; k < 4; ++k) {
    const Form f0 = random_form(rng, 0), a = random_form(rng, 1),
               b = random_form(rng, 1), c = random_form(rng, 2);
    // d^2 = 0
    CHECK(exterior_derivative(exterior_derivative(f0)).is_zero());
    CHECK(exterior_derivative(exterior_derivative(a)).is_zero());
    CHECK(exterior_derivative(exterior_derivative(c)).is_zero());
    // Leibniz rule
    CHECK(exterior_derivative(wedge(a, c)) ==
          wedge(exterior_derivative(a), c) +
              sign_of_degree(1) * Expr(1) * wedge(a, exterior_derivative(c)));
    CHECK(exterior_derivative(wedge(c, a)) ==
          wedge(exterior_derivative(c), a) + wedge(c, exterior_derivative(a)));
    // Associativity and graded commutativity
    CHECK(wedge(wedge(a, b), c) == wedge(a, wedge(b, c)));
    CHECK(wedge(a, b) == Expr(-1) * wedge(b, a));
    CHECK(wedge(a, c) == wedge(c, a));
    CHECK(wedge(a, a).is_zero());
  }
}

TEST_CASE("interior product") {
  std::mt19937_64 rng(32);
  VectorField v;
  for (auto &c : v.coef) {
    c = testing::random_polynomial(rng, {1, 2});
  }
  for (Var x : kJetVars) {
    CHECK(contraction(Form::differential(x), v) == v[x]);
  }
  const Form c = random_form(rng, 2), a = random_form(rng, 1);
  CHECK(interior(v, interior(v, c)).is_zero());
  // Graded derivation: i_v(a ^ c) = i_v(a) c - a ^ i_v(c).
  CHECK(interior(v, wedge(a, c)) ==
        contraction(a, v) * c - wedge(a, interior(v, c)));
}

TEST_CASE("omega coframe") {
  const Equation eq(parse_expression("x2^2 + t*x0"));
  const auto w = omega_coframe(eq);
  CHECK(w[0] == Form::differential(Var::x0) -
                    Expr::x1() * Form::differential(Var::t));
  CHECK(w[2] == Form::differential(Var::x2) -
                    eq.rhs() * Form::differential(Var::t));
  CHECK(w[3] == Form::differential(Var::t));
  // The contact forms annihilate X_F.
  const VectorField x = total_derivative_field(eq);
  for (int i = 0; i < 3; ++i) {
    CHECK(contraction(w[i], x).is_zero());
  }
  std::mt19937_64 rng(33);
  for (int d = 0; d <= 4; ++d) {
    const Form a = random_form(rng, d);
    CHECK(from_omega_frame(to_omega_frame(a, eq), eq) == a);
  }
}

TEST_CASE("pullback") {
  std::mt19937_64 rng(34);
  const PointMap shift = fixture_maps()[1].build();
  for (int k = 0; k < 3; ++k) {
    const Form a = random_form(rng, 1), c = random_form(rng, 2);
    CHECK(pullback(PointMap::identity(), c) == c);
    CHECK(pullback(shift, exterior_derivative(a)) ==
          exterior_derivative(pullback(shift, a)));
    CHECK(pullback(shift, wedge(a, c)) ==
          wedge(pullback(shift, a), pullback(shift, c)));
  }
}

TEST_CASE("numeric pullback agrees with the symbolic one") {
  std::mt19937_64 rng(35);
  PrecisionScope scope(256);
  for (const auto &named : fixture_maps()) {
    const PointMap map = named.build();
    const Form c = random_form(rng, 3);
    const Form sym = pullback(map, c);
    Sampler sampler(SamplePlan{}, map.guards());
    for (int s = 0; s < 3; ++s) {
      const JetPoint p = sampler.next();
      const NumericForm numeric = pullback_at(map, c, p);
      const NumericForm direct = evaluate(sym, to_big_point(p));
      for (int b = 0; b < 16; ++b) {
        CHECK(abs(numeric.coef[b] - direct.coef[b]).to_double() < 1e-40);
      }
    }
  }
}

TEST_CASE("numeric exterior derivative and wedge") {
  std::mt19937_64 rng(36);
  PrecisionScope scope(256);
  const BigPoint q = to_big_point(
      JetPoint{{Rational(1, 2), Rational(-1, 3), Rational(2), Rational(1, 5)}});
  for (int d = 0; d <= 3; ++d) {
    const Form a = random_form(rng, d);
    const Form b = random_form(rng, 1);
    const NumericForm numeric = evaluate_derivative(a, q);
    const NumericForm direct = evaluate(exterior_derivative(a), q);
    CHECK(numeric.degree == d + 1);
    for (int k = 0; k < 16; ++k) {
      CHECK(abs(numeric.coef[k] - direct.coef[k]).to_double() < 1e-50);
    }
    const NumericForm w = wedge(evaluate(a, q), evaluate(b, q));
    const NumericForm ws = evaluate(wedge(a, b), q);
    for (int k = 0; k < 16; ++k) {
      CHECK(abs(w.coef[k] - ws.coef[k]).to_double() < 1e-50);
    }
  }
}

TEST_CASE("jet Jacobian of the prolonged map") {
  const PointMap shift = fixture_maps()[1].build();
  const BigPoint q = to_big_point(
      JetPoint{{Rational(1, 2), Rational(1), Rational(-1), Rational(3)}});
  const auto jac = jet_jacobian(shift, q);
  // x~2 = x2 + 6t, x~1 = x1 + 3t^2, x~0 = x0 + t^3.
  CHECK(jac(0, 0) == 1);
  CHECK(jac(1, 0) == doctest::Approx(0.75));
  CHECK(jac(2, 0) == doctest::Approx(3.0));
  CHECK(jac(3, 0) == doctest::Approx(6.0));
  CHECK(jac(3, 3) == 1);
  CHECK(jac.determinant() == doctest::Approx(1.0));
}
