#include <doctest.h>

#include <random>

#include "jetinv/errors.hpp"
#include "jetinv/invariants.hpp"
#include "jetinv/jet.hpp"
#include "jetinv/parser.hpp"
#include "jetinv/transform.hpp"
#include "random_poly.hpp"

using namespace jetinv;

namespace {

Expr P(const char *s) { return parse_expression(s); }

VectorField random_field(std::mt19937_64 &rng) {
  VectorField v;
  for (auto &c : v.coef) {
    c = testing::random_polynomial(rng, {1, 2});
  }
  return v;
}

VectorField ad(const Equation &eq, const VectorField &v) {
  return lie_bracket(total_derivative_field(eq), v);
}

} // namespace

TEST_CASE("total derivative") {
  const Equation eq(P("t*x0 + x2^2"));
  CHECK(total_derivative(eq, Expr::t()) == Expr(1));
  CHECK(total_derivative(eq, Expr::x0()) == Expr::x1());
  CHECK(total_derivative(eq, Expr::x1()) == Expr::x2());
  CHECK(total_derivative(eq, Expr::x2()) == eq.rhs());
  CHECK(total_derivative(eq, P("x0*x1")) == P("x1^2 + x0*x2"));
  CHECK(iterate_total_derivative(eq, Expr::x0(), 3) == eq.rhs());
  CHECK(iterate_total_derivative(eq, Expr::x0(), 0) == Expr::x0());
}

TEST_CASE("equation partials and guards") {
  const Equation eq(P("x0*x1^2 + sqrt(x2)"));
  CHECK(eq.partial(Var::x0) == P("x1^2"));
  CHECK(eq.partial(Var::x1) == P("2*x0*x1"));
  CHECK(eq.partial(Var::x2) == P("x2^(-1/2)/2"));
  CHECK_FALSE(eq.guards().empty());
}

TEST_CASE("Lie bracket is antisymmetric and satisfies Jacobi") {
  std::mt19937_64 rng(21);
  for (int k = 0; k < 5; ++k) {
    const VectorField a = random_field(rng), b = random_field(rng),
                      c = random_field(rng);
    CHECK(lie_bracket(a, b) + lie_bracket(b, a) == VectorField{});
    CHECK(lie_bracket(a, lie_bracket(b, c)) + lie_bracket(b, lie_bracket(c, a)) +
              lie_bracket(c, lie_bracket(a, b)) ==
          VectorField{});
    // [a, b](f) = a(b(f)) - b(a(f)).
    const Expr f = testing::random_polynomial(rng);
    CHECK(lie_bracket(a, b).apply(f) == a.apply(b.apply(f)) - b.apply(a.apply(f)));
  }
}

TEST_CASE("first bracket with the vertical field") {
  const Equation eq(P("x2^3 + t*x1"));
  const VectorField v = VectorField::coordinate(Var::x2);
  const VectorField expect = Expr(-1) * VectorField::coordinate(Var::x1) -
                             eq.partial(Var::x2) * v;
  CHECK(ad(eq, v) == expect);
}

TEST_CASE("frame decomposition round trip") {
  std::mt19937_64 rng(22);
  const Equation eq(P("x0*x2 + x1^2 + t"));
  const auto frame = adapted_frame(eq);
  for (int k = 0; k < 5; ++k) {
    const Expr c0 = testing::random_polynomial(rng, {1, 2}),
               c1 = testing::random_polynomial(rng, {1, 2}),
               c2 = testing::random_polynomial(rng, {1, 2}),
               c3 = testing::random_polynomial(rng, {1, 2});
    const VectorField v =
        c0 * frame[0] + c1 * frame[1] + c2 * frame[2] + c3 * frame[3];
    const FrameCoefficients fc = decompose_in_frame(v, eq);
    CHECK(fc.vertical == c0);
    CHECK(fc.first == c1);
    CHECK(fc.second == c2);
    CHECK(fc.along_flow == c3);
  }
}

// For dF/dx2 = 0 the bracket chain is short enough to do by hand:
//   ad d2 = -d1, ad^2 d2 = d0 + F_1 d2,
//   ad^3 d2 = (X(F_1) - F_0) d2 - F_1 d1,
// so ad^3 d2 = -K0 d2 + K1 ad d2 with K1 = F_1 and K0 = F_0 - X(F_1).
TEST_CASE("third bracket for equations without x2") {
  std::mt19937_64 rng(23);
  for (int k = 0; k < 5; ++k) {
    const Equation eq(testing::random_polynomial(rng, {.without_x2 = true}));
    const Expr f0 = eq.partial(Var::x0), f1 = eq.partial(Var::x1);
    const VectorField d2 = VectorField::coordinate(Var::x2);
    const VectorField ad3 = ad(eq, ad(eq, ad(eq, d2)));
    const VectorField by_hand =
        (total_derivative(eq, f1) - f0) * d2 -
        f1 * VectorField::coordinate(Var::x1);
    CHECK(ad3 == by_hand);
    const KInvariants kk = k_invariants(eq);
    CHECK(kk.k1 == f1);
    CHECK(kk.k0 == f0 - total_derivative(eq, f1));
    const FrameCoefficients fc = decompose_in_frame(ad3, eq);
    CHECK(fc.vertical == -kk.k0);
    CHECK(fc.first == kk.k1);
    CHECK(fc.second.is_zero());
    CHECK(fc.along_flow.is_zero());
  }
}

TEST_CASE("prolongation of point maps") {
  const PointMap shift = parse_transformation("t", "x + t^3", "t", "x - t^3");
  CHECK(shift.forward()[3] == P("x2 + 6*t"));
  CHECK(prolong(shift, Equation(Expr())).rhs() == Expr(6));

  const PointMap moebius = fixture_maps()[2].build();
  CHECK(moebius.multiplier() == P("(t + 1)^(-2)"));
  const PointMap mixing = fixture_maps()[3].build();
  CHECK(mixing.multiplier() == P("1 + x1"));

  CHECK(PointMap::identity().multiplier() == Expr(1));
  CHECK(prolong(PointMap::identity(), Equation(P("x2^3"))).rhs() == P("x2^3"));
}

TEST_CASE("composition and inversion") {
  const PointMap shift = fixture_maps()[1].build();
  const PointMap moebius = fixture_maps()[2].build();
  const PointMap both = PointMap::compose(moebius, shift);
  CHECK(both.verify_round_trip(SamplePlan{}) < 1e-12);
  const PointMap back = PointMap::compose(shift.inverted(), shift);
  for (int i = 0; i < 4; ++i) {
    CHECK(back.forward()[i] == Expr::variable(kJetVars[i]));
  }
  // Prolongation is functorial.
  const Equation eq(P("x2^3 + x0"));
  const Equation two_steps = prolong(moebius, prolong(shift, eq));
  const Equation one_step = prolong(both, eq);
  CHECK(is_zero(two_steps.rhs() - one_step.rhs(), SamplePlan{}).zero());
}

TEST_CASE("invalid point maps") {
  CHECK_THROWS_AS(parse_transformation("1", "x", "t", "x"), DivisionByZero);
  CHECK_THROWS_AS(parse_transformation("t", "x^3 + 1", "t", "x"),
                  InverseMismatch);
}
