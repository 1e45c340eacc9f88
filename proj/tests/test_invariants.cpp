#include <doctest.h>

#include <random>

#include "jetinv/errors.hpp"
#include "jetinv/invariants.hpp"
#include "jetinv/parser.hpp"
#include "random_poly.hpp"

using namespace jetinv;

namespace {

Equation E(const char *s) { return parse_equation(s); }
Expr P(const char *s) { return parse_expression(s); }

} // namespace

// Hand computation for F = x2^3: F_2 = 3 x2^2, X(F_2) = 6 x2^4,
// X^2(F_2) = 24 x2^6, so K0 = (16 - 12 + 2) x2^6; F_22 = 6 x2 and
// X^2(F_22) = 18 x2^5.
TEST_CASE("invariants of x''' = (x'')^3") {
  InvariantSet s(E("x2^3"));
  CHECK(s.k1() == P("-3*x2^4"));
  CHECK(s.w().is_zero());
  CHECK(s.k0() == P("6*x2^6"));
  CHECK(s.c() == P("18*x2^5"));
  CHECK(s.third_derivative() == Expr(6));
  CHECK(s.psi() == P("-6*x2"));
  CHECK(s.i1() == P("-36*x2^2"));
  CHECK(s.i2() == Expr(-6));
}

TEST_CASE("invariants of x''' = (x'')^(3/2)") {
  InvariantSet s(E("x2^(3/2)"));
  CHECK(s.k1().is_zero());
  CHECK(s.w().is_zero());
  CHECK(s.psi().is_zero());
  CHECK(s.i1().is_zero());
  CHECK(s.i2().is_zero());
  CHECK(s.j0().is_zero());
  CHECK(s.j1().is_zero());
  CHECK(s.j2().is_zero());
}

TEST_CASE("free functions agree with the memoized set") {
  const Equation eq = E("x2^3 + t*x1 + x0^2");
  InvariantSet s(eq);
  CHECK(wunschmann(eq) == s.w());
  CHECK(cartan(eq) == s.c());
  CHECK(k_invariants(eq).k1 == s.k1());
  CHECK(k_invariants(eq).residual.is_zero());
  CHECK(psi(eq) == s.psi());
  CHECK(i_coefficients(eq).i2 == s.i2());
}

TEST_CASE("psi is undefined on the trivializable branch") {
  CHECK_THROWS_AS(psi(E("x2^2 + x0")), TrivializableBranch);
  InvariantSet s(E("0"));
  CHECK(s.trivializable_symbolically());
  CHECK_THROWS_AS(s.psi(), TrivializableBranch);
}

TEST_CASE("identities between invariants") {
  std::mt19937_64 rng(41);
  for (int k = 0; k < 5; ++k) {
    InvariantSet s(Equation(
        testing::random_polynomial(rng, {.force_cubic_x2 = true})));
    CHECK(s.residual_w_k().is_zero());
    CHECK(s.residual_c_k().is_zero());
    CHECK(s.residual_c_j().is_zero());
  }
}

TEST_CASE("the 3-form two ways") {
  std::mt19937_64 rng(42);
  for (int k = 0; k < 3; ++k) {
    InvariantSet s(Equation(
        testing::random_polynomial(rng, {.force_cubic_x2 = true})));
    CHECK(s.i_form() == s.i_form_from_coefficients());
  }
  InvariantSet s(E("x2^3"));
  CHECK_FALSE(s.i_form().is_zero());
  CHECK(s.i_form().degree() == 3);
  CHECK(s.j_form().degree() == 2);
}

TEST_CASE("decision table") {
  using C = Classification;
  CHECK(decide(true, false, false, false, false) == C::PointTrivializable);
  CHECK(decide(false, false, true, true, true) == C::NotWunschmann);
  CHECK(decide(false, true, false, true, true) == C::EinsteinWeylNotHyperCR);
  CHECK(decide(false, true, false, true, false) ==
        C::WunschmannNotEinsteinWeyl);
  CHECK(decide(false, true, true, false, true) == C::EinsteinWeylNotHyperCR);
  CHECK(decide(false, true, true, false, false) ==
        C::WunschmannNotEinsteinWeyl);
  CHECK(decide(false, true, true, true, true) == C::HyperCREinsteinWeyl);
  CHECK(to_string(C::HyperCREinsteinWeyl) == "HyperCREinsteinWeyl");
}

TEST_CASE("classification") {
  const SamplePlan plan;
  {
    const auto r = classify(E("0"), plan);
    CHECK(r.classification == Classification::PointTrivializable);
    CHECK_FALSE(r.i.defined);
    CHECK_FALSE(r.j.defined);
    CHECK(r.w.verdict.status == ZeroVerdict::Status::SymbolicZero);
  }
  {
    const auto r = classify(E("x2^3"), plan);
    CHECK(r.classification == Classification::WunschmannNotEinsteinWeyl);
    CHECK(r.c.verdict.status == ZeroVerdict::Status::NonZero);
    CHECK(r.c.verdict.witness.has_value());
  }
  {
    const auto r = classify(E("x2^(3/2)"), plan);
    CHECK(r.classification == Classification::HyperCREinsteinWeyl);
    CHECK(r.j_valid);
    REQUIRE(r.cartan_consistent.has_value());
    CHECK(*r.cartan_consistent);
    CHECK(r.residuals.size() == 3);
  }
  {
    const auto r = classify(E("x2^3 + x0"), plan);
    CHECK(r.w.verdict.status == ZeroVerdict::Status::NonZero);
    CHECK(r.classification == Classification::NotWunschmann);
    CHECK_FALSE(r.j_valid);
  }
}

TEST_CASE("J validity follows W and I") {
  CHECK(j_coefficients(E("x2^(3/2)")).valid);
  CHECK_FALSE(j_coefficients(E("x2^3 + x0")).valid);
}
