#include <doctest.h>

#include "jetinv/errors.hpp"
#include "jetinv/invariants.hpp"
#include "jetinv/parser.hpp"
#include "jetinv/transform.hpp"

using namespace jetinv;

namespace {

Equation E(const char *s) { return parse_equation(s); }

} // namespace

TEST_CASE("fixture maps") {
  const auto &maps = fixture_maps();
  REQUIRE(maps.size() == 4);
  CHECK(maps[0].name == "identity");
  for (const auto &m : maps) {
    CHECK_NOTHROW(m.build());
  }
  CHECK(to_string(Rule::K1Rule) == "K1-rule");
  CHECK(to_string(Rule::TrivialityPreservation) == "triviality-preservation");
}

TEST_CASE("apply is prolong") {
  const PointMap shift = fixture_maps()[1].build();
  CHECK(apply(shift, E("0")).rhs() == Expr(6));
  CHECK(apply(shift, E("x2^3")).rhs() == parse_expression("(x2 - 6*t)^3 + 6"));
}

TEST_CASE("transformation rules on the fixture maps") {
  const SamplePlan plan;
  for (const auto &named : fixture_maps()) {
    CAPTURE(named.name);
    const PointMap map = named.build(plan);
    for (const char *f : {"x2^3", "x2^(3/2)"}) {
      CAPTURE(f);
      const auto k1 = check_k1_rule(E(f), map, plan);
      CHECK(k1.passed);
      CHECK(k1.residuals.size() == plan.count);
      CHECK(check_form_scaling(E(f), map, FormKind::I, plan).passed);
      CHECK(check_w_vanishing(E(f), map, plan).passed);
    }
    CHECK(check_form_scaling(E("x2^(3/2)"), map, FormKind::J, plan).passed);
    const auto triv = check_triviality_preservation(map, plan);
    CHECK(triv.passed);
    CHECK(triv.rule == Rule::TrivialityPreservation);
  }
}

TEST_CASE("a wrong rule is caught") {
  // W is a relative invariant, so W(F~) stays nonzero when W(F) is.
  const SamplePlan plan;
  const PointMap moebius = fixture_maps()[2].build(plan);
  const auto r = check_w_vanishing(E("x2^3 + x0"), moebius, plan);
  CHECK_FALSE(r.passed);
  REQUIRE(r.worst.has_value());
  CHECK(r.worst->residual > plan.tolerance);
}

TEST_CASE("J scaling needs W = I = 0") {
  const SamplePlan plan;
  CHECK_THROWS_AS(check_form_scaling(E("x2^3"), PointMap::identity(),
                                     FormKind::J, plan),
                  PreconditionViolated);
}
