#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "jetinv/jet.hpp"
#include "jetinv/sampling.hpp"

namespace jetinv {

/// The transformed equation x~''' = F~ in the new coordinates.
Equation apply(const PointMap &map, const Equation &eq);

enum class Rule {
  K1Rule,
  IScaling,
  JScaling,
  WVanishing,
  TrivialityPreservation,
};

std::string_view to_string(Rule r);

struct SampleResidual {
  JetPoint point;  // in the old coordinates
  double residual = 0;
};

/// Pointwise comparison of a transformation rule at samples drawn in the old
/// coordinates. Residuals are absolute.
struct InvarianceCheck {
  Rule rule = Rule::K1Rule;
  Equation equation{Expr()};  // the source equation
  PointMap map = PointMap::identity();
  double tolerance = 0;
  std::vector<SampleResidual> residuals;
  /// Largest residual; on failure, the witness.
  std::optional<SampleResidual> worst;
  /// Whether the compared quantity was zero without sampling (only for the
  /// vanishing rules).
  bool symbolic = false;
  bool passed = false;
};

/// K1(F~) at the image point against
/// g^-2 K1(F) + 2 g^-3 X_F^2(g) - 3 g^-4 X_F(g)^2 at the source point.
InvarianceCheck check_k1_rule(const Equation &eq, const PointMap &map,
                              const SamplePlan &plan);

enum class FormKind { I, J };

/// Pullback of the form of F~ against g^2 I(F) or g^-1 J(F), coefficient by
/// coefficient. For J, throws PreconditionViolated unless W and I of `eq`
/// have zero verdicts.
InvarianceCheck check_form_scaling(const Equation &eq, const PointMap &map,
                                   FormKind which, const SamplePlan &plan);

/// W(F~) at image points, for an equation with W = 0.
InvarianceCheck check_w_vanishing(const Equation &eq, const PointMap &map,
                                  const SamplePlan &plan);

/// The image of x''' = 0 keeps d^3F~/dx2~^3 = 0 and W(F~) = 0.
InvarianceCheck check_triviality_preservation(const PointMap &map,
                                              const SamplePlan &plan);

struct NamedMap {
  std::string name;
  std::string t_new, x_new, t_old, x_old;

  PointMap build(const SamplePlan &check = SamplePlan{}) const;
};

/// Identity, x~ = x + t^3, the Moebius map t~ = (2t + 1)/(t + 1) and the
/// mixing map t~ = t + x, each with its inverse.
const std::vector<NamedMap> &fixture_maps();

} // namespace jetinv
