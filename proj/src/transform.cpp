#include "jetinv/transform.hpp"

#include <algorithm>
#include <functional>

#include "jetinv/bigfloat.hpp"
#include "jetinv/errors.hpp"
#include "jetinv/forms.hpp"
#include "jetinv/invariants.hpp"
#include "jetinv/parser.hpp"

namespace jetinv {

Equation apply(const PointMap &map, const Equation &eq) {
  return prolong(map, eq);
}

std::string_view to_string(Rule r) {
  switch (r) {
  case Rule::K1Rule:
    return "K1-rule";
  case Rule::IScaling:
    return "I-scaling";
  case Rule::JScaling:
    return "J-scaling";
  case Rule::WVanishing:
    return "W-vanishing";
  case Rule::TrivialityPreservation:
    return "triviality-preservation";
  }
  return "?";
}

namespace {

using Residual = std::function<BigFloat(
    const JetPoint &p, const BigPoint &src, const BigPoint &image)>;

constexpr unsigned kStartBits = 192;
constexpr unsigned kMaxBits = 4096;

// Residual at one point, recomputed at doubled precision until two
// successive values agree to well within the tolerance.
long double adaptive_residual(const PointMap &map, const JetPoint &p,
                              double tol, const Residual &residual) {
  long double previous = 0;
  for (unsigned bits = kStartBits;; bits *= 2) {
    PrecisionScope scope(bits);
    const BigPoint src = to_big_point(p);
    const long double r =
        abs(residual(p, src, map_point(map, src))).to_long_double();
    if (bits > kStartBits &&
        (std::abs(r - previous) <= tol * 1e-3 || bits >= kMaxBits)) {
      return r;
    }
    previous = r;
  }
}

// Draws plan.count source points admissible for `eq` and `map` whose images
// lie in the domain of every quantity `residual` evaluates. Samples where
// evaluation fails are rejected and count against the attempt budget.
void run_samples(InvarianceCheck &check, const SamplePlan &plan,
                 const Residual &residual) {
  plan.validate();
  std::vector<DomainGuard> guards = check.equation.guards();
  guards.insert(guards.end(), check.map.guards().begin(),
                check.map.guards().end());
  Sampler sampler(plan, guards);
  check.tolerance = plan.tolerance;
  while (check.residuals.size() < plan.count) {
    const JetPoint p = sampler.next();
    long double r;
    try {
      r = adaptive_residual(check.map, p, plan.tolerance, residual);
    } catch (const DomainError &) {
      continue;
    } catch (const DivisionByZero &) {
      continue;
    } catch (const OverflowError &) {
      continue;
    }
    SampleResidual s{p, static_cast<double>(r)};
    check.residuals.push_back(s);
    if (!check.worst || s.residual > check.worst->residual) {
      check.worst = s;
    }
  }
  check.passed = !check.worst || check.worst->residual <= plan.tolerance;
}

InvarianceCheck make_check(Rule rule, const Equation &eq, const PointMap &map) {
  InvarianceCheck c;
  c.rule = rule;
  c.equation = eq;
  c.map = map;
  return c;
}

BigFloat max_coefficient_gap(const NumericForm &a, const NumericForm &b,
                             const BigFloat &scale_b) {
  BigFloat worst;
  for (std::size_t i = 0; i < a.coef.size(); ++i) {
    const BigFloat gap = abs(a.coef[i] - scale_b * b.coef[i]);
    if (gap > worst) {
      worst = gap;
    }
  }
  return worst;
}

// Vanishing of each expression of F~, decided at image points.
InvarianceCheck vanishing_check(Rule rule, const Equation &eq,
                                const PointMap &map, std::vector<Expr> exprs,
                                const SamplePlan &plan) {
  InvarianceCheck check = make_check(rule, eq, map);
  check.symbolic = std::all_of(exprs.begin(), exprs.end(),
                               [](const Expr &e) { return e.is_zero(); });
  run_samples(check, plan, [&](const JetPoint &, const BigPoint &,
                               const BigPoint &image) {
    BigFloat worst;
    for (const auto &e : exprs) {
      const BigFloat v = abs(eval_big(e, image));
      if (v > worst) {
        worst = v;
      }
    }
    return worst;
  });
  return check;
}

} // namespace

InvarianceCheck check_k1_rule(const Equation &eq, const PointMap &map,
                              const SamplePlan &plan) {
  InvarianceCheck check = make_check(Rule::K1Rule, eq, map);
  const Expr k1_new = InvariantSet(apply(map, eq)).k1();
  const Expr k1_old = InvariantSet(eq).k1();
  const Expr &g = map.multiplier();
  const Expr xg = total_derivative(eq, g);
  const Expr xxg = total_derivative(eq, xg);
  run_samples(check, plan, [&](const JetPoint &, const BigPoint &src,
                               const BigPoint &image) {
    const BigFloat gv = eval_big(g, src);
    const BigFloat xgv = eval_big(xg, src);
    const BigFloat expected = eval_big(k1_old, src) / pow(gv, 2) +
                              BigFloat(2) * eval_big(xxg, src) / pow(gv, 3) -
                              BigFloat(3) * pow(xgv, 2) / pow(gv, 4);
    return eval_big(k1_new, image) - expected;
  });
  return check;
}

InvarianceCheck check_form_scaling(const Equation &eq, const PointMap &map,
                                   FormKind which, const SamplePlan &plan) {
  InvariantSet source(eq);
  if (which == FormKind::J) {
    const std::array<Expr, 2> is{source.i1(), source.i2()};
    if (!is_zero(source.w(), plan).zero() || !all_zero(is, plan).zero()) {
      throw PreconditionViolated(
          "J scales as a relative invariant only when W and I vanish");
    }
  }
  InvariantSet target(apply(map, eq));
  const int weight = which == FormKind::I ? 2 : -1;
  // The forms of F~ are evaluated factor by factor: expanding the wedge, or
  // differentiating Psi~, symbolically is what blows up after a map.
  auto form_at = [which](InvariantSet &s)
      -> std::function<NumericForm(const BigPoint &)> {
    if (which == FormKind::I) {
      const Form a = s.alpha();
      return [a](const BigPoint &q) {
        return wedge(evaluate_derivative(a, q), evaluate(a, q));
      };
    }
    return [factors = s.j_form_factors()](const BigPoint &q) {
      return wedge(evaluate(factors.first, q), evaluate(factors.second, q));
    };
  };
  const auto old_form = form_at(source);
  const auto new_form = form_at(target);

  InvarianceCheck check = make_check(
      which == FormKind::I ? Rule::IScaling : Rule::JScaling, eq, map);
  run_samples(check, plan, [&](const JetPoint &p, const BigPoint &src,
                               const BigPoint &image) {
    const NumericForm pulled = pullback_at(map, new_form(image), p);
    const NumericForm base = old_form(src);
    const BigFloat gv = eval_big(map.multiplier(), src);
    return max_coefficient_gap(pulled, base, pow(gv, weight));
  });
  return check;
}

InvarianceCheck check_w_vanishing(const Equation &eq, const PointMap &map,
                                  const SamplePlan &plan) {
  const Equation image = apply(map, eq);
  return vanishing_check(Rule::WVanishing, eq, map,
                         {InvariantSet(image).w()}, plan);
}

InvarianceCheck check_triviality_preservation(const PointMap &map,
                                              const SamplePlan &plan) {
  const Equation trivial{Expr()};
  const Equation image = apply(map, trivial);
  InvariantSet s(image);
  return vanishing_check(Rule::TrivialityPreservation, trivial, map,
                         {s.third_derivative(), s.w()}, plan);
}

PointMap NamedMap::build(const SamplePlan &check) const {
  return parse_transformation(t_new, x_new, t_old, x_old, check);
}

const std::vector<NamedMap> &fixture_maps() {
  static const std::vector<NamedMap> maps{
      {"identity", "t", "x", "t", "x"},
      {"x-shift", "t", "x + t^3", "t", "x - t^3"},
      {"moebius", "(2*t + 1)/(t + 1)", "x", "(1 - t)/(t - 2)", "x"},
      {"mixing", "t + x", "x", "t - x", "x"},
  };
  return maps;
}

} // namespace jetinv
