#include "jetinv/jet.hpp"

#include <cmath>

#include "jetinv/errors.hpp"

namespace jetinv {

namespace {

/// Total derivative of the trivial equation; enough for the first two
/// prolongations, which never differentiate in x2.
Expr flat_total_derivative(const Expr &e) {
  return diff(e, Var::t) + Expr::x1() * diff(e, Var::x0) +
         Expr::x2() * diff(e, Var::x1);
}

void require_point_variables(const Expr &e, const char *what) {
  if (e.depends_on(Var::x1) || e.depends_on(Var::x2)) {
    throw DependsOnJetVariables(std::string(what) +
                                " may only depend on t and x");
  }
}

Expr determinant(const std::array<std::array<Expr, 4>, 4> &m, int size,
                 std::array<int, 4> rows, std::array<int, 4> cols) {
  if (size == 1) {
    return m[rows[0]][cols[0]];
  }
  Expr det;
  for (int k = 0; k < size; ++k) {
    const Expr &entry = m[rows[0]][cols[k]];
    if (entry.is_zero()) {
      continue;
    }
    std::array<int, 4> sub_rows{}, sub_cols{};
    for (int i = 1; i < size; ++i) {
      sub_rows[i - 1] = rows[i];
    }
    for (int j = 0, n = 0; j < size; ++j) {
      if (j != k) {
        sub_cols[n++] = cols[j];
      }
    }
    Expr minor = determinant(m, size - 1, sub_rows, sub_cols);
    det = (k % 2 == 0) ? det + entry * minor : det - entry * minor;
  }
  return det;
}

Expr determinant(const std::array<std::array<Expr, 4>, 4> &m) {
  return determinant(m, 4, {0, 1, 2, 3}, {0, 1, 2, 3});
}

void add_guard(std::vector<DomainGuard> &guards, DomainGuard g) {
  if (g.expr.is_constant()) {
    return;
  }
  for (const auto &existing : guards) {
    if (existing.kind == g.kind && existing.expr == g.expr) {
      return;
    }
  }
  guards.push_back(std::move(g));
}

std::array<long double, 4> as_long_double(const JetPoint &p) {
  std::array<long double, 4> out{};
  for (int i = 0; i < 4; ++i) {
    out[i] = static_cast<long double>(p.coords[i].get_num().get_d()) /
             static_cast<long double>(p.coords[i].get_den().get_d());
  }
  return out;
}

} // namespace

// ---------------------------------------------------------------------------

Equation::Equation(Expr rhs) : rhs_(std::move(rhs)) {
  for (Var v : kJetVars) {
    partials_[index_of(v)] = diff(rhs_, v);
  }
  guards_ = domain_guards(rhs_);
}

VectorField VectorField::coordinate(Var v) {
  VectorField f;
  f.coef[index_of(v)] = Expr(1);
  return f;
}

Expr VectorField::apply(const Expr &f) const {
  Expr out;
  for (Var v : kJetVars) {
    const Expr &c = coef[index_of(v)];
    if (!c.is_zero() && f.depends_on(v)) {
      out += c * diff(f, v);
    }
  }
  return out;
}

VectorField operator+(const VectorField &a, const VectorField &b) {
  VectorField r;
  for (int i = 0; i < 4; ++i) {
    r.coef[i] = a.coef[i] + b.coef[i];
  }
  return r;
}

VectorField operator-(const VectorField &a, const VectorField &b) {
  VectorField r;
  for (int i = 0; i < 4; ++i) {
    r.coef[i] = a.coef[i] - b.coef[i];
  }
  return r;
}

VectorField operator*(const Expr &s, const VectorField &v) {
  VectorField r;
  for (int i = 0; i < 4; ++i) {
    r.coef[i] = s * v.coef[i];
  }
  return r;
}

VectorField total_derivative_field(const Equation &eq) {
  return VectorField{{Expr(1), Expr::x1(), Expr::x2(), eq.rhs()}};
}

Expr total_derivative(const Equation &eq, const Expr &e) {
  Expr out = diff(e, Var::t) + Expr::x1() * diff(e, Var::x0) +
             Expr::x2() * diff(e, Var::x1);
  if (e.depends_on(Var::x2)) {
    out += eq.rhs() * diff(e, Var::x2);
  }
  return out;
}

Expr iterate_total_derivative(const Equation &eq, const Expr &e, int n) {
  if (n < 0) {
    throw InvalidArgument("iteration count must be non-negative");
  }
  Expr out = e;
  for (int i = 0; i < n; ++i) {
    out = total_derivative(eq, out);
  }
  return out;
}

VectorField lie_bracket(const VectorField &x, const VectorField &y) {
  VectorField r;
  for (int i = 0; i < 4; ++i) {
    r.coef[i] = x.apply(y.coef[i]) - y.apply(x.coef[i]);
  }
  return r;
}

std::array<VectorField, 4> adapted_frame(const Equation &eq) {
  const VectorField flow = total_derivative_field(eq);
  const VectorField vertical = VectorField::coordinate(Var::x2);
  const VectorField first = lie_bracket(flow, vertical);
  const VectorField second = lie_bracket(flow, first);
  return {vertical, first, second, flow};
}

FrameCoefficients decompose_in_frame(const VectorField &v,
                                     const Equation &eq) {
  const auto frame = adapted_frame(eq);
  // Columns are frame vectors, rows are coordinate components.
  std::array<std::array<Expr, 4>, 4> m;
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      m[r][c] = frame[c].coef[r];
    }
  }
  const Expr det = determinant(m);
  if (det.is_zero()) {
    throw DegenerateFrame("frame {d/dx2, ad, ad^2, X_F} is not a basis");
  }
  // Cramer's rule keeps the elimination fraction-free until one final
  // division by the determinant.
  const Expr inv_det = pow(det, Exponent(-1));
  std::array<Expr, 4> out;
  for (int c = 0; c < 4; ++c) {
    auto mc = m;
    for (int r = 0; r < 4; ++r) {
      mc[r][c] = v.coef[r];
    }
    out[c] = determinant(mc) * inv_det;
  }
  return {out[0], out[1], out[2], out[3]};
}

// ---------------------------------------------------------------------------

PointMap::PointMap(Expr t_new, Expr x_new, Expr t_old, Expr x_old,
                   const SamplePlan &check) {
  forward_[0] = std::move(t_new);
  forward_[1] = std::move(x_new);
  inverse_[0] = std::move(t_old);
  inverse_[1] = std::move(x_old);
  build();
  verify_round_trip(check);
}

void PointMap::build() {
  require_point_variables(forward_[0], "t~");
  require_point_variables(forward_[1], "x~");
  require_point_variables(inverse_[0], "inverse t");
  require_point_variables(inverse_[1], "inverse x");

  a_ = diff(forward_[0], Var::t);
  b_ = diff(forward_[0], Var::x0);
  g_ = a_ + b_ * Expr::x1();
  if (g_.is_zero()) {
    throw DivisionByZero("multiplier g = A + B x1 vanishes identically");
  }
  const Expr g_inv = pow(g_, Exponent(-1));
  forward_[2] = flat_total_derivative(forward_[1]) * g_inv;
  forward_[3] = flat_total_derivative(forward_[2]) * g_inv;

  const Expr gi = flat_total_derivative(inverse_[0]);
  if (gi.is_zero()) {
    throw DivisionByZero("inverse map has vanishing multiplier");
  }
  const Expr gi_inv = pow(gi, Exponent(-1));
  inverse_[2] = flat_total_derivative(inverse_[1]) * gi_inv;
  inverse_[3] = flat_total_derivative(inverse_[2]) * gi_inv;

  for (int i = 0; i < 4; ++i) {
    for (Var v : kJetVars) {
      jacobian_[i][index_of(v)] = diff(forward_[i], v);
    }
  }

  guards_.clear();
  for (const auto &f : forward_) {
    for (auto &g : domain_guards(f)) {
      add_guard(guards_, std::move(g));
    }
  }
  add_guard(guards_, {g_, DomainGuard::Kind::NonZero});
  const Expr point_jacobian = jacobian_[0][0] * jacobian_[1][1] -
                              jacobian_[0][1] * jacobian_[1][0];
  if (point_jacobian.is_zero()) {
    throw DivisionByZero("point map has vanishing Jacobian");
  }
  add_guard(guards_, {point_jacobian, DomainGuard::Kind::NonZero});
}

PointMap PointMap::identity() {
  return PointMap(Expr::t(), Expr::x0(), Expr::t(), Expr::x0());
}

PointMap PointMap::compose(const PointMap &second, const PointMap &first) {
  Bindings into_first{};
  into_first[index_of(Var::t)] = first.forward_[0];
  into_first[index_of(Var::x0)] = first.forward_[1];
  Bindings into_second_inv{};
  into_second_inv[index_of(Var::t)] = second.inverse_[0];
  into_second_inv[index_of(Var::x0)] = second.inverse_[1];
  return PointMap(substitute(second.forward_[0], into_first),
                  substitute(second.forward_[1], into_first),
                  substitute(first.inverse_[0], into_second_inv),
                  substitute(first.inverse_[1], into_second_inv));
}

PointMap PointMap::inverted() const {
  return PointMap(inverse_[0], inverse_[1], forward_[0], forward_[1]);
}

double PointMap::verify_round_trip(const SamplePlan &plan) const {
  Sampler sampler(plan, guards_);
  double worst = 0;
  std::size_t compared = 0;
  std::size_t skipped = 0;
  while (compared < plan.count) {
    const JetPoint p = sampler.next();
    const auto lp = as_long_double(p);
    std::array<long double, 4> image{};
    std::array<long double, 4> back{};
    try {
      for (int i = 0; i < 4; ++i) {
        image[i] = eval_scaled(forward_[i], lp).value;
      }
      for (int i = 0; i < 4; ++i) {
        back[i] = eval_scaled(inverse_[i], image).value;
      }
    } catch (const Error &) {
      if (++skipped > 1000 * plan.count) {
        throw InverseMismatch("inverse map is undefined on the image");
      }
      continue;
    }
    ++compared;
    for (int i = 0; i < 4; ++i) {
      const long double dev = std::abs(back[i] - lp[i]) / (1 + std::abs(lp[i]));
      worst = std::max(worst, static_cast<double>(dev));
    }
  }
  if (worst > plan.tolerance) {
    throw InverseMismatch("inverse does not undo the map (deviation " +
                          std::to_string(worst) + ")");
  }
  return worst;
}

Expr transformed_rhs_in_old_coordinates(const PointMap &map,
                                        const Equation &eq) {
  return total_derivative(eq, map.forward()[3]) *
         pow(map.multiplier(), Exponent(-1));
}

Equation prolong(const PointMap &map, const Equation &eq) {
  Bindings back{};
  for (int i = 0; i < 4; ++i) {
    back[i] = map.inverse()[i];
  }
  return Equation(
      substitute(transformed_rhs_in_old_coordinates(map, eq), back));
}

} // namespace jetinv
