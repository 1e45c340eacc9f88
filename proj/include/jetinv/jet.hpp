#pragma once

#include <array>
#include <vector>

#include "jetinv/expr.hpp"
#include "jetinv/sampling.hpp"

namespace jetinv {

/// Right-hand side F of x''' = F(t, x0, x1, x2) with its first partials and
/// the domain guards needed to sample it.
class Equation {
public:
  explicit Equation(Expr rhs);

  const Expr &rhs() const { return rhs_; }
  /// dF/dx0, dF/dx1, dF/dx2.
  const Expr &partial(Var v) const { return partials_[index_of(v)]; }
  const std::vector<DomainGuard> &guards() const { return guards_; }

private:
  Expr rhs_;
  std::array<Expr, 4> partials_;
  std::vector<DomainGuard> guards_;
};

/// Vector field c_t d/dt + c_x0 d/dx0 + c_x1 d/dx1 + c_x2 d/dx2.
struct VectorField {
  std::array<Expr, 4> coef;

  static VectorField coordinate(Var v);

  const Expr &operator[](Var v) const { return coef[index_of(v)]; }
  /// Directional derivative V(f).
  Expr apply(const Expr &f) const;

  friend VectorField operator+(const VectorField &a, const VectorField &b);
  friend VectorField operator-(const VectorField &a, const VectorField &b);
  friend VectorField operator*(const Expr &s, const VectorField &v);
  friend bool operator==(const VectorField &a, const VectorField &b) = default;
};

/// d/dt + x1 d/dx0 + x2 d/dx1 + F d/dx2.
VectorField total_derivative_field(const Equation &eq);
Expr total_derivative(const Equation &eq, const Expr &e);
Expr iterate_total_derivative(const Equation &eq, const Expr &e, int n);

VectorField lie_bracket(const VectorField &x, const VectorField &y);

/// Coefficients of V in the frame {d/dx2, ad d/dx2, ad^2 d/dx2, X_F}, where
/// ad = [X_F, .].
struct FrameCoefficients {
  Expr vertical;
  Expr first;
  Expr second;
  Expr along_flow;
};

/// The frame vectors {d/dx2, ad d/dx2, ad^2 d/dx2, X_F} in that order.
std::array<VectorField, 4> adapted_frame(const Equation &eq);
FrameCoefficients decompose_in_frame(const VectorField &v,
                                     const Equation &eq);

/// Point transformation (t, x) -> (t~(t, x), x~(t, x)) with an explicit
/// inverse. Construction computes the second prolongation of both directions
/// and checks the round trip of the jet maps at sample points.
class PointMap {
public:
  /// Throws DependsOnJetVariables, DivisionByZero (g = 0) or InverseMismatch.
  PointMap(Expr t_new, Expr x_new, Expr t_old, Expr x_old,
           const SamplePlan &check = SamplePlan{});

  static PointMap identity();

  /// Jet map (t~, x~0, x~1, x~2) as functions of the old coordinates.
  const std::array<Expr, 4> &forward() const { return forward_; }
  /// Jet map (t, x0, x1, x2) as functions of the new coordinates.
  const std::array<Expr, 4> &inverse() const { return inverse_; }

  /// g = A + B x1 with A = dt~/dt and B = dt~/dx0; X_F~ = g^-1 X_F.
  const Expr &multiplier() const { return g_; }
  const Expr &a() const { return a_; }
  const Expr &b() const { return b_; }

  /// d forward[i] / d var[j], in old coordinates.
  const Expr &jacobian(int i, int j) const { return jacobian_[i][j]; }

  /// Conditions on old coordinates: the forward map and g are defined,
  /// g != 0 and the point Jacobian is nonzero.
  const std::vector<DomainGuard> &guards() const { return guards_; }

  /// Map that applies `first`, then `second`.
  static PointMap compose(const PointMap &second, const PointMap &first);
  PointMap inverted() const;

  /// Largest relative deviation of inverse(forward(p)) from p over accepted
  /// samples; throws InverseMismatch if it exceeds `plan.tolerance`.
  double verify_round_trip(const SamplePlan &plan) const;

private:
  PointMap() = default;
  void build();

  std::array<Expr, 4> forward_;
  std::array<Expr, 4> inverse_;
  Expr g_, a_, b_;
  std::array<std::array<Expr, 4>, 4> jacobian_;
  std::vector<DomainGuard> guards_;
};

/// The transformed equation F~ written in the new coordinates.
Equation prolong(const PointMap &map, const Equation &eq);

/// The transformed right-hand side before the change of coordinates, i.e.
/// F~ composed with the forward jet map, as a function of old coordinates.
Expr transformed_rhs_in_old_coordinates(const PointMap &map,
                                        const Equation &eq);

} // namespace jetinv
