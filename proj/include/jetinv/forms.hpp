#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <map>

#include <Eigen/Core>

#include "jetinv/bigfloat.hpp"
#include "jetinv/expr.hpp"
#include "jetinv/jet.hpp"

namespace jetinv {

/// Differential k-form on the 2-jet space in some ordered coframe e0..e3.
///
/// A basis element e_{i1} ^ ... ^ e_{ik} with i1 < ... < ik is keyed by the
/// bitmask of its indices. Forms built by this module use the coordinate
/// coframe (dt, dx0, dx1, dx2); `to_omega_frame` re-expresses a form in
/// (w0, w1, w2, w3), keeping the same storage.
class Form {
public:
  using Basis = std::uint8_t;

  explicit Form(int degree = 0);

  static Form scalar(const Expr &f);
  /// The coordinate differential dv.
  static Form differential(Var v);
  /// c[0] e0 + c[1] e1 + c[2] e2 + c[3] e3.
  static Form one_form(const std::array<Expr, 4> &c);

  int degree() const { return degree_; }
  const std::map<Basis, Expr> &components() const { return components_; }
  bool is_zero() const { return components_.empty(); }

  /// Coefficient of the basis element with exactly these indices.
  Expr coefficient(Basis b) const;
  /// Coefficient along e_{i1} ^ ... ^ e_{ik} for indices in any order, with
  /// the permutation sign applied; 0 if an index repeats.
  Expr coefficient(std::initializer_list<int> indices) const;

  void add(Basis b, const Expr &c);

  friend Form operator+(const Form &a, const Form &b);
  friend Form operator-(const Form &a, const Form &b);
  friend Form operator*(const Expr &s, const Form &f);
  friend bool operator==(const Form &a, const Form &b) {
    return a.degree_ == b.degree_ && a.components_ == b.components_;
  }

private:
  int degree_;
  std::map<Basis, Expr> components_;
};

/// Sign of e_a ^ e_b relative to the sorted basis element; 0 if they overlap.
int wedge_sign(Form::Basis a, Form::Basis b);

/// Throws DegreeOverflow if deg a + deg b > 4.
Form wedge(const Form &a, const Form &b);
Form exterior_derivative(const Form &a);
/// Interior product i_V a.
Form interior(const VectorField &v, const Form &a);
/// Pairing of a 1-form with a vector field.
Expr contraction(const Form &one_form, const VectorField &v);

/// Replaces each basis 1-form e_i by images[i] (1-forms in the target frame).
Form change_basis(const Form &a, const std::array<Form, 4> &images);

/// w0 = dx0 - x1 dt, w1 = dx1 - x2 dt, w2 = dx2 - F dt, w3 = dt.
std::array<Form, 4> omega_coframe(const Equation &eq);
Form to_omega_frame(const Form &a, const Equation &eq);
Form from_omega_frame(const Form &a, const Equation &eq);

/// alpha = w3 - psi w0, in coordinates.
Form alpha_form(const Equation &eq, const Expr &psi);

/// Symbolic pullback along the prolonged map: a is written in the new
/// coordinates, the result in the old ones.
Form pullback(const PointMap &map, const Form &a);

/// Form coefficients at a point, indexed by basis bitmask.
struct NumericForm {
  int degree = 0;
  std::array<BigFloat, 16> coef;

  long double max_abs() const;
};

using BigPoint = std::array<BigFloat, 4>;

BigPoint to_big_point(const JetPoint &p);
NumericForm evaluate(const Form &a, const BigPoint &p);
/// Value of d(a) at a point, from gradients of the coefficients; `a` must be
/// in the coordinate coframe.
NumericForm evaluate_derivative(const Form &a, const BigPoint &p);
/// Wedge product of form values at one point.
NumericForm wedge(const NumericForm &a, const NumericForm &b);
/// Image of p under the prolonged map.
BigPoint map_point(const PointMap &map, const BigPoint &p);

/// Pullback evaluated at a point p of the old coordinates: coefficients of
/// `a` at the image of p combined with minors of the jet-map Jacobian at p.
NumericForm pullback_at(const PointMap &map, const Form &a, const JetPoint &p);
/// Same, given the values of the form at the image of p.
NumericForm pullback_at(const PointMap &map, const NumericForm &at_image,
                        const JetPoint &p);

/// Jacobian d(t~, x~0, x~1, x~2)/d(t, x0, x1, x2) of the prolonged map.
Eigen::Matrix<long double, 4, 4> jet_jacobian(const PointMap &map,
                                              const BigPoint &p);

} // namespace jetinv
