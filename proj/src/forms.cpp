#include "jetinv/forms.hpp"

#include <bit>
#include <cmath>

#include <Eigen/Core>

#include "jetinv/errors.hpp"

namespace jetinv {

namespace {

constexpr Form::Basis bit(int i) { return static_cast<Form::Basis>(1u << i); }

std::array<int, 4> indices_of(Form::Basis b, int &count) {
  std::array<int, 4> out{};
  count = 0;
  for (int i = 0; i < 4; ++i) {
    if (b & bit(i)) {
      out[count++] = i;
    }
  }
  return out;
}

} // namespace

Form::Form(int degree) : degree_(degree) {
  if (degree < 0 || degree > 4) {
    throw DegreeOverflow("form degree must lie in 0..4");
  }
}

Form Form::scalar(const Expr &f) {
  Form out(0);
  out.add(0, f);
  return out;
}

Form Form::differential(Var v) {
  Form out(1);
  out.add(bit(index_of(v)), Expr(1));
  return out;
}

Form Form::one_form(const std::array<Expr, 4> &c) {
  Form out(1);
  for (int i = 0; i < 4; ++i) {
    out.add(bit(i), c[i]);
  }
  return out;
}

Expr Form::coefficient(Basis b) const {
  auto it = components_.find(b);
  return it == components_.end() ? Expr() : it->second;
}

Expr Form::coefficient(std::initializer_list<int> indices) const {
  Basis mask = 0;
  int sign = 1;
  for (int i : indices) {
    if (i < 0 || i > 3 || (mask & bit(i))) {
      return Expr();
    }
    // Moving e_i past the already placed larger indices.
    sign *= (std::popcount(static_cast<unsigned>(mask >> (i + 1))) % 2) ? -1 : 1;
    mask |= bit(i);
  }
  if (static_cast<int>(indices.size()) != degree_) {
    return Expr();
  }
  const Expr c = coefficient(mask);
  return sign > 0 ? c : -c;
}

void Form::add(Basis b, const Expr &c) {
  if (std::popcount(static_cast<unsigned>(b)) != degree_) {
    throw DegreeOverflow("basis element does not match the form degree");
  }
  if (c.is_zero()) {
    return;
  }
  auto [it, inserted] = components_.try_emplace(b, c);
  if (!inserted) {
    it->second += c;
    if (it->second.is_zero()) {
      components_.erase(it);
    }
  }
}

Form operator+(const Form &a, const Form &b) {
  if (a.degree_ != b.degree_) {
    throw DegreeOverflow("cannot add forms of different degree");
  }
  Form out = a;
  for (const auto &[k, c] : b.components_) {
    out.add(k, c);
  }
  return out;
}

Form operator-(const Form &a, const Form &b) { return a + (Expr(-1) * b); }

Form operator*(const Expr &s, const Form &f) {
  Form out(f.degree_);
  if (s.is_zero()) {
    return out;
  }
  for (const auto &[k, c] : f.components_) {
    out.add(k, s * c);
  }
  return out;
}

int wedge_sign(Form::Basis a, Form::Basis b) {
  if (a & b) {
    return 0;
  }
  int inversions = 0;
  for (int j = 0; j < 4; ++j) {
    if (b & bit(j)) {
      inversions += std::popcount(static_cast<unsigned>(a >> (j + 1)));
    }
  }
  return inversions % 2 ? -1 : 1;
}

Form wedge(const Form &a, const Form &b) {
  if (a.degree() + b.degree() > 4) {
    throw DegreeOverflow("wedge product of degree above 4");
  }
  Form out(a.degree() + b.degree());
  for (const auto &[ka, ca] : a.components()) {
    for (const auto &[kb, cb] : b.components()) {
      const int s = wedge_sign(ka, kb);
      if (s != 0) {
        out.add(static_cast<Form::Basis>(ka | kb), s > 0 ? ca * cb : -(ca * cb));
      }
    }
  }
  return out;
}

Form exterior_derivative(const Form &a) {
  if (a.degree() >= 4) {
    return Form(4);
  }
  Form out(a.degree() + 1);
  for (const auto &[k, c] : a.components()) {
    for (Var v : kJetVars) {
      const int i = index_of(v);
      if ((k & bit(i)) || !c.depends_on(v)) {
        continue;
      }
      const Expr dc = diff(c, v);
      const bool odd = std::popcount(static_cast<unsigned>(k & (bit(i) - 1))) % 2;
      out.add(static_cast<Form::Basis>(k | bit(i)), odd ? -dc : dc);
    }
  }
  return out;
}

Form interior(const VectorField &v, const Form &a) {
  if (a.degree() == 0) {
    return Form(0);
  }
  Form out(a.degree() - 1);
  for (const auto &[k, c] : a.components()) {
    int n = 0;
    const auto idx = indices_of(k, n);
    for (int pos = 0; pos < n; ++pos) {
      const Expr &vi = v.coef[idx[pos]];
      if (vi.is_zero()) {
        continue;
      }
      const Expr term = vi * c;
      out.add(static_cast<Form::Basis>(k & ~bit(idx[pos])),
              pos % 2 ? -term : term);
    }
  }
  return out;
}

Expr contraction(const Form &one_form, const VectorField &v) {
  if (one_form.degree() != 1) {
    throw DegreeOverflow("contraction expects a 1-form");
  }
  return interior(v, one_form).coefficient(Form::Basis{0});
}

Form change_basis(const Form &a, const std::array<Form, 4> &images) {
  Form out(a.degree());
  for (const auto &[k, c] : a.components()) {
    Form piece = Form::scalar(c);
    for (int i = 0; i < 4; ++i) {
      if (k & bit(i)) {
        piece = wedge(piece, images[i]);
      }
    }
    out = out + piece;
  }
  return out;
}

std::array<Form, 4> omega_coframe(const Equation &eq) {
  const Expr one(1);
  return {Form::one_form({-Expr::x1(), one, Expr(), Expr()}),
          Form::one_form({-Expr::x2(), Expr(), one, Expr()}),
          Form::one_form({-eq.rhs(), Expr(), Expr(), one}),
          Form::differential(Var::t)};
}

Form from_omega_frame(const Form &a, const Equation &eq) {
  return change_basis(a, omega_coframe(eq));
}

Form to_omega_frame(const Form &a, const Equation &eq) {
  // dt = w3, dx0 = w0 + x1 w3, dx1 = w1 + x2 w3, dx2 = w2 + F w3.
  const Expr one(1);
  const std::array<Form, 4> images{
      Form::one_form({Expr(), Expr(), Expr(), one}),
      Form::one_form({one, Expr(), Expr(), Expr::x1()}),
      Form::one_form({Expr(), one, Expr(), Expr::x2()}),
      Form::one_form({Expr(), Expr(), one, eq.rhs()})};
  return change_basis(a, images);
}

Form alpha_form(const Equation &eq, const Expr &psi) {
  const auto w = omega_coframe(eq);
  return w[3] - psi * w[0];
}

Form pullback(const PointMap &map, const Form &a) {
  Bindings forward{};
  for (int i = 0; i < 4; ++i) {
    forward[i] = map.forward()[i];
  }
  std::array<Form, 4> images;
  for (int i = 0; i < 4; ++i) {
    images[i] = Form::one_form({map.jacobian(i, 0), map.jacobian(i, 1),
                                map.jacobian(i, 2), map.jacobian(i, 3)});
  }
  Form substituted(a.degree());
  for (const auto &[k, c] : a.components()) {
    substituted.add(k, substitute(c, forward));
  }
  return change_basis(substituted, images);
}

long double NumericForm::max_abs() const {
  BigFloat m;
  for (const auto &c : coef) {
    if (abs(c) > m) {
      m = abs(c);
    }
  }
  return m.to_long_double();
}

BigPoint to_big_point(const JetPoint &p) {
  BigPoint out;
  for (int i = 0; i < 4; ++i) {
    out[i] = BigFloat(p.coords[i]);
  }
  return out;
}

NumericForm evaluate(const Form &a, const BigPoint &p) {
  NumericForm out;
  out.degree = a.degree();
  for (const auto &[k, c] : a.components()) {
    out.coef[k] = eval_big(c, p);
  }
  return out;
}

BigPoint map_point(const PointMap &map, const BigPoint &p) {
  BigPoint out;
  for (int i = 0; i < 4; ++i) {
    out[i] = eval_big(map.forward()[i], p);
  }
  return out;
}

Eigen::Matrix<long double, 4, 4> jet_jacobian(const PointMap &map,
                                              const BigPoint &p) {
  Eigen::Matrix<long double, 4, 4> jac;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      jac(i, j) = eval_big(map.jacobian(i, j), p).to_long_double();
    }
  }
  return jac;
}

namespace {

// Determinant by cofactor expansion along the first row; k is at most 4.
BigFloat minor_determinant(const std::array<std::array<BigFloat, 4>, 4> &m,
                           const std::array<int, 4> &rows, int nr,
                           const std::array<int, 4> &cols, int nc) {
  if (nr == 1) {
    return m[rows[0]][cols[0]];
  }
  std::array<int, 4> rest_rows{};
  for (int i = 1; i < nr; ++i) {
    rest_rows[i - 1] = rows[i];
  }
  BigFloat det;
  for (int j = 0; j < nc; ++j) {
    const BigFloat &a = m[rows[0]][cols[j]];
    if (a == BigFloat(0)) {
      continue;
    }
    std::array<int, 4> rest_cols{};
    for (int c = 0, k = 0; c < nc; ++c) {
      if (c != j) {
        rest_cols[k++] = cols[c];
      }
    }
    const BigFloat sub =
        a * minor_determinant(m, rest_rows, nr - 1, rest_cols, nc - 1);
    det = j % 2 ? det - sub : det + sub;
  }
  return det;
}

} // namespace

NumericForm evaluate_derivative(const Form &a, const BigPoint &p) {
  NumericForm out;
  out.degree = a.degree() + 1;
  if (out.degree > 4) {
    throw DegreeOverflow("exterior derivative of a 4-form");
  }
  for (const auto &[k, c] : a.components()) {
    const BigGradient g = eval_big_gradient(c, p);
    for (int v = 0; v < 4; ++v) {
      const Form::Basis dv = static_cast<Form::Basis>(1u << v);
      const int sign = wedge_sign(dv, k);
      if (sign != 0) {
        out.coef[dv | k] += sign > 0 ? g.grad[v] : -g.grad[v];
      }
    }
  }
  return out;
}

NumericForm wedge(const NumericForm &a, const NumericForm &b) {
  if (a.degree + b.degree > 4) {
    throw DegreeOverflow("wedge of degree " + std::to_string(a.degree) +
                         " and " + std::to_string(b.degree));
  }
  NumericForm out;
  out.degree = a.degree + b.degree;
  for (Form::Basis i = 0; i < 16; ++i) {
    if (a.coef[i] == BigFloat(0)) {
      continue;
    }
    for (Form::Basis j = 0; j < 16; ++j) {
      const int sign = wedge_sign(i, j);
      if (sign == 0 || b.coef[j] == BigFloat(0)) {
        continue;
      }
      const BigFloat term = a.coef[i] * b.coef[j];
      out.coef[i | j] += sign > 0 ? term : -term;
    }
  }
  return out;
}

NumericForm pullback_at(const PointMap &map, const Form &a,
                        const JetPoint &p) {
  const BigPoint image = map_point(map, to_big_point(p));
  return pullback_at(map, evaluate(a, image), p);
}

NumericForm pullback_at(const PointMap &map, const NumericForm &at_image,
                        const JetPoint &p) {
  const BigPoint src = to_big_point(p);
  NumericForm out;
  out.degree = at_image.degree;
  const int k = at_image.degree;
  if (k == 0) {
    out.coef[0] = at_image.coef[0];
    return out;
  }
  std::array<std::array<BigFloat, 4>, 4> jac;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      jac[i][j] = eval_big(map.jacobian(i, j), src);
    }
  }
  for (Form::Basis rows_mask = 0; rows_mask < 16; ++rows_mask) {
    const BigFloat &c = at_image.coef[rows_mask];
    if (std::popcount(static_cast<unsigned>(rows_mask)) != k ||
        c == BigFloat(0)) {
      continue;
    }
    int nr = 0;
    const auto rows = indices_of(rows_mask, nr);
    for (Form::Basis cols_mask = 0; cols_mask < 16; ++cols_mask) {
      if (std::popcount(static_cast<unsigned>(cols_mask)) != k) {
        continue;
      }
      int nc = 0;
      const auto cols = indices_of(cols_mask, nc);
      out.coef[cols_mask] += c * minor_determinant(jac, rows, nr, cols, nc);
    }
  }
  return out;
}

} // namespace jetinv
