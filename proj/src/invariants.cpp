#include "jetinv/invariants.hpp"

#include "jetinv/errors.hpp"

namespace jetinv {

namespace {

Rational q(long n, long d = 1) { return Rational(n, d); }

} // namespace

InvariantSet::InvariantSet(Equation eq) : eq_(std::move(eq)) {}

const Expr &InvariantSet::w() {
  return memo(w_, [&] {
    const Expr &f0 = eq_.partial(Var::x0);
    const Expr &f1 = eq_.partial(Var::x1);
    const Expr &f2 = eq_.partial(Var::x2);
    if (!xf1_) {
      xf1_ = flow(f1);
    }
    if (!xf2_) {
      xf2_ = flow(f2);
    }
    if (!x2f2_) {
      x2f2_ = flow(*xf2_);
    }
    return f0 - Expr(q(1, 2)) * *xf1_ + Expr(q(1, 3)) * f1 * f2 +
           Expr(q(1, 6)) * *x2f2_ - Expr(q(1, 3)) * *xf2_ * f2 +
           Expr(q(2, 27)) * f2 * f2 * f2;
  });
}

const Expr &InvariantSet::k0() {
  return memo(k0_, [&] {
    const Expr &f0 = eq_.partial(Var::x0);
    const Expr &f1 = eq_.partial(Var::x1);
    const Expr &f2 = eq_.partial(Var::x2);
    if (!xf1_) {
      xf1_ = flow(f1);
    }
    if (!xf2_) {
      xf2_ = flow(f2);
    }
    if (!x2f2_) {
      x2f2_ = flow(*xf2_);
    }
    return f0 - *xf1_ + Expr(q(1, 3)) * f1 * f2 + Expr(q(2, 3)) * *x2f2_ -
           Expr(q(2, 3)) * *xf2_ * f2 + Expr(q(2, 27)) * f2 * f2 * f2;
  });
}

const Expr &InvariantSet::k1() {
  return memo(k1_, [&] {
    const Expr &f1 = eq_.partial(Var::x1);
    const Expr &f2 = eq_.partial(Var::x2);
    if (!xf2_) {
      xf2_ = flow(f2);
    }
    return f1 - *xf2_ + Expr(q(1, 3)) * f2 * f2;
  });
}

const Expr &InvariantSet::c() {
  return memo(c_, [&] {
    const Expr &f2 = eq_.partial(Var::x2);
    const Expr f22 = diff(f2, Var::x2);
    const Expr f12 = diff(f2, Var::x1);
    const Expr f02 = diff(f2, Var::x0);
    return flow(flow(f22)) - flow(f12) + f02;
  });
}

const Expr &InvariantSet::third_derivative() {
  return memo(d3_, [&] { return diff(eq_.rhs(), Var::x2, 3); });
}

const Expr &InvariantSet::psi() {
  return memo(psi_, [&] {
    const Expr &d3 = third_derivative();
    if (d3.is_zero()) {
      throw TrivializableBranch(
          "d^3F/dx2^3 vanishes: the equation is point equivalent to x''' = 0");
    }
    return diff(k1(), Var::x2, 3) * pow(Expr(2) * d3, Exponent(-1));
  });
}

const Expr &InvariantSet::psi_flow(int n) {
  if (n < 0 || n > 3) {
    throw InvalidArgument("psi_flow order must lie in 0..3");
  }
  if (n == 0) {
    return psi();
  }
  return memo(psi_flow_[n], [&] { return flow(psi_flow(n - 1)); });
}

const Expr &InvariantSet::i1() {
  return memo(i1_, [&] {
    const Expr &p = psi();
    return diff(p, Var::x1) - p * p;
  });
}

const Expr &InvariantSet::i2() {
  return memo(i2_, [&] { return diff(psi(), Var::x2); });
}

const Expr &InvariantSet::j0() {
  return memo(j0_, [&] {
    const Expr &p = psi();
    const Expr &k = k1();
    return diff(k, Var::x0) + Expr(2) * psi_flow(1) * k + p * flow(k) -
           Expr(2) * psi_flow(3) - Expr(2) * eq_.partial(Var::x0) * p;
  });
}

const Expr &InvariantSet::j1() {
  return memo(j1_, [&] {
    const Expr &p = psi();
    const Expr &k = k1();
    return diff(k, Var::x1) + Expr(2) * p * k - Expr(6) * psi_flow(2) -
           Expr(2) * eq_.partial(Var::x1) * p;
  });
}

const Expr &InvariantSet::j2() {
  return memo(j2_, [&] {
    const Expr &p = psi();
    return diff(k1(), Var::x2) - Expr(6) * psi_flow(1) -
           Expr(2) * eq_.partial(Var::x2) * p;
  });
}

Form InvariantSet::alpha() { return alpha_form(eq_, psi()); }

Form InvariantSet::i_form() {
  const Form a = alpha();
  return wedge(exterior_derivative(a), a);
}

Form InvariantSet::i_form_from_coefficients() {
  const auto w = omega_coframe(eq_);
  const Form lead = i1() * w[1] + i2() * w[2];
  return Expr(-1) * wedge(wedge(lead, w[0]), alpha());
}

std::pair<Form, Form> InvariantSet::j_form_factors() {
  const auto w = omega_coframe(eq_);
  return {j0() * w[0] + j1() * w[1] + j2() * w[2], alpha()};
}

Form InvariantSet::j_form() {
  const auto [lead, a] = j_form_factors();
  return wedge(lead, a);
}

Expr InvariantSet::residual_w_k() {
  return w() - k0() - Expr(q(1, 2)) * flow(k1());
}

Expr InvariantSet::residual_c_k() {
  const Expr &k = k1();
  return c() - (Expr(q(3, 2)) * diff(k, Var::x1) +
                eq_.partial(Var::x2) * diff(k, Var::x2) +
                Expr(q(3, 2)) * diff(k0(), Var::x2));
}

Expr InvariantSet::residual_c_j() {
  return c() - (Expr(q(3, 2)) * diff(w(), Var::x2) -
                Expr(q(3, 4)) * flow(j2()) + Expr(q(3, 4)) * j1() +
                Expr(q(1, 4)) * eq_.partial(Var::x2) * j2());
}

// ---------------------------------------------------------------------------

Expr wunschmann(const Equation &eq) { return InvariantSet(eq).w(); }

KInvariants k_invariants(const Equation &eq) {
  InvariantSet s(eq);
  return {s.k0(), s.k1(), s.residual_w_k()};
}

Expr cartan(const Equation &eq) { return InvariantSet(eq).c(); }

Expr psi(const Equation &eq) { return InvariantSet(eq).psi(); }

ICoefficients i_coefficients(const Equation &eq) {
  InvariantSet s(eq);
  return {s.i1(), s.i2()};
}

Form i_form(const Equation &eq) { return InvariantSet(eq).i_form(); }

Form i_form_from_coefficients(const Equation &eq) {
  return InvariantSet(eq).i_form_from_coefficients();
}

JCoefficients j_coefficients(const Equation &eq, const SamplePlan &plan) {
  InvariantSet s(eq);
  JCoefficients out{s.j0(), s.j1(), s.j2(), false};
  const std::array<Expr, 2> is{s.i1(), s.i2()};
  out.valid = is_zero(s.w(), plan).zero() && all_zero(is, plan).zero();
  return out;
}

Form j_form(const Equation &eq) { return InvariantSet(eq).j_form(); }

// ---------------------------------------------------------------------------

std::string_view to_string(Classification c) {
  switch (c) {
  case Classification::PointTrivializable:
    return "PointTrivializable";
  case Classification::NotWunschmann:
    return "NotWunschmann";
  case Classification::WunschmannNotEinsteinWeyl:
    return "WunschmannNotEinsteinWeyl";
  case Classification::EinsteinWeylNotHyperCR:
    return "EinsteinWeylNotHyperCR";
  case Classification::HyperCREinsteinWeyl:
    return "HyperCREinsteinWeyl";
  }
  return "?";
}

Classification decide(bool trivializable, bool w_zero, bool i_zero,
                      bool j_zero, bool c_zero) {
  if (trivializable) {
    return Classification::PointTrivializable;
  }
  if (!w_zero) {
    return Classification::NotWunschmann;
  }
  if (i_zero && j_zero) {
    return Classification::HyperCREinsteinWeyl;
  }
  return c_zero ? Classification::EinsteinWeylNotHyperCR
                : Classification::WunschmannNotEinsteinWeyl;
}

namespace {

InvariantVerdict undefined(std::string note) {
  InvariantVerdict v;
  v.defined = false;
  v.note = std::move(note);
  return v;
}

template <class F> InvariantVerdict guarded(F &&compute) {
  try {
    return InvariantVerdict{true, {}, compute()};
  } catch (const ExpressionTooLarge &e) {
    return undefined(e.what());
  }
}

} // namespace

InvariantReport classify(const Equation &eq, const SamplePlan &plan) {
  plan.validate();
  InvariantSet s(eq);
  InvariantReport r;
  r.rhs = eq.rhs();
  r.plan = plan;

  auto verdict_of = [&](const Expr &e) { return is_zero(e, plan); };

  r.third_derivative = {true, {}, verdict_of(s.third_derivative())};
  r.w = {true, {}, verdict_of(s.w())};
  r.k0 = {true, {}, verdict_of(s.k0())};
  r.k1 = {true, {}, verdict_of(s.k1())};
  r.c = {true, {}, verdict_of(s.c())};
  r.residuals.push_back({"W - K0 - X(K1)/2", verdict_of(s.residual_w_k())});
  r.residuals.push_back({"C - (3/2 dK1/dx1 + F_2 dK1/dx2 + 3/2 dK0/dx2)",
                         verdict_of(s.residual_c_k())});

  const bool trivializable = r.third_derivative.verdict.zero();
  if (trivializable) {
    const std::string why = "d^3F/dx2^3 vanishes; Psi is undefined";
    r.i = undefined(why);
    r.j = undefined(why);
    r.classification = Classification::PointTrivializable;
    return r;
  }

  r.i = {true, {}, all_zero(std::array<Expr, 2>{s.i1(), s.i2()}, plan)};
  const bool w_zero = r.w.verdict.zero();
  const bool i_zero = r.i.verdict.zero();
  r.j_valid = w_zero && i_zero;

  if (r.j_valid) {
    // J decides the outcome here, so resource failures must propagate.
    r.j = {true, {}, all_zero(std::array<Expr, 3>{s.j0(), s.j1(), s.j2()},
                              plan)};
  } else {
    r.j = guarded([&] {
      return all_zero(std::array<Expr, 3>{s.j0(), s.j1(), s.j2()}, plan);
    });
    r.j.note = r.j.defined
                   ? "not a relative invariant here: W or I does not vanish"
                   : r.j.note;
  }

  try {
    r.residuals.push_back(
        {"C - (3/2 dW/dx2 - 3/4 X(J2) + 3/4 J1 + 1/4 F_2 J2)",
         verdict_of(s.residual_c_j())});
  } catch (const ExpressionTooLarge &) {
  }

  const bool j_zero = r.j.defined && r.j.verdict.zero();
  r.classification =
      decide(false, w_zero, i_zero, j_zero, r.c.verdict.zero());
  if (r.classification == Classification::HyperCREinsteinWeyl) {
    r.cartan_consistent = r.c.verdict.zero();
  }
  return r;
}

} // namespace jetinv
