#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "jetinv/expr.hpp"
#include "jetinv/forms.hpp"
#include "jetinv/jet.hpp"
#include "jetinv/sampling.hpp"

namespace jetinv {

// Scalar invariants of x''' = F(t, x0, x1, x2). Notation: F_i = dF/dx_i and
// X = X_F is the total derivative.
//
//   W   = F_0 - 1/2 X(F_1) + 1/3 F_1 F_2 + 1/6 X^2(F_2) - 1/3 X(F_2) F_2
//         + 2/27 F_2^3                                        (Wunschmann)
//   K0  = F_0 - X(F_1) + 1/3 F_1 F_2 + 2/3 X^2(F_2) - 2/3 X(F_2) F_2
//         + 2/27 F_2^3
//   K1  = F_1 - X(F_2) + 1/3 F_2^2
//   C   = X^2(F_22) - X(F_12) + F_02                              (Cartan)
//   Psi = d^3K1/dx2^3 / (2 d^3F/dx2^3)
//   I1  = dPsi/dx1 - Psi^2,  I2 = dPsi/dx2
//   J0  = dK1/dx0 + 2 X(Psi) K1 + Psi X(K1) - 2 X^3(Psi) - 2 F_0 Psi
//   J1  = dK1/dx1 + 2 Psi K1 - 6 X^2(Psi) - 2 F_1 Psi
//   J2  = dK1/dx2 - 6 X(Psi) - 2 F_2 Psi
//
// The forms are I = d(alpha) ^ alpha with alpha = w3 - Psi w0, equal to
// -(I1 w1 + I2 w2) ^ w0 ^ alpha, and J = (J0 w0 + J1 w1 + J2 w2) ^ alpha.

Expr wunschmann(const Equation &eq);

struct KInvariants {
  Expr k0;
  Expr k1;
  /// W - K0 - 1/2 X(K1); identically zero.
  Expr residual;
};
KInvariants k_invariants(const Equation &eq);

Expr cartan(const Equation &eq);

/// Throws TrivializableBranch when d^3F/dx2^3 is symbolically zero.
Expr psi(const Equation &eq);

struct ICoefficients {
  Expr i1;
  Expr i2;
};
ICoefficients i_coefficients(const Equation &eq);

/// d(alpha) ^ alpha by exterior calculus.
Form i_form(const Equation &eq);
/// -(I1 w1 + I2 w2) ^ w0 ^ alpha from the coefficients.
Form i_form_from_coefficients(const Equation &eq);

struct JCoefficients {
  Expr j0;
  Expr j1;
  Expr j2;
  /// Whether W and I were found to vanish, the hypotheses under which J is
  /// a relative invariant.
  bool valid = false;
};
JCoefficients j_coefficients(const Equation &eq,
                             const SamplePlan &plan = SamplePlan{});
Form j_form(const Equation &eq);

/// Lazily computed invariants of one equation. Each quantity is built once
/// and reused; not safe to share between threads.
class InvariantSet {
public:
  explicit InvariantSet(Equation eq);

  const Equation &equation() const { return eq_; }
  Expr flow(const Expr &e) const { return total_derivative(eq_, e); }

  const Expr &w();
  const Expr &k0();
  const Expr &k1();
  const Expr &c();
  /// d^3F/dx2^3, whose vanishing marks the trivializable branch.
  const Expr &third_derivative();
  bool trivializable_symbolically() { return third_derivative().is_zero(); }

  const Expr &psi();
  /// X^n(Psi) for n = 0..3.
  const Expr &psi_flow(int n);
  const Expr &i1();
  const Expr &i2();
  const Expr &j0();
  const Expr &j1();
  const Expr &j2();

  Form alpha();
  Form i_form();
  Form i_form_from_coefficients();
  Form j_form();
  /// (J0 w0 + J1 w1 + J2 w2, alpha), whose wedge is J. Evaluating the
  /// factors before wedging avoids expanding a product of two large
  /// coefficients.
  std::pair<Form, Form> j_form_factors();

  /// W - K0 - 1/2 X(K1).
  Expr residual_w_k();
  /// C - (3/2 dK1/dx1 + F_2 dK1/dx2 + 3/2 dK0/dx2).
  Expr residual_c_k();
  /// C - (3/2 dW/dx2 - 3/4 X(J2) + 3/4 J1 + 1/4 F_2 J2).
  Expr residual_c_j();

private:
  const Expr &memo(std::optional<Expr> &slot, auto &&compute) {
    if (!slot) {
      slot = compute();
    }
    return *slot;
  }

  Equation eq_;
  std::optional<Expr> w_, k0_, k1_, c_, d3_, psi_, i1_, i2_, j0_, j1_, j2_;
  std::optional<Expr> xf2_, x2f2_, xf1_;
  std::array<std::optional<Expr>, 4> psi_flow_;
};

// ---------------------------------------------------------------------------
// Classification

enum class Classification {
  PointTrivializable,
  NotWunschmann,
  WunschmannNotEinsteinWeyl,
  EinsteinWeylNotHyperCR,
  HyperCREinsteinWeyl,
};

std::string_view to_string(Classification c);

/// Verdict on one invariant. `defined` is false where the invariant does not
/// exist (Psi and everything built on it for trivializable equations) or
/// where its evaluation was not needed and failed a resource guard.
struct InvariantVerdict {
  bool defined = true;
  std::string note;
  ZeroVerdict verdict;
};

struct IdentityResidual {
  std::string name;
  ZeroVerdict verdict;
};

struct InvariantReport {
  Expr rhs;
  SamplePlan plan;

  InvariantVerdict third_derivative;
  InvariantVerdict w, c, k0, k1;
  InvariantVerdict i;  // joint verdict on (I1, I2)
  InvariantVerdict j;  // joint verdict on (J0, J1, J2)
  bool j_valid = false;

  Classification classification = Classification::PointTrivializable;
  /// Set when W = I = J = 0; then C must vanish as well.
  std::optional<bool> cartan_consistent;

  std::vector<IdentityResidual> residuals;
};

/// Decision table:
///  (a) d^3F/dx2^3 = 0            -> PointTrivializable
///  (b) W != 0                     -> NotWunschmann
///  (c) W = 0, I != 0              -> C = 0 ? EinsteinWeylNotHyperCR
///                                          : WunschmannNotEinsteinWeyl
///  (d) W = 0, I = 0, J != 0       -> same split on C
///  (e) W = I = J = 0              -> HyperCREinsteinWeyl
InvariantReport classify(const Equation &eq, const SamplePlan &plan);

/// The decision table alone, as a function of the verdicts.
Classification decide(bool trivializable, bool w_zero, bool i_zero,
                      bool j_zero, bool c_zero);

} // namespace jetinv
