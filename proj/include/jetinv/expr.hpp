#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "jetinv/rational.hpp"

namespace jetinv {

/// Coordinates on the 2-jet space: t, x0 = x, x1 = x', x2 = x''.
enum class Var : std::uint8_t { t = 0, x0 = 1, x1 = 2, x2 = 3 };

inline constexpr std::array<Var, 4> kJetVars{Var::t, Var::x0, Var::x1,
                                             Var::x2};

constexpr int index_of(Var v) { return static_cast<int>(v); }
constexpr std::uint8_t mask_of(Var v) {
  return static_cast<std::uint8_t>(1u << index_of(v));
}
std::string_view var_name(Var v);

class Expr;

namespace detail {
struct ExprNode;
}

/// Base of a power factor: either a jet coordinate or a canonical expression
/// that is kept unexpanded (a radical or an inverse of a sum).
class Atom {
public:
  static Atom variable(Var v);
  static Atom compound(const Expr &base);

  bool is_variable() const { return var_ >= 0; }
  Var var() const { return static_cast<Var>(var_); }
  /// Only meaningful for compound atoms.
  Expr base() const;
  const detail::ExprNode *base_node() const { return base_.get(); }

  std::size_t hash() const { return hash_; }
  std::uint8_t dependencies() const { return deps_; }

  friend int compare(const Atom &a, const Atom &b);
  friend bool operator==(const Atom &a, const Atom &b) {
    return compare(a, b) == 0;
  }

private:
  std::int8_t var_ = -1;
  std::uint8_t deps_ = 0;
  std::size_t hash_ = 0;
  std::shared_ptr<const detail::ExprNode> base_;
};

struct Factor {
  Atom atom;
  Exponent exponent;
};

/// Product of factors sorted by atom; empty for the constant monomial.
using Monomial = std::vector<Factor>;

int compare(const Monomial &a, const Monomial &b);

struct Term {
  Monomial monomial;
  Rational coef;
};

enum class ExprKind { Constant, Variable, Sum, Product, Power };

/// Immutable symbolic expression over t, x0, x1, x2.
///
/// Every value is held in canonical form: a sum of terms with nonzero exact
/// rational coefficients over distinct monomials in a fixed total order.
/// Natural powers of sums are always expanded, so the polynomial fragment
/// has a unique representation. Fractional and negative powers of sums (and
/// of constants that are not perfect powers) are atomic factors that
/// multiply by exponent addition.
class Expr {
public:
  Expr();
  Expr(int value);             // NOLINT
  Expr(long value);            // NOLINT
  Expr(const Rational &value); // NOLINT

  static Expr variable(Var v);
  static Expr t() { return variable(Var::t); }
  static Expr x0() { return variable(Var::x0); }
  static Expr x1() { return variable(Var::x1); }
  static Expr x2() { return variable(Var::x2); }

  ExprKind kind() const;
  std::span<const Term> terms() const;

  bool is_zero() const;
  bool is_constant() const;
  std::optional<Rational> constant_value() const;
  bool depends_on(Var v) const { return (dependencies() & mask_of(v)) != 0; }
  std::uint8_t dependencies() const;

  std::size_t hash() const;
  /// Size measure used by the expression-size guard.
  std::size_t node_count() const;

  friend bool operator==(const Expr &a, const Expr &b);

  friend Expr operator+(const Expr &a, const Expr &b);
  friend Expr operator-(const Expr &a, const Expr &b);
  friend Expr operator*(const Expr &a, const Expr &b);
  friend Expr operator/(const Expr &a, const Expr &b);
  friend Expr operator-(const Expr &a);

  Expr &operator+=(const Expr &b) { return *this = *this + b; }
  Expr &operator-=(const Expr &b) { return *this = *this - b; }
  Expr &operator*=(const Expr &b) { return *this = *this * b; }

  const detail::ExprNode *node() const { return node_.get(); }
  explicit Expr(std::shared_ptr<const detail::ExprNode> node)
      : node_(std::move(node)) {}
  const std::shared_ptr<const detail::ExprNode> &shared_node() const {
    return node_;
  }

private:
  std::shared_ptr<const detail::ExprNode> node_;
};

Expr pow(const Expr &base, Exponent e);
Expr sqrt(const Expr &e);

/// Re-derives the canonical form from scratch; idempotent.
Expr simplify(const Expr &e);

/// Exact partial derivative.
Expr diff(const Expr &e, Var v);
Expr diff(const Expr &e, Var v, int order);

/// Simultaneous substitution; unbound variables are left alone.
using Bindings = std::array<std::optional<Expr>, 4>;
Expr substitute(const Expr &e, const Bindings &bindings);

/// Guard on the node count of every constructed expression.
void set_expression_size_limit(std::size_t limit);
std::size_t expression_size_limit();

// ---------------------------------------------------------------------------
// Evaluation

/// A point (t, x0, x1, x2) of the 2-jet space with exact coordinates.
struct JetPoint {
  std::array<Rational, 4> coords;

  const Rational &operator[](Var v) const { return coords[index_of(v)]; }
  std::array<double, 4> to_double() const;
};

using FloatPoint = std::array<double, 4>;

Rational eval_exact(const Expr &e, const JetPoint &p);
double eval_float(const Expr &e, const JetPoint &p);
double eval_float(const Expr &e, const FloatPoint &p);

/// Extended-precision evaluation that also reports the sum of absolute
/// values of the top-level terms, the natural scale for cancellation error.
struct ScaledValue {
  long double value = 0;
  long double scale = 0;
};
ScaledValue eval_scaled(const Expr &e, const std::array<long double, 4> &p);

class BigFloat;
/// Evaluation in MPFR at the working precision of the point's values.
BigFloat eval_big(const Expr &e, const std::array<BigFloat, 4> &p,
                  BigFloat *scale = nullptr);

/// Value and gradient (d/dt, d/dx0, d/dx1, d/dx2) in one forward pass, for
/// expressions too large to differentiate symbolically.
struct BigGradient;
BigGradient eval_big_gradient(const Expr &e, const std::array<BigFloat, 4> &p);

/// Evaluation at an exact point with `bits` and `bits + 64` bits of
/// precision; `error` is the difference of the two, an estimate of the
/// rounding error left in `value` after cancellation.
struct PreciseValue {
  long double value = 0;
  long double scale = 0;
  long double error = 0;
  unsigned bits = 0;
};
PreciseValue eval_precise(const Expr &e, const JetPoint &p,
                          unsigned bits = 256);

// ---------------------------------------------------------------------------
// Domains

/// A condition that must hold strictly away from its boundary at samples:
/// `Positive` means expr >= margin, `NonZero` means |expr| >= margin.
struct DomainGuard {
  enum class Kind { Positive, NonZero };
  Expr expr;
  Kind kind;
};

/// Guards for every even root and negative power occurring in e, innermost
/// first. Bases that are constants are skipped.
std::vector<DomainGuard> domain_guards(const Expr &e);

} // namespace jetinv
