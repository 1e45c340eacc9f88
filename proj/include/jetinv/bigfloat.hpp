#pragma once

#include <array>
#include <compare>
#include <string>

#include <mpfr.h>

#include "jetinv/rational.hpp"

namespace jetinv {

/// MPFR number with value semantics. New values take the precision of the
/// innermost live PrecisionScope on this thread (256 bits by default);
/// results of arithmetic take the larger precision of their operands.
class BigFloat {
public:
  BigFloat();
  BigFloat(int v) : BigFloat(static_cast<long>(v)) {}
  BigFloat(long v);
  explicit BigFloat(const Rational &q);
  explicit BigFloat(long double v);
  BigFloat(const BigFloat &o);
  BigFloat(BigFloat &&o) noexcept;
  BigFloat &operator=(const BigFloat &o);
  BigFloat &operator=(BigFloat &&o) noexcept;
  ~BigFloat();

  mpfr_prec_t precision() const { return mpfr_get_prec(v_); }
  long double to_long_double() const { return mpfr_get_ld(v_, MPFR_RNDN); }
  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
  std::string to_string(int digits = 20) const;

  BigFloat &operator+=(const BigFloat &o);
  BigFloat &operator-=(const BigFloat &o);
  BigFloat &operator*=(const BigFloat &o);
  BigFloat &operator/=(const BigFloat &o);

  friend BigFloat operator+(BigFloat a, const BigFloat &b) { return a += b; }
  friend BigFloat operator-(BigFloat a, const BigFloat &b) { return a -= b; }
  friend BigFloat operator*(BigFloat a, const BigFloat &b) { return a *= b; }
  friend BigFloat operator/(BigFloat a, const BigFloat &b) { return a /= b; }
  friend BigFloat operator-(const BigFloat &a);

  friend bool operator==(const BigFloat &a, const BigFloat &b) {
    return mpfr_equal_p(a.v_, b.v_) != 0;
  }
  friend std::partial_ordering operator<=>(const BigFloat &a,
                                           const BigFloat &b);

  // Found by argument-dependent lookup from generic numeric code.
  friend BigFloat abs(const BigFloat &a);
  friend BigFloat sqrt(const BigFloat &a);
  friend BigFloat cbrt(const BigFloat &a);
  /// n-th root of a non-negative number.
  friend BigFloat rootn(const BigFloat &a, unsigned long n);
  friend BigFloat pow(const BigFloat &a, int n);
  friend bool isfinite(const BigFloat &a) { return mpfr_number_p(a.v_) != 0; }

  mpfr_srcptr get() const { return v_; }

private:
  mpfr_t v_;
};

/// Sets the working precision, in bits, for BigFloat values created while it
/// is alive.
class PrecisionScope {
public:
  explicit PrecisionScope(mpfr_prec_t bits);
  ~PrecisionScope();
  PrecisionScope(const PrecisionScope &) = delete;
  PrecisionScope &operator=(const PrecisionScope &) = delete;

  static mpfr_prec_t current();

private:
  mpfr_prec_t saved_;
};

struct BigGradient {
  BigFloat value;
  std::array<BigFloat, 4> grad;
};

} // namespace jetinv
