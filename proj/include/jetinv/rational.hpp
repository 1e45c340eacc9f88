#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <string>

#include <gmpxx.h>

namespace jetinv {

/// Exact arbitrary-precision rational, always kept in lowest terms.
using Rational = mpq_class;

std::size_t hash_value(const Rational &q) noexcept;

/// Exact n-th root of q if it is rational (negative q allowed for odd n).
std::optional<Rational> exact_root(const Rational &q, std::int64_t n);

/// q^k for integer k; throws DivisionByZero for 0^k with k < 0.
Rational rational_pow(const Rational &q, std::int64_t k);

std::string to_string(const Rational &q);

/// Small exact rational used for power exponents. Exponents that appear in
/// practice are tiny; arithmetic overflow is reported rather than wrapped.
class Exponent {
public:
  constexpr Exponent() = default;
  constexpr Exponent(std::int64_t n) : num_(n), den_(1) {} // NOLINT
  Exponent(std::int64_t num, std::int64_t den);

  constexpr std::int64_t num() const { return num_; }
  constexpr std::int64_t den() const { return den_; }
  constexpr bool is_integer() const { return den_ == 1; }
  constexpr bool is_zero() const { return num_ == 0; }
  constexpr bool is_one() const { return num_ == 1 && den_ == 1; }
  constexpr bool is_negative() const { return num_ < 0; }
  /// A non-negative integer, i.e. a polynomial power.
  constexpr bool is_natural() const { return den_ == 1 && num_ >= 0; }

  Rational to_rational() const { return Rational(num_, den_); }
  double to_double() const {
    return static_cast<double>(num_) / static_cast<double>(den_);
  }
  std::string to_string() const;

  friend Exponent operator+(Exponent a, Exponent b);
  friend Exponent operator-(Exponent a, Exponent b);
  friend Exponent operator*(Exponent a, Exponent b);
  friend Exponent operator-(Exponent a) { return Exponent(-a.num_, a.den_); }
  friend constexpr bool operator==(Exponent a, Exponent b) = default;
  friend std::strong_ordering operator<=>(Exponent a, Exponent b) {
    return static_cast<__int128>(a.num_) * b.den_ <=>
           static_cast<__int128>(b.num_) * a.den_;
  }

private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

} // namespace jetinv
