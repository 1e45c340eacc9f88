#include "jetinv/rational.hpp"

#include <limits>

#include "jetinv/errors.hpp"

namespace jetinv {

namespace {

std::size_t hash_mpz(mpz_srcptr z) noexcept {
  std::size_t h = static_cast<std::size_t>(z->_mp_size) * 0x9e3779b97f4a7c15ULL;
  const int n = z->_mp_size < 0 ? -z->_mp_size : z->_mp_size;
  for (int i = 0; i < n; ++i) {
    h ^= static_cast<std::size_t>(z->_mp_d[i]) + 0x9e3779b97f4a7c15ULL +
         (h << 6) + (h >> 2);
  }
  return h;
}

std::int64_t checked(__int128 v) {
  if (v > std::numeric_limits<std::int64_t>::max() ||
      v < std::numeric_limits<std::int64_t>::min()) {
    throw OverflowError("exponent arithmetic overflow");
  }
  return static_cast<std::int64_t>(v);
}

std::optional<mpz_class> exact_root_z(const mpz_class &z, unsigned long n) {
  mpz_class r;
  if (mpz_root(r.get_mpz_t(), z.get_mpz_t(), n) == 0) {
    return std::nullopt;
  }
  return r;
}

} // namespace

std::size_t hash_value(const Rational &q) noexcept {
  return hash_mpz(q.get_num_mpz_t()) * 31 + hash_mpz(q.get_den_mpz_t());
}

std::optional<Rational> exact_root(const Rational &q, std::int64_t n) {
  if (n <= 0) {
    return std::nullopt;
  }
  if (n == 1) {
    return q;
  }
  if (sgn(q) < 0 && n % 2 == 0) {
    return std::nullopt;
  }
  auto num = exact_root_z(q.get_num(), static_cast<unsigned long>(n));
  auto den = exact_root_z(q.get_den(), static_cast<unsigned long>(n));
  if (!num || !den) {
    return std::nullopt;
  }
  Rational r(*num, *den);
  r.canonicalize();
  return r;
}

Rational rational_pow(const Rational &q, std::int64_t k) {
  if (k == 0) {
    return Rational(1);
  }
  if (sgn(q) == 0) {
    if (k < 0) {
      throw DivisionByZero("zero raised to a negative power");
    }
    return Rational(0);
  }
  const auto e = static_cast<unsigned long>(k < 0 ? -k : k);
  mpz_class num, den;
  mpz_pow_ui(num.get_mpz_t(), q.get_num_mpz_t(), e);
  mpz_pow_ui(den.get_mpz_t(), q.get_den_mpz_t(), e);
  Rational r = k < 0 ? Rational(den, num) : Rational(num, den);
  r.canonicalize();
  return r;
}

std::string to_string(const Rational &q) { return q.get_str(); }

Exponent::Exponent(std::int64_t num, std::int64_t den) {
  if (den == 0) {
    throw DivisionByZero("exponent with zero denominator");
  }
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const std::int64_t g = std::gcd(num, den);
  num_ = g == 0 ? 0 : num / g;
  den_ = g == 0 ? 1 : den / g;
}

std::string Exponent::to_string() const {
  if (den_ == 1) {
    return std::to_string(num_);
  }
  return std::to_string(num_) + "/" + std::to_string(den_);
}

Exponent operator+(Exponent a, Exponent b) {
  return Exponent(checked(static_cast<__int128>(a.num_) * b.den_ +
                          static_cast<__int128>(b.num_) * a.den_),
                  checked(static_cast<__int128>(a.den_) * b.den_));
}

Exponent operator-(Exponent a, Exponent b) { return a + (-b); }

Exponent operator*(Exponent a, Exponent b) {
  return Exponent(checked(static_cast<__int128>(a.num_) * b.num_),
                  checked(static_cast<__int128>(a.den_) * b.den_));
}

} // namespace jetinv
