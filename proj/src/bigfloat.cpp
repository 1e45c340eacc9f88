#include "jetinv/bigfloat.hpp"

#include <algorithm>
#include <cstdio>
#include <vector>

namespace jetinv {

namespace {

thread_local mpfr_prec_t working_precision = 256;

} // namespace

PrecisionScope::PrecisionScope(mpfr_prec_t bits) : saved_(working_precision) {
  working_precision = std::clamp<mpfr_prec_t>(bits, MPFR_PREC_MIN, 1 << 16);
}

PrecisionScope::~PrecisionScope() { working_precision = saved_; }

mpfr_prec_t PrecisionScope::current() { return working_precision; }

BigFloat::BigFloat() {
  mpfr_init2(v_, working_precision);
  mpfr_set_zero(v_, 1);
}

BigFloat::BigFloat(long v) {
  mpfr_init2(v_, working_precision);
  mpfr_set_si(v_, v, MPFR_RNDN);
}

BigFloat::BigFloat(const Rational &q) {
  mpfr_init2(v_, working_precision);
  mpfr_set_q(v_, q.get_mpq_t(), MPFR_RNDN);
}

BigFloat::BigFloat(long double v) {
  mpfr_init2(v_, working_precision);
  mpfr_set_ld(v_, v, MPFR_RNDN);
}

BigFloat::BigFloat(const BigFloat &o) {
  mpfr_init2(v_, mpfr_get_prec(o.v_));
  mpfr_set(v_, o.v_, MPFR_RNDN);
}

BigFloat::BigFloat(BigFloat &&o) noexcept {
  // Leave `o` as a valid minimal-precision zero.
  mpfr_init2(v_, MPFR_PREC_MIN);
  mpfr_swap(v_, o.v_);
}

BigFloat &BigFloat::operator=(const BigFloat &o) {
  if (this != &o) {
    mpfr_set_prec(v_, mpfr_get_prec(o.v_));
    mpfr_set(v_, o.v_, MPFR_RNDN);
  }
  return *this;
}

BigFloat &BigFloat::operator=(BigFloat &&o) noexcept {
  mpfr_swap(v_, o.v_);
  return *this;
}

BigFloat::~BigFloat() { mpfr_clear(v_); }

namespace {

void widen(mpfr_t v, mpfr_srcptr o) {
  if (mpfr_get_prec(o) > mpfr_get_prec(v)) {
    mpfr_prec_round(v, mpfr_get_prec(o), MPFR_RNDN);
  }
}

} // namespace

BigFloat &BigFloat::operator+=(const BigFloat &o) {
  widen(v_, o.v_);
  mpfr_add(v_, v_, o.v_, MPFR_RNDN);
  return *this;
}

BigFloat &BigFloat::operator-=(const BigFloat &o) {
  widen(v_, o.v_);
  mpfr_sub(v_, v_, o.v_, MPFR_RNDN);
  return *this;
}

BigFloat &BigFloat::operator*=(const BigFloat &o) {
  widen(v_, o.v_);
  mpfr_mul(v_, v_, o.v_, MPFR_RNDN);
  return *this;
}

BigFloat &BigFloat::operator/=(const BigFloat &o) {
  widen(v_, o.v_);
  mpfr_div(v_, v_, o.v_, MPFR_RNDN);
  return *this;
}

BigFloat operator-(const BigFloat &a) {
  BigFloat out(a);
  mpfr_neg(out.v_, out.v_, MPFR_RNDN);
  return out;
}

std::partial_ordering operator<=>(const BigFloat &a, const BigFloat &b) {
  if (mpfr_unordered_p(a.v_, b.v_)) {
    return std::partial_ordering::unordered;
  }
  const int c = mpfr_cmp(a.v_, b.v_);
  return c < 0   ? std::partial_ordering::less
         : c > 0 ? std::partial_ordering::greater
                 : std::partial_ordering::equivalent;
}

BigFloat abs(const BigFloat &a) {
  BigFloat out(a);
  mpfr_abs(out.v_, out.v_, MPFR_RNDN);
  return out;
}

BigFloat sqrt(const BigFloat &a) {
  BigFloat out(a);
  mpfr_sqrt(out.v_, out.v_, MPFR_RNDN);
  return out;
}

BigFloat cbrt(const BigFloat &a) {
  BigFloat out(a);
  mpfr_cbrt(out.v_, out.v_, MPFR_RNDN);
  return out;
}

BigFloat rootn(const BigFloat &a, unsigned long n) {
  BigFloat out(a);
  mpfr_rootn_ui(out.v_, out.v_, n, MPFR_RNDN);
  return out;
}

BigFloat pow(const BigFloat &a, int n) {
  BigFloat out(a);
  mpfr_pow_si(out.v_, out.v_, n, MPFR_RNDN);
  return out;
}

std::string BigFloat::to_string(int digits) const {
  char *s = nullptr;
  mpfr_asprintf(&s, "%.*Rg", digits, v_);
  std::string out = s ? s : "";
  mpfr_free_str(s);
  return out;
}

} // namespace jetinv
