#include "jetinv/sampling.hpp"

#include <cmath>

#include "jetinv/errors.hpp"

namespace jetinv {

namespace {

constexpr int kGridBits = 20;
constexpr unsigned kStartBits = 192;
constexpr unsigned kMaxBits = 3072;

std::array<long double, 4> to_long_double(const JetPoint &p) {
  std::array<long double, 4> out{};
  for (int i = 0; i < 4; ++i) {
    out[i] = static_cast<long double>(p.coords[i].get_num().get_d()) /
             static_cast<long double>(p.coords[i].get_den().get_d());
  }
  return out;
}

bool guard_holds(const DomainGuard &g, const std::array<long double, 4> &p,
                 double margin) {
  try {
    const long double v = eval_scaled(g.expr, p).value;
    if (g.kind == DomainGuard::Kind::Positive) {
      return v >= margin;
    }
    return std::abs(v) >= margin;
  } catch (const Error &) {
    return false;
  }
}

// Raises the working precision until the rounding estimate is far below the
// tolerance, so cancellation among large terms cannot pass for a value.
PreciseValue precise_value(const Expr &e, const JetPoint &p, double tol) {
  PreciseValue pv;
  for (unsigned bits = kStartBits;; bits *= 2) {
    pv = eval_precise(e, p, bits);
    if (pv.error <= tol * 1e-3 || bits >= kMaxBits) {
      return pv;
    }
  }
}

} // namespace

void SamplePlan::validate() const {
  if (count == 0) {
    throw InvalidArgument("sample count must be at least 1");
  }
  if (!(tolerance > 0)) {
    throw InvalidArgument("tolerance must be positive");
  }
  if (!(margin >= 0)) {
    throw InvalidArgument("guard margin must be non-negative");
  }
  for (const auto &[lo, hi] : box) {
    if (cmp(lo, hi) > 0) {
      throw InvalidArgument("sample box is empty");
    }
  }
}

Sampler::Sampler(const SamplePlan &plan, std::vector<DomainGuard> guards)
    : plan_(plan), guards_(std::move(guards)), rng_(plan.seed),
      budget_(1000 * plan.count) {
  plan.validate();
  guards_.insert(guards_.end(), plan.guards.begin(), plan.guards.end());
}

JetPoint Sampler::draw() {
  JetPoint p;
  const Rational steps(1L << kGridBits);
  for (int i = 0; i < 4; ++i) {
    const auto &[lo, hi] = plan_.box[i];
    const auto k = static_cast<long>(rng_() >> (64 - kGridBits));
    p.coords[i] = lo + (hi - lo) * Rational(k) / steps;
  }
  return p;
}

bool Sampler::accepts(const JetPoint &p) const {
  const auto lp = to_long_double(p);
  for (const auto &g : guards_) {
    if (!guard_holds(g, lp, plan_.margin)) {
      return false;
    }
  }
  return true;
}

JetPoint Sampler::next() {
  while (attempts_ < budget_) {
    ++attempts_;
    JetPoint p = draw();
    if (accepts(p)) {
      return p;
    }
  }
  throw SamplingExhausted("no admissible sample after " +
                          std::to_string(budget_) + " attempts");
}

std::vector<JetPoint> Sampler::take(std::size_t n) {
  std::vector<JetPoint> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(next());
  }
  return out;
}

std::string_view to_string(ZeroVerdict::Status s) {
  switch (s) {
  case ZeroVerdict::Status::SymbolicZero:
    return "symbolic_zero";
  case ZeroVerdict::Status::NumericallyZero:
    return "numeric_zero";
  case ZeroVerdict::Status::NonZero:
    return "nonzero";
  }
  return "?";
}

ZeroVerdict is_zero(const Expr &e, const SamplePlan &plan) {
  ZeroVerdict v;
  if (e.is_zero()) {
    return v;
  }
  if (auto c = e.constant_value()) {
    // A nonzero constant needs no sampling, but the witness must still be an
    // admissible point of the plan.
    Sampler s(plan, {});
    v.status = ZeroVerdict::Status::NonZero;
    v.witness = s.next();
    v.witness_value = c->get_d();
    v.max_abs = std::abs(v.witness_value);
    v.samples = 1;
    return v;
  }
  Sampler sampler(plan, domain_guards(e));
  v.status = ZeroVerdict::Status::NumericallyZero;
  std::size_t accepted = 0;
  while (accepted < plan.count) {
    JetPoint p = sampler.next();
    PreciseValue pv;
    try {
      pv = precise_value(e, p, plan.tolerance);
    } catch (const Error &) {
      continue;
    }
    ++accepted;
    const double abs = static_cast<double>(std::abs(pv.value));
    v.max_abs = std::max(v.max_abs, abs);
    v.max_error = std::max(v.max_error, static_cast<double>(pv.error));
    if (std::abs(pv.value) - pv.error > plan.tolerance && !v.witness) {
      v.status = ZeroVerdict::Status::NonZero;
      v.witness = p;
      v.witness_value = static_cast<double>(pv.value);
    }
  }
  v.samples = accepted;
  return v;
}

ZeroVerdict all_zero(std::span<const Expr> exprs, const SamplePlan &plan) {
  ZeroVerdict joint;
  for (const auto &e : exprs) {
    ZeroVerdict v = is_zero(e, plan);
    if (!v.zero()) {
      return v;
    }
    if (v.status == ZeroVerdict::Status::NumericallyZero) {
      joint.status = ZeroVerdict::Status::NumericallyZero;
    }
    joint.max_abs = std::max(joint.max_abs, v.max_abs);
    joint.max_error = std::max(joint.max_error, v.max_error);
    joint.samples = std::max(joint.samples, v.samples);
  }
  return joint;
}

} // namespace jetinv
