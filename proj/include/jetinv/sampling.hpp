#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "jetinv/expr.hpp"

namespace jetinv {

/// How numeric zero tests pick their points.
struct SamplePlan {
  static constexpr std::uint64_t kDefaultSeed = 0xDA7A;

  std::size_t count = 12;
  std::uint64_t seed = kDefaultSeed;
  /// Per-coordinate closed interval, indexed like Var.
  std::array<std::pair<Rational, Rational>, 4> box{
      {{-2, 2}, {-2, 2}, {-2, 2}, {-2, 2}}};
  double tolerance = 1e-9;
  /// Extra conditions on accepted samples, on top of the guards extracted
  /// from whatever expression is being tested.
  std::vector<DomainGuard> guards;
  double margin = 0.05;

  /// Throws InvalidArgument on count 0, non-positive tolerance or an empty box.
  void validate() const;
};

/// Deterministic stream of guard-respecting sample points.
class Sampler {
public:
  Sampler(const SamplePlan &plan, std::vector<DomainGuard> guards);

  /// Next accepted point. Throws SamplingExhausted once the attempt budget
  /// (1000 per requested sample) runs out.
  JetPoint next();

  /// The first `n` accepted points.
  std::vector<JetPoint> take(std::size_t n);

  bool accepts(const JetPoint &p) const;

private:
  JetPoint draw();

  SamplePlan plan_;
  std::vector<DomainGuard> guards_;
  std::mt19937_64 rng_;
  std::size_t attempts_ = 0;
  std::size_t budget_;
};

struct ZeroVerdict {
  enum class Status { SymbolicZero, NumericallyZero, NonZero };

  Status status = Status::SymbolicZero;
  /// Largest |value| over the samples (0 for SymbolicZero).
  double max_abs = 0;
  /// Largest estimated rounding error over the samples.
  double max_error = 0;
  std::size_t samples = 0;
  std::optional<JetPoint> witness;
  double witness_value = 0;

  bool zero() const { return status != Status::NonZero; }
};

std::string_view to_string(ZeroVerdict::Status s);

/// Symbolic zero if the canonical form is 0; otherwise evaluates at
/// `plan.count` accepted samples in MPFR, raising the precision until the
/// rounding estimate is below tol / 1000. A sample counts as zero when
/// |value| - error <= tol.
ZeroVerdict is_zero(const Expr &e, const SamplePlan &plan);

/// Joint verdict: zero iff every member is zero. The first nonzero member's
/// witness is reported.
ZeroVerdict all_zero(std::span<const Expr> exprs, const SamplePlan &plan);

} // namespace jetinv
