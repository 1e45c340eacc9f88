#include "jetinv/expr.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <unordered_map>
#include <unordered_set>

#include "jetinv/bigfloat.hpp"
#include "jetinv/errors.hpp"

namespace jetinv {

namespace detail {

struct ExprNode {
  std::vector<Term> terms;
  std::size_t hash = 0;
  std::size_t size = 0;
  std::uint8_t deps = 0;
  // Set when the node is a*v + b with a != 0: the index of v, else -1.
  std::int8_t linear_var = -1;
  Rational linear_a, linear_b;

  // Partial derivatives, filled lazily. Only used for atom bases, which are
  // differentiated over and over by repeated total derivatives.
  mutable std::array<std::once_flag, 4> diff_once;
  mutable std::array<std::shared_ptr<const ExprNode>, 4> diff_cache;
};

} // namespace detail

using detail::ExprNode;
using NodePtr = std::shared_ptr<const ExprNode>;

namespace {

std::atomic<std::size_t> g_size_limit{2'000'000};

inline std::size_t mix(std::size_t h, std::size_t v) {
  return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

int compare_nodes(const ExprNode &a, const ExprNode &b);

int compare_factor(const Factor &a, const Factor &b) {
  if (int c = compare(a.atom, b.atom); c != 0) {
    return c;
  }
  auto o = a.exponent <=> b.exponent;
  return o < 0 ? -1 : (o > 0 ? 1 : 0);
}

int compare_nodes(const ExprNode &a, const ExprNode &b) {
  if (&a == &b) {
    return 0;
  }
  if (a.terms.size() != b.terms.size()) {
    return a.terms.size() < b.terms.size() ? -1 : 1;
  }
  for (std::size_t i = 0; i < a.terms.size(); ++i) {
    if (int c = compare(a.terms[i].monomial, b.terms[i].monomial); c != 0) {
      return c;
    }
    if (int c = cmp(a.terms[i].coef, b.terms[i].coef); c != 0) {
      return c < 0 ? -1 : 1;
    }
  }
  return 0;
}

std::size_t hash_monomial(const Monomial &m) {
  std::size_t h = 0x51ed27;
  for (const auto &f : m) {
    h = mix(h, f.atom.hash());
    h = mix(h, static_cast<std::size_t>(f.exponent.num()) * 1315423911u +
                   static_cast<std::size_t>(f.exponent.den()));
  }
  return h;
}

struct MonomialHash {
  std::size_t operator()(const Monomial &m) const { return hash_monomial(m); }
};
struct MonomialEq {
  bool operator()(const Monomial &a, const Monomial &b) const {
    return compare(a, b) == 0;
  }
};

// A compound atom raised to a natural power must be multiplied out.
bool needs_expansion(const Factor &f) {
  return !f.atom.is_variable() && f.exponent.is_natural();
}

NodePtr make_node(std::vector<Term> terms) {
  auto node = std::make_shared<ExprNode>();
  std::size_t h = 0xcbf29ce484222325ULL;
  std::size_t size = 0;
  std::uint8_t deps = 0;
  std::unordered_set<const ExprNode *> bases;
  for (const auto &t : terms) {
    h = mix(h, hash_monomial(t.monomial));
    h = mix(h, hash_value(t.coef));
    size += 1 + t.monomial.size();
    for (const auto &f : t.monomial) {
      deps |= f.atom.dependencies();
      if (!f.atom.is_variable() && bases.insert(f.atom.base_node()).second) {
        size += f.atom.base_node()->size;
      }
    }
  }
  if (size > g_size_limit.load(std::memory_order_relaxed)) {
    throw ExpressionTooLarge("expression node count " + std::to_string(size) +
                             " exceeds the limit of " +
                             std::to_string(g_size_limit.load()));
  }
  node->terms = std::move(terms);
  if (node->terms.size() <= 2) {
    int linear = 0, constant = 0;
    for (const auto &t : node->terms) {
      if (t.monomial.empty()) {
        ++constant;
        node->linear_b = t.coef;
      } else if (t.monomial.size() == 1 && t.monomial[0].atom.is_variable() &&
                 t.monomial[0].exponent.is_one()) {
        ++linear;
        node->linear_a = t.coef;
        node->linear_var =
            static_cast<std::int8_t>(index_of(t.monomial[0].atom.var()));
      }
    }
    if (linear != 1 || linear + constant != static_cast<int>(node->terms.size())) {
      node->linear_var = -1;
    }
  }
  node->hash = h;
  node->size = std::max<std::size_t>(size, 1);
  node->deps = deps;
  return node;
}

const NodePtr &zero_node() {
  static const NodePtr z = make_node({});
  return z;
}

// Laurent normal form: no monomial holds both v^k (k > 0) and B^-j where
// B = a*v + b. Such a term is rewritten with v = (B - b)/a, so that sums over
// powers of B cancel like polynomials.
struct LaurentSite {
  std::size_t var_pos;
  std::size_t atom_pos;
};

std::optional<LaurentSite> laurent_site(const Monomial &m) {
  for (std::size_t j = 0; j < m.size(); ++j) {
    const Factor &f = m[j];
    if (f.atom.is_variable() || !f.exponent.is_integer() ||
        !f.exponent.is_negative()) {
      continue;
    }
    const int v = f.atom.base_node()->linear_var;
    if (v < 0) {
      continue;
    }
    for (std::size_t i = 0; i < m.size() && m[i].atom.is_variable(); ++i) {
      if (index_of(m[i].atom.var()) == v) {
        return LaurentSite{i, j};
      }
    }
  }
  return std::nullopt;
}

Expr from_term(Monomial m, Rational c);

Expr laurent_rewrite(const Monomial &m, const Rational &c,
                     const LaurentSite &site) {
  const Factor &b_factor = m[site.atom_pos];
  const ExprNode &base = *b_factor.atom.base_node();
  const std::int64_t k = m[site.var_pos].exponent.num();
  Monomial rest;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (i != site.var_pos && i != site.atom_pos) {
      rest.push_back(m[i]);
    }
  }
  auto pos = std::lower_bound(rest.begin(), rest.end(), b_factor.atom,
                              [](const Factor &f, const Atom &a) {
                                return compare(f.atom, a) < 0;
                              });
  const std::size_t insert_at = static_cast<std::size_t>(pos - rest.begin());
  // v^k = a^-k * sum_i C(k, i) B^i (-b)^(k - i)
  const Rational inv_ak = rational_pow(Rational(1) / base.linear_a, k);
  Expr out;
  mpz_class binom = 1;
  for (std::int64_t i = 0; i <= k; ++i) {
    if (i > 0) {
      binom = binom * (k - i + 1) / i;
    }
    const Rational coef = c * inv_ak * Rational(binom) *
                          rational_pow(-base.linear_b, k - i);
    if (sgn(coef) == 0) {
      continue;
    }
    Monomial piece = rest;
    const Exponent e = b_factor.exponent + Exponent(i);
    if (!e.is_zero()) {
      piece.insert(piece.begin() + static_cast<std::ptrdiff_t>(insert_at),
                   Factor{b_factor.atom, e});
    }
    out = out + from_term(std::move(piece), coef);
  }
  return out;
}

/// Collects terms keyed by monomial; the workhorse of sums and products.
class Accumulator {
public:
  void add(Monomial m, const Rational &c) {
    if (sgn(c) == 0) {
      return;
    }
    auto [it, inserted] = map_.try_emplace(std::move(m), c);
    if (!inserted) {
      it->second += c;
    }
  }

  void add(const Expr &e, const Rational &scale = Rational(1)) {
    for (const auto &t : e.terms()) {
      add(t.monomial, t.coef * scale);
    }
  }

  /// Adds (coef * mono) * e, expanding compound atoms that become natural.
  void add_product(const Monomial &mono, const Rational &coef, const Expr &e);

  Expr finish() {
    for (bool again = true; again;) {
      again = false;
      std::vector<std::pair<Monomial, Rational>> pending;
      for (auto it = map_.begin(); it != map_.end();) {
        if (sgn(it->second) != 0 && laurent_site(it->first)) {
          pending.emplace_back(it->first, it->second);
          it = map_.erase(it);
        } else {
          ++it;
        }
      }
      for (auto &[m, c] : pending) {
        add(laurent_rewrite(m, c, *laurent_site(m)));
        again = true;
      }
    }
    std::vector<Term> terms;
    terms.reserve(map_.size());
    for (auto &[m, c] : map_) {
      if (sgn(c) != 0) {
        terms.push_back(Term{m, c});
      }
    }
    map_.clear();
    std::sort(terms.begin(), terms.end(), [](const Term &a, const Term &b) {
      return compare(a.monomial, b.monomial) < 0;
    });
    return Expr(make_node(std::move(terms)));
  }

private:
  std::unordered_map<Monomial, Rational, MonomialHash, MonomialEq> map_;
};

struct MergeResult {
  Monomial monomial;
  std::vector<Factor> expand; // compound factors left with natural exponents
};

MergeResult merge_monomials(const Monomial &a, const Monomial &b) {
  MergeResult r;
  r.monomial.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    int c;
    if (i == a.size()) {
      c = 1;
    } else if (j == b.size()) {
      c = -1;
    } else {
      c = compare(a[i].atom, b[j].atom);
    }
    if (c < 0) {
      r.monomial.push_back(a[i++]);
    } else if (c > 0) {
      r.monomial.push_back(b[j++]);
    } else {
      Exponent e = a[i].exponent + b[j].exponent;
      if (!e.is_zero()) {
        Factor f{a[i].atom, e};
        if (needs_expansion(f)) {
          r.expand.push_back(std::move(f));
        } else {
          r.monomial.push_back(std::move(f));
        }
      }
      ++i;
      ++j;
    }
  }
  return r;
}

Expr from_term(Monomial m, Rational c);

void Accumulator::add_product(const Monomial &mono, const Rational &coef,
                              const Expr &e) {
  for (const auto &t : e.terms()) {
    MergeResult r = merge_monomials(mono, t.monomial);
    if (r.expand.empty()) {
      add(std::move(r.monomial), coef * t.coef);
    } else {
      Expr acc = from_term(std::move(r.monomial), coef * t.coef);
      for (const auto &f : r.expand) {
        acc = acc * pow(f.atom.base(), f.exponent);
      }
      add(acc);
    }
  }
}

Expr single_term(Monomial m, Rational c) {
  if (sgn(c) == 0) {
    return Expr();
  }
  if (auto site = laurent_site(m)) {
    return laurent_rewrite(m, c, *site);
  }
  std::vector<Term> terms;
  terms.push_back(Term{std::move(m), std::move(c)});
  return Expr(make_node(std::move(terms)));
}

/// Builds c * m where m may contain compound factors with natural exponents.
Expr from_term(Monomial m, Rational c) {
  std::vector<Factor> expand;
  Monomial kept;
  kept.reserve(m.size());
  for (auto &f : m) {
    if (f.exponent.is_zero()) {
      continue;
    }
    if (needs_expansion(f)) {
      expand.push_back(std::move(f));
    } else {
      kept.push_back(std::move(f));
    }
  }
  Expr r = single_term(std::move(kept), std::move(c));
  for (const auto &f : expand) {
    r = r * pow(f.atom.base(), f.exponent);
  }
  return r;
}

Expr atom_power(const Expr &base, Exponent e) {
  Monomial m;
  m.push_back(Factor{Atom::compound(base), e});
  return from_term(std::move(m), Rational(1));
}

/// gcd of numerators over lcm of denominators, signed like the first term.
Rational content(const Expr &e) {
  mpz_class num = 0, den = 1;
  for (const auto &t : e.terms()) {
    mpz_gcd(num.get_mpz_t(), num.get_mpz_t(), t.coef.get_num_mpz_t());
    mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), t.coef.get_den_mpz_t());
  }
  Rational c(num, den);
  c.canonicalize();
  if (sgn(e.terms().front().coef) < 0) {
    c = -c;
  }
  return c;
}

/// Whether (f^e)^q = f^(e*q) holds on the real domain of the left side.
bool distributable(Exponent e, Exponent q) {
  if (q.is_integer() || e.den() % 2 == 0) {
    return true;
  }
  if (q.den() % 2 == 1) {
    return true;
  }
  return e.num() % 2 != 0;
}

/// c^q for rational c when it is rational.
std::optional<Rational> rational_power(const Rational &c, Exponent q) {
  if (q.is_integer()) {
    return rational_pow(c, q.num());
  }
  auto root = exact_root(c, q.den());
  if (!root) {
    return std::nullopt;
  }
  return rational_pow(*root, q.num());
}

Expr natural_power(const Expr &base, std::int64_t n) {
  Expr result(1);
  Expr b = base;
  while (n > 0) {
    if (n & 1) {
      result = result * b;
    }
    n >>= 1;
    if (n > 0) {
      b = b * b;
    }
  }
  return result;
}

bool is_polynomial(const Expr &e) {
  for (const auto &t : e.terms()) {
    for (const auto &f : t.monomial) {
      if (!f.atom.is_variable() || !f.exponent.is_natural()) {
        return false;
      }
    }
  }
  return true;
}

Expr power_of_sum(const Expr &u, Exponent q);

/// Brings a sum with negative integer powers of polynomials over a common
/// denominator before raising it to q: u^q = N^q * prod (B^k)^-q with
/// N = u * prod B^k. Declines when nothing is cleared or N is larger than u.
std::optional<Expr> power_over_common_denominator(const Expr &u, Exponent q) {
  std::vector<Factor> den;
  for (const auto &t : u.terms()) {
    for (const auto &f : t.monomial) {
      if (f.atom.is_variable() || !f.exponent.is_integer() ||
          !f.exponent.is_negative() || !is_polynomial(f.atom.base())) {
        continue;
      }
      auto it = std::find_if(den.begin(), den.end(), [&](const Factor &d) {
        return compare(d.atom, f.atom) == 0;
      });
      const Exponent k = -f.exponent;
      if (it == den.end()) {
        den.push_back(Factor{f.atom, k});
      } else if (it->exponent < k) {
        it->exponent = k;
      }
    }
  }
  if (den.empty()) {
    return std::nullopt;
  }
  // With an even root, (B^k)^-q = |B|^-kq needs k even to stay a power of a
  // positive polynomial.
  const bool even_root = !q.is_integer() && q.den() % 2 == 0;
  if (even_root) {
    for (auto &d : den) {
      if (d.exponent.num() % 2 != 0) {
        d.exponent = d.exponent + Exponent(1);
      }
    }
  }
  std::sort(den.begin(), den.end(), [](const Factor &a, const Factor &b) {
    return compare(a.atom, b.atom) < 0;
  });

  Accumulator acc;
  for (const auto &t : u.terms()) {
    MergeResult r = merge_monomials(den, t.monomial);
    Expr piece = from_term(std::move(r.monomial), t.coef);
    for (const auto &f : r.expand) {
      piece = piece * pow(f.atom.base(), f.exponent);
    }
    acc.add(piece);
  }
  const Expr numerator = acc.finish();
  if (numerator.node_count() > u.node_count()) {
    return std::nullopt;
  }
  Expr out = pow(numerator, q);
  for (const auto &d : den) {
    if (even_root) {
      out = out * power_of_sum(natural_power(d.atom.base(), d.exponent.num()),
                               -q);
    } else {
      out = out * from_term(Monomial{Factor{d.atom, -(d.exponent * q)}},
                            Rational(1));
    }
  }
  return out;
}

Expr power_of_sum(const Expr &u, Exponent q) {
  if (q.is_natural()) {
    return natural_power(u, q.num());
  }
  if (auto cleared = power_over_common_denominator(u, q)) {
    return *cleared;
  }
  const Rational c = content(u);
  const std::array<Rational, 2> candidates{c, Rational(sgn(c))};
  for (const auto &k : candidates) {
    if (auto kq = rational_power(k, q)) {
      Accumulator acc;
      acc.add(u, Rational(1) / k);
      return Expr(*kq) * atom_power(acc.finish(), q);
    }
  }
  return atom_power(u, q);
}

Expr power_of_term(const Expr &u, Exponent q) {
  const Term &t = u.terms().front();
  if (q.is_integer()) {
    Monomial m;
    m.reserve(t.monomial.size());
    for (const auto &f : t.monomial) {
      m.push_back(Factor{f.atom, f.exponent * q});
    }
    return from_term(std::move(m), rational_pow(t.coef, q.num()));
  }
  if (t.monomial.empty()) {
    if (auto r = rational_power(t.coef, q)) {
      return Expr(*r);
    }
    return atom_power(u, q);
  }
  auto coef = rational_power(t.coef, q);
  if (t.monomial.size() == 1 && coef &&
      distributable(t.monomial.front().exponent, q)) {
    const Factor &f = t.monomial.front();
    Monomial m{Factor{f.atom, f.exponent * q}};
    return from_term(std::move(m), *coef);
  }
  if (coef && cmp(t.coef, 1) != 0) {
    return Expr(*coef) * atom_power(single_term(t.monomial, Rational(1)), q);
  }
  return atom_power(u, q);
}

// ---------------------------------------------------------------------------
// Differentiation

Expr diff_impl(const Expr &e, Var v);

Expr diff_base(const ExprNode &node, const NodePtr &owner, Var v) {
  const int k = index_of(v);
  std::call_once(node.diff_once[k], [&] {
    node.diff_cache[k] = diff_impl(Expr(owner), v).shared_node();
  });
  return Expr(node.diff_cache[k]);
}

Expr diff_impl(const Expr &e, Var v) {
  if (!e.depends_on(v)) {
    return Expr();
  }
  Accumulator acc;
  for (const auto &t : e.terms()) {
    for (std::size_t i = 0; i < t.monomial.size(); ++i) {
      const Factor &f = t.monomial[i];
      if ((f.atom.dependencies() & mask_of(v)) == 0) {
        continue;
      }
      Monomial m;
      m.reserve(t.monomial.size());
      for (std::size_t j = 0; j < t.monomial.size(); ++j) {
        if (j != i) {
          m.push_back(t.monomial[j]);
        } else {
          Exponent lowered = f.exponent - Exponent(1);
          if (!lowered.is_zero()) {
            m.push_back(Factor{f.atom, lowered});
          }
        }
      }
      const Rational c = t.coef * f.exponent.to_rational();
      if (f.atom.is_variable()) {
        acc.add(std::move(m), c);
      } else {
        // The lowered exponent of a compound atom is never natural, so the
        // monomial needs no expansion before multiplying by d(base).
        const ExprNode *base = f.atom.base_node();
        Expr db = diff_base(*base, f.atom.base().shared_node(), v);
        acc.add_product(m, c, db);
      }
    }
  }
  return acc.finish();
}

// ---------------------------------------------------------------------------
// Evaluation

template <class T> T from_rational(const Rational &q) {
  if constexpr (std::is_same_v<T, double>) {
    return q.get_d();
  } else if constexpr (std::is_same_v<T, long double>) {
    // get_d truncates; recover the extra bits for long double.
    return static_cast<T>(q.get_num().get_d()) /
           static_cast<T>(q.get_den().get_d());
  } else {
    return T(q);
  }
}

template <class T> T real_root(const T &b, std::int64_t d) {
  using std::cbrt;
  using std::pow;
  using std::sqrt;
  if (d == 2) {
    return sqrt(b);
  }
  if (d == 3) {
    return cbrt(b);
  }
  if constexpr (std::is_floating_point_v<T>) {
    return pow(b, T(1) / T(d));
  } else {
    return rootn(b, static_cast<unsigned long>(d));
  }
}

template <class T> T real_power(T b, Exponent e) {
  using std::isfinite;
  using std::pow;
  if (b == T(0) && e.is_negative()) {
    throw DomainError("division by zero");
  }
  T r;
  if (e.is_integer()) {
    r = pow(b, static_cast<int>(e.num()));
  } else {
    const std::int64_t d = e.den();
    bool negate = false;
    if (b < T(0)) {
      if (d % 2 == 0) {
        throw DomainError("even root of a negative number");
      }
      b = -b;
      negate = e.num() % 2 != 0;
    }
    r = pow(real_root(b, d), static_cast<int>(e.num()));
    if (negate) {
      r = -r;
    }
  }
  if (!isfinite(r)) {
    throw OverflowError("floating-point overflow during evaluation");
  }
  return r;
}

template <class T> class FloatEvaluator {
public:
  explicit FloatEvaluator(const std::array<T, 4> &p) : point_(p) {}

  T eval(const ExprNode &node, T *scale = nullptr) {
    using std::abs;
    using std::isfinite;
    T sum = 0;
    T abs_sum = 0;
    for (const auto &t : node.terms) {
      T v = from_rational<T>(t.coef);
      for (const auto &f : t.monomial) {
        v *= real_power(atom_value(f.atom), f.exponent);
      }
      sum += v;
      abs_sum += abs(v);
    }
    if (!isfinite(sum)) {
      throw OverflowError("floating-point overflow during evaluation");
    }
    if (scale) {
      *scale = abs_sum;
    }
    return sum;
  }

private:
  T atom_value(const Atom &a) {
    if (a.is_variable()) {
      return point_[index_of(a.var())];
    }
    const ExprNode *n = a.base_node();
    if (auto it = memo_.find(n); it != memo_.end()) {
      return it->second;
    }
    T v = eval(*n);
    memo_.emplace(n, v);
    return v;
  }

  std::array<T, 4> point_;
  std::unordered_map<const ExprNode *, T> memo_;
};

class GradientEvaluator {
public:
  explicit GradientEvaluator(const std::array<BigFloat, 4> &p) : point_(p) {}

  BigGradient eval(const ExprNode &node) {
    BigGradient out;
    out.value = 0;
    out.grad.fill(BigFloat(0));
    std::vector<BigFloat> powers;
    std::vector<std::array<BigFloat, 4>> slopes;
    std::vector<BigFloat> suffix;
    for (const auto &t : node.terms) {
      const std::size_t n = t.monomial.size();
      powers.assign(n, BigFloat());
      slopes.assign(n, {});
      for (std::size_t i = 0; i < n; ++i) {
        const Factor &f = t.monomial[i];
        const BigGradient &a = atom_value(f.atom);
        powers[i] = real_power(a.value, f.exponent);
        const BigFloat rate =
            from_rational<BigFloat>(f.exponent.to_rational()) *
            real_power(a.value, f.exponent - Exponent(1));
        for (int v = 0; v < 4; ++v) {
          slopes[i][v] = rate * a.grad[v];
        }
      }
      // Product rule with prefix and suffix products, so no factor is
      // divided out.
      suffix.assign(n + 1, BigFloat(1));
      for (std::size_t i = n; i-- > 0;) {
        suffix[i] = suffix[i + 1] * powers[i];
      }
      const BigFloat c = from_rational<BigFloat>(t.coef);
      BigFloat prefix = c;
      for (std::size_t i = 0; i < n; ++i) {
        const BigFloat others = prefix * suffix[i + 1];
        for (int v = 0; v < 4; ++v) {
          out.grad[v] += others * slopes[i][v];
        }
        prefix *= powers[i];
      }
      out.value += prefix;
    }
    if (!isfinite(out.value)) {
      throw OverflowError("floating-point overflow during evaluation");
    }
    return out;
  }

private:
  const BigGradient &atom_value(const Atom &a) {
    const void *key = a.is_variable()
                          ? static_cast<const void *>(&point_[index_of(a.var())])
                          : static_cast<const void *>(a.base_node());
    if (auto it = memo_.find(key); it != memo_.end()) {
      return it->second;
    }
    BigGradient g;
    if (a.is_variable()) {
      g.value = point_[index_of(a.var())];
      g.grad.fill(BigFloat(0));
      g.grad[index_of(a.var())] = 1;
    } else {
      g = eval(*a.base_node());
    }
    return memo_.emplace(key, std::move(g)).first->second;
  }

  std::array<BigFloat, 4> point_;
  std::unordered_map<const void *, BigGradient> memo_;
};

class ExactEvaluator {
public:
  explicit ExactEvaluator(const JetPoint &p) : point_(p) {}

  Rational eval(const ExprNode &node) {
    Rational sum = 0;
    for (const auto &t : node.terms) {
      Rational v = t.coef;
      for (const auto &f : t.monomial) {
        v *= power(atom_value(f.atom), f.exponent);
      }
      sum += v;
    }
    return sum;
  }

private:
  static Rational power(const Rational &b, Exponent e) {
    if (e.is_integer()) {
      return rational_pow(b, e.num());
    }
    if (sgn(b) < 0 && e.den() % 2 == 0) {
      throw DomainError("even root of a negative number");
    }
    auto root = exact_root(b, e.den());
    if (!root) {
      throw NonRationalOperation("root of " + to_string(b) +
                                 " is not rational");
    }
    return rational_pow(*root, e.num());
  }

  Rational atom_value(const Atom &a) {
    if (a.is_variable()) {
      return point_[a.var()];
    }
    const ExprNode *n = a.base_node();
    if (auto it = memo_.find(n); it != memo_.end()) {
      return it->second;
    }
    Rational v = eval(*n);
    memo_.emplace(n, v);
    return v;
  }

  const JetPoint &point_;
  std::unordered_map<const ExprNode *, Rational> memo_;
};

} // namespace

// ---------------------------------------------------------------------------
// Atom / Monomial

std::string_view var_name(Var v) {
  switch (v) {
  case Var::t:
    return "t";
  case Var::x0:
    return "x0";
  case Var::x1:
    return "x1";
  case Var::x2:
    return "x2";
  }
  return "?";
}

Atom Atom::variable(Var v) {
  Atom a;
  a.var_ = static_cast<std::int8_t>(index_of(v));
  a.deps_ = mask_of(v);
  a.hash_ = 0x100 + static_cast<std::size_t>(index_of(v));
  return a;
}

Atom Atom::compound(const Expr &base) {
  Atom a;
  a.base_ = base.shared_node();
  a.deps_ = base.dependencies();
  a.hash_ = mix(0xa70b, base.hash());
  return a;
}

Expr Atom::base() const { return Expr(base_); }

int compare(const Atom &a, const Atom &b) {
  if (a.var_ != b.var_) {
    // Variables (0..3) sort before compound atoms (-1).
    if (a.var_ < 0) {
      return 1;
    }
    if (b.var_ < 0) {
      return -1;
    }
    return a.var_ < b.var_ ? -1 : 1;
  }
  if (a.var_ >= 0 || a.base_ == b.base_) {
    return 0;
  }
  if (a.hash_ != b.hash_) {
    return a.hash_ < b.hash_ ? -1 : 1;
  }
  return compare_nodes(*a.base_, *b.base_);
}

int compare(const Monomial &a, const Monomial &b) {
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (int c = compare_factor(a[i], b[i]); c != 0) {
      return c;
    }
  }
  if (a.size() == b.size()) {
    return 0;
  }
  return a.size() < b.size() ? -1 : 1;
}

// ---------------------------------------------------------------------------
// Expr

Expr::Expr() : node_(zero_node()) {}
Expr::Expr(int value) : Expr(Rational(value)) {}
Expr::Expr(long value) : Expr(Rational(value)) {}
Expr::Expr(const Rational &value)
    : node_(sgn(value) == 0 ? zero_node()
                            : single_term(Monomial{}, value).shared_node()) {}

Expr Expr::variable(Var v) {
  return single_term(Monomial{Factor{Atom::variable(v), Exponent(1)}},
                     Rational(1));
}

std::span<const Term> Expr::terms() const { return node_->terms; }
bool Expr::is_zero() const { return node_->terms.empty(); }
bool Expr::is_constant() const {
  return node_->terms.empty() ||
         (node_->terms.size() == 1 && node_->terms[0].monomial.empty());
}
std::optional<Rational> Expr::constant_value() const {
  if (node_->terms.empty()) {
    return Rational(0);
  }
  if (is_constant()) {
    return node_->terms[0].coef;
  }
  return std::nullopt;
}
std::uint8_t Expr::dependencies() const { return node_->deps; }
std::size_t Expr::hash() const { return node_->hash; }
std::size_t Expr::node_count() const { return node_->size; }

ExprKind Expr::kind() const {
  const auto &ts = node_->terms;
  if (ts.empty() || (ts.size() == 1 && ts[0].monomial.empty())) {
    return ExprKind::Constant;
  }
  if (ts.size() > 1) {
    return ExprKind::Sum;
  }
  const Term &t = ts[0];
  if (cmp(t.coef, 1) != 0 || t.monomial.size() > 1) {
    return ExprKind::Product;
  }
  const Factor &f = t.monomial[0];
  if (f.atom.is_variable() && f.exponent.is_one()) {
    return ExprKind::Variable;
  }
  return ExprKind::Power;
}

bool operator==(const Expr &a, const Expr &b) {
  if (a.node_ == b.node_) {
    return true;
  }
  return a.node_->hash == b.node_->hash &&
         compare_nodes(*a.node_, *b.node_) == 0;
}

Expr operator+(const Expr &a, const Expr &b) {
  if (a.is_zero()) {
    return b;
  }
  if (b.is_zero()) {
    return a;
  }
  const auto &x = a.node_->terms;
  const auto &y = b.node_->terms;
  std::vector<Term> out;
  out.reserve(x.size() + y.size());
  std::size_t i = 0, j = 0;
  while (i < x.size() && j < y.size()) {
    const int c = compare(x[i].monomial, y[j].monomial);
    if (c < 0) {
      out.push_back(x[i++]);
    } else if (c > 0) {
      out.push_back(y[j++]);
    } else {
      Rational s = x[i].coef + y[j].coef;
      if (sgn(s) != 0) {
        out.push_back(Term{x[i].monomial, std::move(s)});
      }
      ++i;
      ++j;
    }
  }
  out.insert(out.end(), x.begin() + static_cast<std::ptrdiff_t>(i), x.end());
  out.insert(out.end(), y.begin() + static_cast<std::ptrdiff_t>(j), y.end());
  return Expr(make_node(std::move(out)));
}

Expr operator-(const Expr &a) {
  if (a.is_zero()) {
    return a;
  }
  std::vector<Term> out = a.node_->terms;
  for (auto &t : out) {
    t.coef = -t.coef;
  }
  return Expr(make_node(std::move(out)));
}

Expr operator-(const Expr &a, const Expr &b) { return a + (-b); }

Expr operator*(const Expr &a, const Expr &b) {
  if (a.is_zero() || b.is_zero()) {
    return Expr();
  }
  if (auto c = a.constant_value()) {
    if (cmp(*c, 1) == 0) {
      return b;
    }
    std::vector<Term> out = b.node_->terms;
    for (auto &t : out) {
      t.coef *= *c;
    }
    return Expr(make_node(std::move(out)));
  }
  if (b.is_constant()) {
    return b * a;
  }
  const Expr &big = a.terms().size() >= b.terms().size() ? a : b;
  const Expr &small = &big == &a ? b : a;
  Accumulator acc;
  for (const auto &t : small.terms()) {
    acc.add_product(t.monomial, t.coef, big);
  }
  return acc.finish();
}

Expr operator/(const Expr &a, const Expr &b) {
  if (b.is_zero()) {
    throw DivisionByZero("division by the zero expression");
  }
  return a * pow(b, Exponent(-1));
}

Expr pow(const Expr &base, Exponent e) {
  if (e.is_zero()) {
    return Expr(1);
  }
  if (base.is_zero()) {
    if (e.is_negative()) {
      throw DivisionByZero("zero raised to a negative power");
    }
    return Expr();
  }
  if (e.is_one()) {
    return base;
  }
  if (base.terms().size() == 1) {
    return power_of_term(base, e);
  }
  return power_of_sum(base, e);
}

Expr sqrt(const Expr &e) { return pow(e, Exponent(1, 2)); }

Expr simplify(const Expr &e) {
  std::unordered_map<const ExprNode *, Expr> memo;
  auto rebuild = [&](auto &&self, const Expr &x) -> Expr {
    Expr sum;
    for (const auto &t : x.terms()) {
      Expr prod(t.coef);
      for (const auto &f : t.monomial) {
        Expr b;
        if (f.atom.is_variable()) {
          b = Expr::variable(f.atom.var());
        } else if (auto it = memo.find(f.atom.base_node()); it != memo.end()) {
          b = it->second;
        } else {
          b = self(self, f.atom.base());
          memo.emplace(f.atom.base_node(), b);
        }
        prod = prod * pow(b, f.exponent);
      }
      sum = sum + prod;
    }
    return sum;
  };
  return rebuild(rebuild, e);
}

Expr diff(const Expr &e, Var v) { return diff_impl(e, v); }

Expr diff(const Expr &e, Var v, int order) {
  Expr r = e;
  for (int i = 0; i < order; ++i) {
    r = diff_impl(r, v);
  }
  return r;
}

Expr substitute(const Expr &e, const Bindings &bindings) {
  std::uint8_t bound = 0;
  for (Var v : kJetVars) {
    if (bindings[index_of(v)]) {
      bound |= mask_of(v);
    }
  }
  std::unordered_map<const ExprNode *, Expr> memo;
  auto run = [&](auto &&self, const Expr &x) -> Expr {
    if ((x.dependencies() & bound) == 0) {
      return x;
    }
    Accumulator acc;
    for (const auto &t : x.terms()) {
      Monomial kept;
      Expr moved(1);
      for (const auto &f : t.monomial) {
        if ((f.atom.dependencies() & bound) == 0) {
          kept.push_back(f);
          continue;
        }
        Expr b;
        if (f.atom.is_variable()) {
          b = *bindings[index_of(f.atom.var())];
        } else if (auto it = memo.find(f.atom.base_node()); it != memo.end()) {
          b = it->second;
        } else {
          b = self(self, f.atom.base());
          memo.emplace(f.atom.base_node(), b);
        }
        moved = moved * pow(b, f.exponent);
      }
      acc.add_product(kept, t.coef, moved);
    }
    return acc.finish();
  };
  return run(run, e);
}

void set_expression_size_limit(std::size_t limit) { g_size_limit = limit; }
std::size_t expression_size_limit() { return g_size_limit; }

// ---------------------------------------------------------------------------
// Evaluation

std::array<double, 4> JetPoint::to_double() const {
  return {coords[0].get_d(), coords[1].get_d(), coords[2].get_d(),
          coords[3].get_d()};
}

Rational eval_exact(const Expr &e, const JetPoint &p) {
  return ExactEvaluator(p).eval(*e.node());
}

double eval_float(const Expr &e, const FloatPoint &p) {
  for (double c : p) {
    if (!std::isfinite(c)) {
      throw DomainError("non-finite coordinate");
    }
  }
  return FloatEvaluator<double>(p).eval(*e.node());
}

double eval_float(const Expr &e, const JetPoint &p) {
  return eval_float(e, p.to_double());
}

ScaledValue eval_scaled(const Expr &e, const std::array<long double, 4> &p) {
  ScaledValue out;
  out.value = FloatEvaluator<long double>(p).eval(*e.node(), &out.scale);
  return out;
}

BigFloat eval_big(const Expr &e, const std::array<BigFloat, 4> &p,
                  BigFloat *scale) {
  return FloatEvaluator<BigFloat>(p).eval(*e.node(), scale);
}

BigGradient eval_big_gradient(const Expr &e, const std::array<BigFloat, 4> &p) {
  return GradientEvaluator(p).eval(*e.node());
}

PreciseValue eval_precise(const Expr &e, const JetPoint &p, unsigned bits) {
  auto run = [&](unsigned b, BigFloat *scale) {
    PrecisionScope scope(b);
    std::array<BigFloat, 4> point;
    for (int i = 0; i < 4; ++i) {
      point[i] = BigFloat(p.coords[i]);
    }
    return eval_big(e, point, scale);
  };
  BigFloat scale;
  const BigFloat coarse = run(bits, nullptr);
  const BigFloat fine = run(bits + 64, &scale);
  PreciseValue out;
  out.value = fine.to_long_double();
  out.scale = scale.to_long_double();
  out.error = abs(fine - coarse).to_long_double();
  out.bits = bits;
  return out;
}

// ---------------------------------------------------------------------------
// Domains

std::vector<DomainGuard> domain_guards(const Expr &e) {
  std::vector<DomainGuard> out;
  std::unordered_set<const ExprNode *> visited;
  auto push = [&](const Expr &g, DomainGuard::Kind k) {
    if (g.is_constant()) {
      return;
    }
    for (const auto &existing : out) {
      if (existing.expr == g &&
          (existing.kind == k || existing.kind == DomainGuard::Kind::Positive)) {
        return;
      }
    }
    out.push_back(DomainGuard{g, k});
  };
  auto walk = [&](auto &&self, const Expr &x) -> void {
    for (const auto &t : x.terms()) {
      for (const auto &f : t.monomial) {
        Expr b;
        if (f.atom.is_variable()) {
          b = Expr::variable(f.atom.var());
        } else {
          b = f.atom.base();
          if (visited.insert(f.atom.base_node()).second) {
            self(self, b);
          }
        }
        if (f.exponent.den() % 2 == 0) {
          push(b, DomainGuard::Kind::Positive);
        }
        if (f.exponent.is_negative()) {
          push(b, DomainGuard::Kind::NonZero);
        }
      }
    }
  };
  walk(walk, e);
  return out;
}

} // namespace jetinv
