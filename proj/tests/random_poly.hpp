#pragma once

#include <random>
#include <string>

#include "jetinv/expr.hpp"

namespace jetinv::testing {

/// Sparse polynomial in t, x0, x1, x2 with degree <= 3 in each variable and
/// integer coefficients in [-3, 3].
struct PolyOptions {
  int min_terms = 2;
  int max_terms = 5;
  bool force_cubic_x2 = false;  // guarantees d^3F/dx2^3 != 0
  bool without_x2 = false;      // dF/dx2 = 0
};

inline Expr random_polynomial(std::mt19937_64 &rng, PolyOptions opt = {}) {
  std::uniform_int_distribution<int> terms(opt.min_terms, opt.max_terms);
  std::uniform_int_distribution<int> degree(0, 3);
  std::uniform_int_distribution<int> coef(-3, 3);
  for (;;) {
    Expr f;
    const int n = terms(rng);
    for (int k = 0; k < n; ++k) {
      int c = 0;
      while (c == 0) {
        c = coef(rng);
      }
      Expr m(c);
      for (Var v : kJetVars) {
        int d = degree(rng);
        if (v == Var::x2 && opt.without_x2) {
          d = 0;
        }
        if (v == Var::x2 && opt.force_cubic_x2 && k == 0) {
          d = 3;
        }
        m *= pow(Expr::variable(v), d);
      }
      f += m;
    }
    if (f.is_zero()) {
      continue;
    }
    if (opt.force_cubic_x2 && diff(f, Var::x2, 3).is_zero()) {
      continue;
    }
    return f;
  }
}

} // namespace jetinv::testing
