#pragma once

#include <string>
#include <string_view>

#include "jetinv/expr.hpp"
#include "jetinv/jet.hpp"

namespace jetinv {

// Grammar:
//   expr     := term {('+' | '-') term}
//   term     := unary {('*' | '/') unary}
//   unary    := ['-'] factor
//   factor   := base ['^' exponent]
//   base     := NUMBER | 't' | 'x' | "x'" | "x''" | 'x0' | 'x1' | 'x2'
//             | '(' expr ')' | 'sqrt' '(' expr ')'
//   exponent := ['-'] INTEGER | '(' ['-'] INTEGER ['/' INTEGER] ')'
//
// NUMBER is an integer or a decimal literal (read exactly). Implicit
// multiplication is not accepted.

Expr parse_expression(std::string_view src);
Equation parse_equation(std::string_view src);

/// t~ = t_src(t, x), x~ = x_src(t, x) with the inverse t = t_inv_src(t~, x~),
/// x = x_inv_src(t~, x~). The inverse is written in the same variable names.
PointMap parse_transformation(std::string_view t_src, std::string_view x_src,
                              std::string_view t_inv_src,
                              std::string_view x_inv_src,
                              const SamplePlan &check = SamplePlan{});

/// Text in the grammar above that parses back to the same canonical form.
std::string render(const Expr &e);

} // namespace jetinv
