#include "jetinv/parser.hpp"

#include <cctype>
#include <optional>

#include "jetinv/errors.hpp"

namespace jetinv {

namespace {

struct Token {
  enum class Kind { Number, Variable, Sqrt, Op, End };
  Kind kind = Kind::End;
  std::size_t offset = 0;
  char op = 0;
  Var var = Var::t;
  Rational value;
  bool integral = false;
};

class Parser {
public:
  explicit Parser(std::string_view src) : src_(src) { advance(); }

  Expr parse() {
    Expr e = expr();
    if (tok_.kind != Token::Kind::End) {
      fail("unexpected " + describe(tok_));
    }
    return e;
  }

private:
  // Lexing ------------------------------------------------------------------

  void advance() {
    while (pos_ < src_.size() &&
           std::isspace(static_cast<unsigned char>(src_[pos_]))) {
      ++pos_;
    }
    tok_ = Token{};
    tok_.offset = pos_;
    if (pos_ >= src_.size()) {
      tok_.kind = Token::Kind::End;
      return;
    }
    const char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      lex_number();
    } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      lex_identifier();
    } else if (std::string_view("+-*/^()").find(c) != std::string_view::npos) {
      tok_.kind = Token::Kind::Op;
      tok_.op = c;
      ++pos_;
    } else {
      fail(std::string("unexpected character '") + c + "'", pos_);
    }
  }

  void lex_number() {
    const std::size_t start = pos_;
    std::string digits;
    std::size_t frac_digits = 0;
    bool seen_point = false;
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      if (std::isdigit(static_cast<unsigned char>(c))) {
        digits += c;
        frac_digits += seen_point ? 1 : 0;
      } else if (c == '.' && !seen_point) {
        seen_point = true;
      } else {
        break;
      }
      ++pos_;
    }
    if (digits.empty()) {
      fail("malformed number", start);
    }
    mpz_class num(digits, 10);
    mpz_class den;
    mpz_ui_pow_ui(den.get_mpz_t(), 10, frac_digits);
    tok_.kind = Token::Kind::Number;
    tok_.value = Rational(num, den);
    tok_.value.canonicalize();
    tok_.integral = !seen_point;
  }

  void lex_identifier() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
            src_[pos_] == '_')) {
      ++pos_;
    }
    std::string name(src_.substr(start, pos_ - start));
    if (name == "x") {
      while (pos_ < src_.size() && src_[pos_] == '\'') {
        name += '\'';
        ++pos_;
      }
    }
    tok_.kind = Token::Kind::Variable;
    if (name == "t") {
      tok_.var = Var::t;
    } else if (name == "x" || name == "x0") {
      tok_.var = Var::x0;
    } else if (name == "x'" || name == "x1") {
      tok_.var = Var::x1;
    } else if (name == "x''" || name == "x2") {
      tok_.var = Var::x2;
    } else if (name == "sqrt") {
      tok_.kind = Token::Kind::Sqrt;
    } else {
      auto [line, col] = locate(start);
      throw UnknownSymbol("unknown symbol '" + name + "'", start, line, col);
    }
  }

  // Diagnostics ---------------------------------------------------------------

  std::pair<std::size_t, std::size_t> locate(std::size_t offset) const {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < offset && i < src_.size(); ++i) {
      if (src_[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    return {line, col};
  }

  [[noreturn]] void fail(const std::string &msg) { fail(msg, tok_.offset); }
  [[noreturn]] void fail(const std::string &msg, std::size_t offset) {
    auto [line, col] = locate(offset);
    throw SyntaxError(msg, offset, line, col);
  }
  [[noreturn]] void bad_exponent(const std::string &msg) {
    auto [line, col] = locate(tok_.offset);
    throw BadExponent(msg, tok_.offset, line, col);
  }

  static std::string describe(const Token &t) {
    switch (t.kind) {
    case Token::Kind::End:
      return "end of input";
    case Token::Kind::Op:
      return std::string("'") + t.op + "'";
    case Token::Kind::Number:
      return "number";
    case Token::Kind::Variable:
      return "variable";
    case Token::Kind::Sqrt:
      return "'sqrt'";
    }
    return "token";
  }

  bool is_op(char c) const {
    return tok_.kind == Token::Kind::Op && tok_.op == c;
  }

  void expect(char c) {
    if (!is_op(c)) {
      fail(std::string("expected '") + c + "' but found " + describe(tok_));
    }
    advance();
  }

  // Grammar -------------------------------------------------------------------

  Expr expr() {
    Expr e = term();
    while (is_op('+') || is_op('-')) {
      const char op = tok_.op;
      advance();
      Expr rhs = term();
      e = op == '+' ? e + rhs : e - rhs;
    }
    return e;
  }

  // A factor is kept as base^exponent until its use is known, so that a
  // quotient by a power of a sum becomes one negative power rather than the
  // inverse of an expanded polynomial.
  struct Powered {
    Expr base;
    Exponent exponent{1};
    bool negated = false;
  };

  Expr value(const Powered &p) {
    Expr v = pow(p.base, p.exponent);
    return p.negated ? -v : v;
  }

  Expr term() {
    Expr e = value(unary());
    while (is_op('*') || is_op('/')) {
      const char op = tok_.op;
      const std::size_t at = tok_.offset;
      advance();
      Powered rhs = unary();
      if (op == '*') {
        e = e * value(rhs);
      } else {
        if (rhs.base.is_zero()) {
          fail("division by zero", at);
        }
        Expr inv = pow(rhs.base, -rhs.exponent);
        e = e * (rhs.negated ? -inv : inv);
      }
    }
    return e;
  }

  Powered unary() {
    if (is_op('-')) {
      advance();
      Powered p = factor();
      p.negated = !p.negated;
      return p;
    }
    return factor();
  }

  Powered factor() {
    Powered p{base()};
    if (is_op('^')) {
      advance();
      const std::size_t at = tok_.offset;
      p.exponent = exponent();
      if (p.base.is_zero() && p.exponent.is_negative()) {
        fail("zero raised to a negative power", at);
      }
    }
    return p;
  }

  Expr base() {
    switch (tok_.kind) {
    case Token::Kind::Number: {
      Expr e(tok_.value);
      advance();
      return e;
    }
    case Token::Kind::Variable: {
      Expr e = Expr::variable(tok_.var);
      advance();
      return e;
    }
    case Token::Kind::Sqrt: {
      advance();
      expect('(');
      Expr inner = expr();
      expect(')');
      return sqrt(inner);
    }
    case Token::Kind::Op:
      if (tok_.op == '(') {
        advance();
        Expr inner = expr();
        expect(')');
        return inner;
      }
      break;
    case Token::Kind::End:
      break;
    }
    fail("expected a number, variable or '(' but found " + describe(tok_));
  }

  std::int64_t integer() {
    if (tok_.kind != Token::Kind::Number || !tok_.integral) {
      bad_exponent("exponent must be an integer or a ratio of integers");
    }
    if (!tok_.value.get_num().fits_slong_p()) {
      bad_exponent("exponent is too large");
    }
    const std::int64_t v = tok_.value.get_num().get_si();
    advance();
    return v;
  }

  std::int64_t signed_integer() {
    if (is_op('-')) {
      advance();
      return -integer();
    }
    return integer();
  }

  Exponent exponent() {
    if (is_op('(')) {
      advance();
      const std::int64_t num = signed_integer();
      std::int64_t den = 1;
      if (is_op('/')) {
        advance();
        den = integer();
        if (den == 0) {
          bad_exponent("exponent with zero denominator");
        }
      }
      expect(')');
      return Exponent(num, den);
    }
    return Exponent(signed_integer());
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  Token tok_;
};

std::string render_rational(const Rational &q) { return q.get_str(); }

std::string render_factor(const Factor &f) {
  std::string out;
  if (f.atom.is_variable()) {
    out = std::string(var_name(f.atom.var()));
  } else {
    const Expr b = f.atom.base();
    auto c = b.constant_value();
    if (c && sgn(*c) > 0 && c->get_den() == 1) {
      out = render_rational(*c);
    } else {
      out = "(" + render(b) + ")";
    }
  }
  const Exponent e = f.exponent;
  if (e.is_one()) {
    return out;
  }
  if (e.is_natural()) {
    return out + "^" + std::to_string(e.num());
  }
  return out + "^(" + e.to_string() + ")";
}

} // namespace

Expr parse_expression(std::string_view src) { return Parser(src).parse(); }

Equation parse_equation(std::string_view src) {
  return Equation(parse_expression(src));
}

PointMap parse_transformation(std::string_view t_src, std::string_view x_src,
                              std::string_view t_inv_src,
                              std::string_view x_inv_src,
                              const SamplePlan &check) {
  return PointMap(parse_expression(t_src), parse_expression(x_src),
                  parse_expression(t_inv_src), parse_expression(x_inv_src),
                  check);
}

std::string render(const Expr &e) {
  if (e.is_zero()) {
    return "0";
  }
  std::string out;
  bool first = true;
  for (const auto &t : e.terms()) {
    const bool negative = sgn(t.coef) < 0;
    const Rational mag = abs(t.coef);
    if (first) {
      out += negative ? "-" : "";
    } else {
      out += negative ? " - " : " + ";
    }
    first = false;
    std::string body;
    if (t.monomial.empty() || cmp(mag, 1) != 0) {
      body = render_rational(mag);
    }
    for (const auto &f : t.monomial) {
      if (!body.empty()) {
        body += "*";
      }
      body += render_factor(f);
    }
    out += body;
  }
  return out;
}

} // namespace jetinv
