#include "tkmp/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <string>

#include "tkmp/errors.hpp"

namespace tkmp {

namespace {

class Parser {
 public:
  Parser(std::string_view src, int n) : src_(src), n_(n) {}

  Polynomial parse() {
    skip();
    if (at_end()) fail("empty expression");
    Polynomial p = expr();
    skip();
    if (!at_end()) fail(std::string("unexpected '") + src_[pos_] + "'");
    return p;
  }

 private:
  bool at_end() const { return pos_ >= src_.size(); }
  char peek() const { return at_end() ? '\0' : src_[pos_]; }

  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(src_[pos_]))) advance();
  }

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, line_, col_); }

  Polynomial expr() {
    Polynomial acc = term();
    for (;;) {
      skip();
      const char c = peek();
      if (c != '+' && c != '-') return acc;
      advance();
      skip();
      Polynomial t = term();
      acc = c == '+' ? acc + t : acc - t;
    }
  }

  Polynomial term() {
    skip();
    double sign = 1.0;
    while (peek() == '-' || peek() == '+') {
      if (peek() == '-') sign = -sign;
      advance();
      skip();
    }
    Polynomial acc = factor();
    for (;;) {
      skip();
      const char c = peek();
      if (c == '*') {
        advance();
        skip();
        acc = acc * factor();
      } else if (c == 'x' || c == '(') {
        // juxtaposition such as "3x1" or "2(x1 + 1)"
        acc = acc * factor();
      } else {
        break;
      }
    }
    return acc * sign;
  }

  int integer_exponent() {
    skip();
    const std::size_t start = pos_;
    while (std::isdigit(static_cast<unsigned char>(peek()))) advance();
    if (start == pos_) fail("expected an integer exponent");
    int v = 0;
    const auto r = std::from_chars(src_.data() + start, src_.data() + pos_, v);
    if (r.ec != std::errc() || v > std::numeric_limits<std::uint16_t>::max()) fail("exponent overflow");
    return v;
  }

  Polynomial power(Polynomial base) {
    skip();
    if (peek() != '^') return base;
    advance();
    const int e = integer_exponent();
    if (static_cast<long>(e) * base.degree() > std::numeric_limits<std::uint16_t>::max()) {
      fail("exponent overflow");
    }
    return base.pow(e);
  }

  Polynomial factor() {
    skip();
    const char c = peek();
    if (c == '(') {
      advance();
      Polynomial inner = expr();
      skip();
      if (peek() != ')') fail("expected ')'");
      advance();
      return power(std::move(inner));
    }
    if (c == 'x') {
      const int line = line_, col = col_;
      advance();
      const std::size_t start = pos_;
      while (std::isdigit(static_cast<unsigned char>(peek()))) advance();
      if (start == pos_) throw ParseError("expected a variable index after 'x'", line, col);
      int idx = 0;
      const auto r = std::from_chars(src_.data() + start, src_.data() + pos_, idx);
      if (r.ec != std::errc() || idx < 1 || idx > n_) {
        throw ParseError("unknown variable x" + std::string(src_.substr(start, pos_ - start)) +
                             " (expected x1..x" + std::to_string(n_) + ")",
                         line, col);
      }
      return power(Polynomial::variable(n_, idx - 1));
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      double v = number();
      skip();
      if (peek() == '/') {
        advance();
        skip();
        const double q = number();
        if (q == 0.0) fail("division by zero in rational literal");
        v /= q;
      }
      return power(Polynomial::constant(n_, v));
    }
    if (at_end()) fail("unexpected end of expression");
    fail(std::string("unexpected '") + c + "'");
  }

  double number() {
    const std::size_t start = pos_;
    while (std::isdigit(static_cast<unsigned char>(peek()))) advance();
    if (peek() == '.') {
      advance();
      while (std::isdigit(static_cast<unsigned char>(peek()))) advance();
    }
    if (peek() == 'e' || peek() == 'E') {
      advance();
      if (peek() == '+' || peek() == '-') advance();
      if (!std::isdigit(static_cast<unsigned char>(peek()))) fail("malformed exponent in number");
      while (std::isdigit(static_cast<unsigned char>(peek()))) advance();
    }
    double v = 0.0;
    const auto r = std::from_chars(src_.data() + start, src_.data() + pos_, v);
    if (r.ec != std::errc() || r.ptr != src_.data() + pos_ || !std::isfinite(v)) fail("malformed number");
    return v;
  }

  std::string_view src_;
  int n_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

}  // namespace

Polynomial parse_polynomial(std::string_view src, int n) {
  if (n < 1) throw ValidationError("variable count must be positive");
  return Parser(src, n).parse();
}

}  // namespace tkmp
