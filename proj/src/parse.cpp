#include "tnc/parse.hpp"

#include <cctype>

namespace tnc {

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

class ExprParser {
 public:
  explicit ExprParser(std::string_view text) : text_(text) {}

  LaurentPolynomial parse() {
    skip_ws();
    if (at_end()) throw ParseError(pos_, "empty expression");
    LaurentPolynomial p = expr();
    skip_ws();
    if (!at_end()) throw ParseError(pos_, std::string("unexpected '") + text_[pos_] + "'");
    return p;
  }

 private:
  LaurentPolynomial expr() {
    LaurentPolynomial acc = term();
    for (;;) {
      skip_ws();
      if (accept('+'))
        acc += term();
      else if (accept('-'))
        acc -= term();
      else
        return acc;
    }
  }

  LaurentPolynomial term() {
    LaurentPolynomial acc = unary();
    for (;;) {
      skip_ws();
      if (accept('*')) {
        acc *= unary();
      } else if (peek() == '/') {
        const std::size_t at = pos_;
        ++pos_;
        LaurentPolynomial divisor = unary();
        if (divisor.is_zero()) throw ParseError(at, "division by zero");
        if (!divisor.is_monomial())
          throw ParseError(at, "division by the multi-term expression '" + divisor.to_string() +
                                   "': Laurent polynomials may only be divided by a single monomial");
        acc *= divisor.inverse();
      } else {
        return acc;
      }
    }
  }

  LaurentPolynomial unary() {
    skip_ws();
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    const std::size_t base_at = pos_;
    LaurentPolynomial b = base();
    skip_ws();
    if (peek() != '^') return b;
    const std::size_t caret = pos_++;
    skip_ws();
    const int n = integer_exponent();
    if (n < 0 && !b.is_monomial()) {
      if (b.is_zero()) throw ParseError(base_at, "zero raised to a negative power");
      throw ParseError(caret, "negative power of the multi-term expression '" + b.to_string() +
                                  "': only a single monomial may carry a negative exponent");
    }
    return b.pow(n);
  }

  int integer_exponent() {
    const std::size_t start = pos_;
    bool negative = false;
    if (accept('-'))
      negative = true;
    else
      accept('+');
    skip_ws();
    if (accept('(')) {
      const int inner = integer_exponent();
      skip_ws();
      if (!accept(')')) throw ParseError(pos_, "expected ')' after exponent");
      return negative ? -inner : inner;
    }
    const std::size_t digits_at = pos_;
    while (!at_end() && digit(text_[pos_])) ++pos_;
    if (pos_ == digits_at) throw ParseError(start, "exponent must be an integer literal");
    if (!at_end() && (text_[pos_] == '.' || ident_char(text_[pos_])))
      throw ParseError(start, "exponent must be an integer literal");
    const auto digits = text_.substr(digits_at, pos_ - digits_at);
    if (digits.size() > 6) throw ParseError(start, "exponent too large");
    const int n = std::stoi(std::string(digits));
    return negative ? -n : n;
  }

  LaurentPolynomial base() {
    skip_ws();
    if (at_end()) throw ParseError(pos_, "unexpected end of expression");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      LaurentPolynomial inner = expr();
      skip_ws();
      if (!accept(')')) throw ParseError(pos_, "expected ')'");
      return inner;
    }
    if (ident_start(c)) {
      const std::size_t start = pos_;
      while (!at_end() && ident_char(text_[pos_])) ++pos_;
      return LaurentPolynomial::symbol(std::string(text_.substr(start, pos_ - start)));
    }
    if (digit(c) || c == '.') return number();
    throw ParseError(pos_, std::string("unexpected '") + c + "'");
  }

  LaurentPolynomial number() {
    const std::size_t start = pos_;
    while (!at_end() && digit(text_[pos_])) ++pos_;
    if (!at_end() && text_[pos_] == '.') {
      ++pos_;
      while (!at_end() && digit(text_[pos_])) ++pos_;
    }
    if (!at_end() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t look = pos_ + 1;
      if (look < text_.size() && (text_[look] == '+' || text_[look] == '-')) ++look;
      if (look < text_.size() && digit(text_[look])) {
        pos_ = look;
        while (!at_end() && digit(text_[pos_])) ++pos_;
      }
    }
    if (!at_end() && ident_char(text_[pos_]))
      throw ParseError(pos_, "malformed number (use '*' between a number and a symbol)");
    try {
      return LaurentPolynomial(Rational::parse(text_.substr(start, pos_ - start)));
    } catch (const std::invalid_argument&) {
      throw ParseError(start, "malformed number '" + std::string(text_.substr(start, pos_ - start)) + "'");
    }
  }

  void skip_ws() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  [[nodiscard]] bool at_end() const { return pos_ >= text_.size(); }
  [[nodiscard]] char peek() const { return at_end() ? '\0' : text_[pos_]; }
  bool accept(char c) {
    if (peek() != c) return false;
    ++pos_;
    return true;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

LaurentPolynomial parse_expr(std::string_view text) { return ExprParser(text).parse(); }

bool is_identifier(std::string_view text) {
  if (text.empty() || !ident_start(text.front())) return false;
  for (char c : text)
    if (!ident_char(c)) return false;
  return true;
}

}  // namespace tnc
