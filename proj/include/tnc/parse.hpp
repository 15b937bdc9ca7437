#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

#include "tnc/laurent.hpp"

namespace tnc {

/// Syntax or Laurent-restriction error; `position` is the 0-based offset into the input.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t position, const std::string& message)
      : std::runtime_error("at column " + std::to_string(position + 1) + ": " + message),
        position_(position) {}
  [[nodiscard]] std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

/// Parses an arithmetic expression over identifiers and exact decimal literals.
///
/// Grammar: expr := term (('+'|'-') term)*; term := unary (('*'|'/') unary)*;
/// unary := ('-'|'+') unary | base ('^' int)?; base := ident | number | '(' expr ')'.
/// Division is only allowed by a single Laurent monomial, and exponents must be integer
/// literals (possibly negative, which also requires a monomial base).
LaurentPolynomial parse_expr(std::string_view text);

/// True for `[A-Za-z_][A-Za-z0-9_]*`.
bool is_identifier(std::string_view text);

}  // namespace tnc
