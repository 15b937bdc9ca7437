#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tnc/rational.hpp"

namespace tnc {

class Monomial;
class LaurentPolynomial;

/// Values bound to symbols for numeric evaluation.
using Point = std::map<std::string, double, std::less<>>;
/// Symbol replacements for substitution.
using Bindings = std::map<std::string, LaurentPolynomial, std::less<>>;

class AlgebraError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EvaluationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Product of symbols raised to nonzero integer powers. Factors are kept sorted by name.
class Monomial {
 public:
  using Factor = std::pair<std::string, int>;

  Monomial() = default;
  /// Merges duplicate names and drops zero exponents.
  explicit Monomial(std::vector<Factor> factors);
  static Monomial symbol(std::string name, int exponent = 1);

  [[nodiscard]] const std::vector<Factor>& factors() const { return factors_; }
  [[nodiscard]] bool is_constant() const { return factors_.empty(); }
  /// Exponent of `name`, 0 when absent.
  [[nodiscard]] int exponent(std::string_view name) const;
  [[nodiscard]] Monomial inverse() const;
  [[nodiscard]] Monomial pow(int n) const;
  /// Canonical text such as "x_B^2*x_T^-1"; "1" for the empty monomial.
  [[nodiscard]] std::string to_string() const;

  friend Monomial operator*(const Monomial& a, const Monomial& b);
  friend bool operator==(const Monomial&, const Monomial&) = default;
  friend auto operator<=>(const Monomial&, const Monomial&) = default;

 private:
  std::vector<Factor> factors_;
};

/// Finite sum of Laurent monomials with exact nonzero rational coefficients, in canonical form.
class LaurentPolynomial {
 public:
  using Terms = std::map<Monomial, Rational>;

  LaurentPolynomial() = default;
  LaurentPolynomial(Rational constant);  // NOLINT(google-explicit-constructor)
  LaurentPolynomial(int constant) : LaurentPolynomial(Rational(constant)) {}  // NOLINT
  LaurentPolynomial(Monomial m, Rational coefficient = Rational(1));
  static LaurentPolynomial symbol(std::string name, int exponent = 1);
  static LaurentPolynomial from_terms(const std::vector<std::pair<Monomial, Rational>>& terms);

  [[nodiscard]] const Terms& terms() const { return terms_; }
  [[nodiscard]] std::size_t size() const { return terms_.size(); }
  [[nodiscard]] bool is_zero() const { return terms_.empty(); }
  [[nodiscard]] bool is_monomial() const { return terms_.size() == 1; }
  /// True iff every coefficient is positive. The zero polynomial counts as positive.
  [[nodiscard]] bool is_positive() const;
  [[nodiscard]] std::set<std::string, std::less<>> symbols() const;
  /// Smallest exponent of `name` over all terms (0 for terms that lack it). Empty for zero.
  [[nodiscard]] std::optional<int> min_exponent(std::string_view name) const;
  [[nodiscard]] Rational coefficient(const Monomial& m) const;

  /// Raises to an integer power; negative powers require a single-term polynomial.
  [[nodiscard]] LaurentPolynomial pow(int n) const;
  /// Inverse of a single-term polynomial.
  [[nodiscard]] LaurentPolynomial inverse() const;

  [[nodiscard]] double evaluate(const Point& point) const;
  [[nodiscard]] LaurentPolynomial substitute(const Bindings& bindings) const;
  /// Positive and negative parts: *this == plus - minus, both positive, term-disjoint.
  [[nodiscard]] std::pair<LaurentPolynomial, LaurentPolynomial> split_signs() const;

  /// Canonical text using explicit `*` and `^`, e.g. "1 + 2*x_B^2*x_T^-1 - 2.5*x_B".
  [[nodiscard]] std::string to_string() const;

  LaurentPolynomial& operator+=(const LaurentPolynomial& o);
  LaurentPolynomial& operator-=(const LaurentPolynomial& o);
  LaurentPolynomial& operator*=(const LaurentPolynomial& o);
  friend LaurentPolynomial operator+(LaurentPolynomial a, const LaurentPolynomial& b) { return a += b; }
  friend LaurentPolynomial operator-(LaurentPolynomial a, const LaurentPolynomial& b) { return a -= b; }
  friend LaurentPolynomial operator*(LaurentPolynomial a, const LaurentPolynomial& b) { return a *= b; }
  LaurentPolynomial operator-() const;

  friend bool operator==(const LaurentPolynomial&, const LaurentPolynomial&) = default;

 private:
  void add_term(const Monomial& m, const Rational& c);
  Terms terms_;
};

std::ostream& operator<<(std::ostream& os, const LaurentPolynomial& p);

inline std::pair<LaurentPolynomial, LaurentPolynomial> split_signs(const LaurentPolynomial& p) {
  return p.split_signs();
}
inline double evaluate(const LaurentPolynomial& p, const Point& point) { return p.evaluate(point); }
inline LaurentPolynomial substitute(const LaurentPolynomial& p, const Bindings& b) { return p.substitute(b); }

}  // namespace tnc
