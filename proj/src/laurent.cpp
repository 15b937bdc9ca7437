#include "tnc/laurent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

namespace tnc {

// ---------------------------------------------------------------------------
// Monomial

Monomial::Monomial(std::vector<Factor> factors) {
  std::sort(factors.begin(), factors.end(),
            [](const Factor& a, const Factor& b) { return a.first < b.first; });
  for (auto& [name, e] : factors) {
    if (!factors_.empty() && factors_.back().first == name) {
      factors_.back().second += e;
      if (factors_.back().second == 0) factors_.pop_back();
    } else if (e != 0) {
      factors_.emplace_back(std::move(name), e);
    }
  }
}

Monomial Monomial::symbol(std::string name, int exponent) {
  return Monomial({{std::move(name), exponent}});
}

int Monomial::exponent(std::string_view name) const {
  auto it = std::lower_bound(factors_.begin(), factors_.end(), name,
                             [](const Factor& f, std::string_view n) { return f.first < n; });
  return (it != factors_.end() && it->first == name) ? it->second : 0;
}

Monomial Monomial::inverse() const { return pow(-1); }

Monomial Monomial::pow(int n) const {
  Monomial r;
  if (n == 0) return r;
  r.factors_ = factors_;
  for (auto& f : r.factors_) f.second *= n;
  return r;
}

Monomial operator*(const Monomial& a, const Monomial& b) {
  Monomial r;
  r.factors_.reserve(a.factors_.size() + b.factors_.size());
  auto i = a.factors_.begin();
  auto j = b.factors_.begin();
  while (i != a.factors_.end() || j != b.factors_.end()) {
    if (j == b.factors_.end() || (i != a.factors_.end() && i->first < j->first)) {
      r.factors_.push_back(*i++);
    } else if (i == a.factors_.end() || j->first < i->first) {
      r.factors_.push_back(*j++);
    } else {
      const int e = i->second + j->second;
      if (e != 0) r.factors_.emplace_back(i->first, e);
      ++i;
      ++j;
    }
  }
  return r;
}

std::string Monomial::to_string() const {
  if (factors_.empty()) return "1";
  std::string s;
  for (const auto& [name, e] : factors_) {
    if (!s.empty()) s += '*';
    s += name;
    if (e != 1) s += '^' + std::to_string(e);
  }
  return s;
}

// ---------------------------------------------------------------------------
// LaurentPolynomial

LaurentPolynomial::LaurentPolynomial(Rational constant) { add_term(Monomial{}, constant); }

LaurentPolynomial::LaurentPolynomial(Monomial m, Rational coefficient) { add_term(m, coefficient); }

LaurentPolynomial LaurentPolynomial::symbol(std::string name, int exponent) {
  return LaurentPolynomial(Monomial::symbol(std::move(name), exponent));
}

LaurentPolynomial LaurentPolynomial::from_terms(const std::vector<std::pair<Monomial, Rational>>& terms) {
  LaurentPolynomial p;
  for (const auto& [m, c] : terms) p.add_term(m, c);
  return p;
}

void LaurentPolynomial::add_term(const Monomial& m, const Rational& c) {
  if (c.is_zero()) return;
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

bool LaurentPolynomial::is_positive() const {
  return std::all_of(terms_.begin(), terms_.end(), [](const auto& t) { return t.second.sign() > 0; });
}

std::set<std::string, std::less<>> LaurentPolynomial::symbols() const {
  std::set<std::string, std::less<>> out;
  for (const auto& [m, c] : terms_)
    for (const auto& f : m.factors()) out.insert(f.first);
  return out;
}

std::optional<int> LaurentPolynomial::min_exponent(std::string_view name) const {
  if (terms_.empty()) return std::nullopt;
  int lo = std::numeric_limits<int>::max();
  for (const auto& [m, c] : terms_) lo = std::min(lo, m.exponent(name));
  return lo;
}

Rational LaurentPolynomial::coefficient(const Monomial& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? Rational(0) : it->second;
}

LaurentPolynomial& LaurentPolynomial::operator+=(const LaurentPolynomial& o) {
  for (const auto& [m, c] : o.terms_) add_term(m, c);
  return *this;
}

LaurentPolynomial& LaurentPolynomial::operator-=(const LaurentPolynomial& o) {
  for (const auto& [m, c] : o.terms_) add_term(m, -c);
  return *this;
}

LaurentPolynomial& LaurentPolynomial::operator*=(const LaurentPolynomial& o) {
  LaurentPolynomial r;
  for (const auto& [ma, ca] : terms_)
    for (const auto& [mb, cb] : o.terms_) r.add_term(ma * mb, ca * cb);
  *this = std::move(r);
  return *this;
}

LaurentPolynomial LaurentPolynomial::operator-() const {
  LaurentPolynomial r;
  for (const auto& [m, c] : terms_) r.terms_.emplace(m, -c);
  return r;
}

LaurentPolynomial LaurentPolynomial::inverse() const {
  if (terms_.size() != 1)
    throw AlgebraError("cannot invert '" + to_string() +
                       "': only a single Laurent monomial has a Laurent inverse");
  const auto& [m, c] = *terms_.begin();
  return LaurentPolynomial(m.inverse(), Rational(1) / c);
}

LaurentPolynomial LaurentPolynomial::pow(int n) const {
  if (n < 0) return inverse().pow(-n);
  LaurentPolynomial result(1);
  LaurentPolynomial base = *this;
  while (n > 0) {
    if (n & 1) result *= base;
    n >>= 1;
    if (n > 0) base *= base;
  }
  return result;
}

double LaurentPolynomial::evaluate(const Point& point) const {
  double sum = 0.0;
  for (const auto& [m, c] : terms_) {
    double term = c.to_double();
    for (const auto& [name, e] : m.factors()) {
      auto it = point.find(name);
      if (it == point.end()) throw EvaluationError("unbound symbol '" + name + "'");
      const double v = it->second;
      if (e < 0 && v == 0.0)
        throw EvaluationError("division by zero: '" + name + "' has exponent " + std::to_string(e) +
                              " and value 0");
      term *= std::pow(v, e);
    }
    sum += term;
  }
  return sum;
}

LaurentPolynomial LaurentPolynomial::substitute(const Bindings& bindings) const {
  LaurentPolynomial result;
  for (const auto& [m, c] : terms_) {
    LaurentPolynomial term(c);
    std::vector<Monomial::Factor> kept;
    for (const auto& [name, e] : m.factors()) {
      auto it = bindings.find(name);
      if (it == bindings.end()) {
        kept.emplace_back(name, e);
        continue;
      }
      if (e < 0 && !it->second.is_monomial())
        throw AlgebraError("cannot substitute '" + it->second.to_string() + "' for '" + name +
                           "': it appears with negative exponent and the replacement is not a "
                           "single Laurent monomial");
      term *= it->second.pow(e);
    }
    term *= LaurentPolynomial(Monomial(std::move(kept)));
    result += term;
  }
  return result;
}

std::pair<LaurentPolynomial, LaurentPolynomial> LaurentPolynomial::split_signs() const {
  std::pair<LaurentPolynomial, LaurentPolynomial> out;
  for (const auto& [m, c] : terms_) {
    if (c.sign() > 0)
      out.first.terms_.emplace(m, c);
    else
      out.second.terms_.emplace(m, -c);
  }
  return out;
}

std::string LaurentPolynomial::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [m, c] : terms_) {
    const bool negative = c.sign() < 0;
    if (first)
      os << (negative ? "-" : "");
    else
      os << (negative ? " - " : " + ");
    const Rational mag = c.abs();
    if (m.is_constant()) {
      os << mag;
    } else {
      if (mag != Rational(1)) os << mag << '*';
      os << m.to_string();
    }
    first = false;
  }
  return os.str();
}

std::ostream& operator<<(std::ostream& os, const LaurentPolynomial& p) { return os << p.to_string(); }

}  // namespace tnc
