#include "tnc/rational.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <string>
#include <ostream>
#include <stdexcept>

namespace tnc {

Rational::Rational(long numerator, long denominator) {
  if (denominator == 0) throw std::domain_error("rational with zero denominator");
  value_ = mpq_class(numerator, denominator);
  value_.canonicalize();
}

double Rational::to_double() const {
  const mpz_class& num = value_.get_num();
  const mpz_class& den = value_.get_den();
  // Both exactly representable: one IEEE division rounds correctly.
  if (mpz_sizeinbase(num.get_mpz_t(), 2) <= 53 && mpz_sizeinbase(den.get_mpz_t(), 2) <= 53)
    return num.get_d() / den.get_d();
  const mpf_class wide(value_, 512);
  mp_exp_t exp = 0;
  const std::string digits = wide.get_str(exp, 10, 60);
  if (digits.empty()) return 0.0;
  const bool negative = digits[0] == '-';
  const std::string text = std::string(negative ? "-0." : "0.") + digits.substr(negative ? 1 : 0) + "e" + std::to_string(exp);
  return std::strtod(text.c_str(), nullptr);
}

Rational& Rational::operator/=(const Rational& o) {
  if (o.is_zero()) throw std::domain_error("division by zero");
  value_ /= o.value_;
  return *this;
}

namespace {

mpz_class pow10(unsigned long e) {
  mpz_class r;
  mpz_ui_pow_ui(r.get_mpz_t(), 10, e);
  return r;
}

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

}  // namespace

Rational Rational::parse(std::string_view text) {
  const std::string original(text);
  auto fail = [&]() -> Rational { throw std::invalid_argument("not a rational literal: '" + original + "'"); };

  bool negative = false;
  if (!text.empty() && (text.front() == '-' || text.front() == '+')) {
    negative = text.front() == '-';
    text.remove_prefix(1);
  }
  if (text.empty()) return fail();

  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    auto num = text.substr(0, slash);
    auto den = text.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den)) return fail();
    const mpz_class d{std::string(den), 10};
    if (d == 0) throw std::domain_error("rational with zero denominator");
    mpq_class q{mpz_class{std::string(num), 10}, d};
    q.canonicalize();
    return Rational(negative ? mpq_class(-q) : q);
  }

  long exponent = 0;
  if (auto e = text.find_first_of("eE"); e != std::string_view::npos) {
    auto exp_text = text.substr(e + 1);
    bool exp_negative = false;
    if (!exp_text.empty() && (exp_text.front() == '-' || exp_text.front() == '+')) {
      exp_negative = exp_text.front() == '-';
      exp_text.remove_prefix(1);
    }
    if (!all_digits(exp_text) || exp_text.size() > 6) return fail();
    exponent = std::stol(std::string(exp_text));
    if (exp_negative) exponent = -exponent;
    text = text.substr(0, e);
  }

  std::string digits;
  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    auto whole = text.substr(0, dot);
    auto frac = text.substr(dot + 1);
    if (whole.empty() && frac.empty()) return fail();
    if ((!whole.empty() && !all_digits(whole)) || (!frac.empty() && !all_digits(frac))) return fail();
    digits = std::string(whole) + std::string(frac);
    exponent -= static_cast<long>(frac.size());
  } else {
    if (!all_digits(text)) return fail();
    digits = std::string(text);
  }
  if (digits.empty()) return fail();

  mpq_class q{mpz_class(digits, 10)};
  if (exponent > 0) q *= pow10(static_cast<unsigned long>(exponent));
  if (exponent < 0) q /= pow10(static_cast<unsigned long>(-exponent));
  q.canonicalize();
  return Rational(negative ? mpq_class(-q) : q);
}

Rational Rational::ceil_decimal(double value, int digits) {
  if (!std::isfinite(value)) throw std::domain_error("ceil_decimal of non-finite value");
  if (value == 0.0) return Rational(0);
  const double mag = std::floor(std::log10(std::fabs(value)));
  const long scale_exp = static_cast<long>(digits - 1 - mag);
  const double scaled = value * std::pow(10.0, static_cast<double>(scale_exp));
  // Shave representation noise so that e.g. 2.5000000000000004 rounds to 2.5.
  const double rounded = std::ceil(scaled - 1e-9 * std::fabs(scaled));
  mpq_class q{mpz_class(static_cast<long>(rounded))};
  if (scale_exp > 0) q /= pow10(static_cast<unsigned long>(scale_exp));
  if (scale_exp < 0) q *= pow10(static_cast<unsigned long>(-scale_exp));
  q.canonicalize();
  return Rational(q);
}

std::string Rational::to_string() const {
  if (is_integer()) return value_.get_num().get_str();

  // Terminating decimal iff the denominator has no prime factors besides 2 and 5.
  mpz_class den = value_.get_den();
  unsigned long twos = mpz_remove(den.get_mpz_t(), den.get_mpz_t(), mpz_class(2).get_mpz_t());
  unsigned long fives = mpz_remove(den.get_mpz_t(), den.get_mpz_t(), mpz_class(5).get_mpz_t());
  if (den != 1) return value_.get_num().get_str() + "/" + value_.get_den().get_str();

  const unsigned long places = std::max(twos, fives);
  mpz_class scaled = value_.get_num() * pow10(places) / value_.get_den();
  const bool negative = scaled < 0;
  std::string s = mpz_class(::abs(scaled)).get_str();
  if (s.size() <= places) s.insert(0, places - s.size() + 1, '0');
  s.insert(s.size() - places, ".");
  return negative ? "-" + s : s;
}

std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.to_string(); }

}  // namespace tnc
