#pragma once

#include <random>
#include <string>
#include <vector>

#include "tnc/laurent.hpp"

namespace tnc::testing {

/// Random Laurent polynomial over `vars` with small rational coefficients.
inline LaurentPolynomial random_laurent(std::mt19937_64& rng, const std::vector<std::string>& vars, int max_terms,
                                        int min_exp, int max_exp) {
  std::uniform_int_distribution<int> terms(0, max_terms), e(min_exp, max_exp), num(-9, 9), den(1, 4);
  LaurentPolynomial p;
  const int n = terms(rng);
  for (int k = 0; k < n; ++k) {
    Monomial m;
    for (const auto& v : vars) m = m * Monomial::symbol(v, e(rng));
    p += LaurentPolynomial(m, Rational(num(rng), den(rng)));
  }
  return p;
}

inline Point random_point(std::mt19937_64& rng, const std::vector<std::string>& vars) {
  std::uniform_real_distribution<double> u(0.5, 2.0);
  Point pt;
  for (const auto& v : vars) pt[v] = u(rng);
  return pt;
}

}  // namespace tnc::testing
