// Compiled with -mavx2; only reached through the dispatch table after a CPU check.

#include <algorithm>
#include <cmath>
#include <limits>

#include "tnc/kernels.hpp"

#if defined(__AVX2__)
#include <immintrin.h>
#endif

namespace tnc::kernels::avx2 {

#if defined(__AVX2__)

namespace {

inline __m256d lane_mask(__m128i int_mask) {
  return _mm256_castsi256_pd(_mm256_cvtepi32_epi64(int_mask));
}

// Per-lane square-and-multiply; matches scalar::ipow operation for operation.
inline __m256d ipow4(__m256d v, __m128i e) {
  const __m128i zero = _mm_setzero_si128();
  const __m128i one = _mm_set1_epi32(1);
  const __m128i negative = _mm_cmplt_epi32(e, zero);
  __m128i n = _mm_abs_epi32(e);
  __m256d r = _mm256_set1_pd(1.0);
  __m256d b = v;
  while (_mm_movemask_epi8(_mm_cmpeq_epi32(n, zero)) != 0xFFFF) {
    const __m128i bit = _mm_cmpeq_epi32(_mm_and_si128(n, one), one);
    r = _mm256_blendv_pd(r, _mm256_mul_pd(r, b), lane_mask(bit));
    n = _mm_srli_epi32(n, 1);
    b = _mm256_mul_pd(b, b);
  }
  return _mm256_blendv_pd(r, _mm256_div_pd(_mm256_set1_pd(1.0), r), lane_mask(negative));
}

}  // namespace

void eval_terms(const TermTable& table, const double* slots, double* out) {
  const std::size_t n = table.terms;
  const std::size_t blocked = n - n % 4;
  for (std::size_t t = 0; t < blocked; t += 4) {
    __m256d acc = _mm256_loadu_pd(table.coef.data() + t);
    for (std::size_t j = 0; j < table.max_factors; ++j) {
      const std::size_t at = j * n + t;
      const __m128i idx = _mm_loadu_si128(reinterpret_cast<const __m128i*>(table.slot.data() + at));
      const __m128i e = _mm_loadu_si128(reinterpret_cast<const __m128i*>(table.exponent.data() + at));
      const __m256d v = _mm256_i32gather_pd(slots, idx, 8);
      acc = _mm256_mul_pd(acc, ipow4(v, e));
    }
    _mm256_storeu_pd(out + t, acc);
  }
  if (blocked == n) return;
  // Tail: evaluate the remaining terms through a 4-wide pass on padded copies.
  alignas(32) double coef[4] = {0, 0, 0, 0};
  alignas(16) std::int32_t idx[4] = {0, 0, 0, 0};
  alignas(16) std::int32_t ex[4] = {0, 0, 0, 0};
  for (std::size_t t = blocked; t < n; ++t) coef[t - blocked] = table.coef[t];
  __m256d acc = _mm256_load_pd(coef);
  for (std::size_t j = 0; j < table.max_factors; ++j) {
    for (std::size_t t = blocked; t < n; ++t) {
      idx[t - blocked] = table.slot[j * n + t];
      ex[t - blocked] = table.exponent[j * n + t];
    }
    const __m256d v = _mm256_i32gather_pd(slots, _mm_load_si128(reinterpret_cast<const __m128i*>(idx)), 8);
    acc = _mm256_mul_pd(acc, ipow4(v, _mm_load_si128(reinterpret_cast<const __m128i*>(ex))));
  }
  alignas(32) double res[4];
  _mm256_store_pd(res, acc);
  for (std::size_t t = blocked; t < n; ++t) out[t] = res[t - blocked];
}

void combine(std::size_t n, const double* base, double h, std::span<const double> c, const double* const* k,
             double* out) {
  const __m256d hv = _mm256_set1_pd(h);
  const std::size_t blocked = n - n % 4;
  for (std::size_t i = 0; i < blocked; i += 4) {
    __m256d acc = _mm256_mul_pd(_mm256_set1_pd(c[0]), _mm256_loadu_pd(k[0] + i));
    for (std::size_t j = 1; j < c.size(); ++j)
      acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_set1_pd(c[j]), _mm256_loadu_pd(k[j] + i)));
    _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_loadu_pd(base + i), _mm256_mul_pd(hv, acc)));
  }
  for (std::size_t i = blocked; i < n; ++i) {
    double acc = c[0] * k[0][i];
    for (std::size_t j = 1; j < c.size(); ++j) acc = acc + c[j] * k[j][i];
    out[i] = base[i] + h * acc;
  }
}

double error_norm(std::size_t n, const double* err, const double* y0, const double* y1, double atol, double rtol) {
  const __m256d sign = _mm256_set1_pd(-0.0);
  const __m256d av = _mm256_set1_pd(atol);
  const __m256d rv = _mm256_set1_pd(rtol);
  __m256d worst = _mm256_setzero_pd();
  __m256d nan = _mm256_setzero_pd();
  const std::size_t blocked = n - n % 4;
  for (std::size_t i = 0; i < blocked; i += 4) {
    const __m256d a0 = _mm256_andnot_pd(sign, _mm256_loadu_pd(y0 + i));
    const __m256d a1 = _mm256_andnot_pd(sign, _mm256_loadu_pd(y1 + i));
    const __m256d scale = _mm256_add_pd(av, _mm256_mul_pd(rv, _mm256_max_pd(a0, a1)));
    const __m256d e = _mm256_andnot_pd(sign, _mm256_loadu_pd(err + i));
    const __m256d exact = _mm256_cmp_pd(e, _mm256_setzero_pd(), _CMP_EQ_OQ);
    const __m256d r = _mm256_andnot_pd(exact, _mm256_div_pd(e, scale));
    nan = _mm256_or_pd(nan, _mm256_cmp_pd(r, r, _CMP_UNORD_Q));
    worst = _mm256_max_pd(worst, r);
  }
  if (_mm256_movemask_pd(nan) != 0) return std::numeric_limits<double>::quiet_NaN();
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, worst);
  double result = std::max(std::max(lanes[0], lanes[1]), std::max(lanes[2], lanes[3]));
  for (std::size_t i = blocked; i < n; ++i) {
    const double scale = atol + rtol * std::max(std::fabs(y0[i]), std::fabs(y1[i]));
    const double e = std::fabs(err[i]);
    const double r = e == 0.0 ? 0.0 : e / scale;
    if (std::isnan(r)) return r;
    result = std::max(result, r);
  }
  return result;
}

#else  // no AVX2 in this build: forward to the reference kernels

void eval_terms(const TermTable& table, const double* slots, double* out) { scalar::eval_terms(table, slots, out); }
void combine(std::size_t n, const double* base, double h, std::span<const double> c, const double* const* k,
             double* out) {
  scalar::combine(n, base, h, c, k, out);
}
double error_norm(std::size_t n, const double* err, const double* y0, const double* y1, double atol, double rtol) {
  return scalar::error_norm(n, err, y0, y1, atol, rtol);
}

#endif

}  // namespace tnc::kernels::avx2
