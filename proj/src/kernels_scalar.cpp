#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>

#include "tnc/kernels.hpp"

namespace tnc::kernels {

namespace scalar {

namespace {

// Square-and-multiply; the AVX2 variant applies the same multiplications per lane.
inline double ipow(double v, std::int32_t e) {
  std::uint32_t n = static_cast<std::uint32_t>(e < 0 ? -e : e);
  double r = 1.0;
  double b = v;
  while (n != 0) {
    if (n & 1u) r = r * b;
    n >>= 1;
    b = b * b;
  }
  return e < 0 ? 1.0 / r : r;
}

}  // namespace

void eval_terms(const TermTable& table, const double* slots, double* out) {
  const std::size_t n = table.terms;
  for (std::size_t t = 0; t < n; ++t) {
    double acc = table.coef[t];
    for (std::size_t j = 0; j < table.max_factors; ++j) {
      const std::size_t at = j * n + t;
      acc = acc * ipow(slots[table.slot[at]], table.exponent[at]);
    }
    out[t] = acc;
  }
}

void combine(std::size_t n, const double* base, double h, std::span<const double> c, const double* const* k,
             double* out) {
  for (std::size_t i = 0; i < n; ++i) {
    double acc = c[0] * k[0][i];
    for (std::size_t j = 1; j < c.size(); ++j) acc = acc + c[j] * k[j][i];
    out[i] = base[i] + h * acc;
  }
}

double error_norm(std::size_t n, const double* err, const double* y0, const double* y1, double atol, double rtol) {
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double scale = atol + rtol * std::max(std::fabs(y0[i]), std::fabs(y1[i]));
    const double e = std::fabs(err[i]);
    const double r = e == 0.0 ? 0.0 : e / scale;  // exact zero error passes even when scale is 0
    if (std::isnan(r)) return r;
    worst = std::max(worst, r);
  }
  return worst;
}

}  // namespace scalar

void reduce_rows(const TermTable& table, const double* term_values, double* rows) {
  const std::size_t nrows = table.row_begin.empty() ? 0 : table.row_begin.size() - 1;
  for (std::size_t r = 0; r < nrows; ++r) {
    double sum = 0.0;
    for (std::size_t t = table.row_begin[r]; t < table.row_begin[r + 1]; ++t) sum = sum + term_values[t];
    rows[r] = sum;
  }
}

namespace {

constexpr KernelTable kScalar{Isa::Scalar, &scalar::eval_terms, &scalar::combine, &scalar::error_norm};
constexpr KernelTable kAvx2{Isa::Avx2, &avx2::eval_terms, &avx2::combine, &avx2::error_norm};

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
  static const bool has = __builtin_cpu_supports("avx2");
  return has;
#else
  return false;
#endif
}

std::atomic<const KernelTable*> g_override{nullptr};

}  // namespace

bool supported(Isa isa) { return isa == Isa::Scalar || cpu_has_avx2(); }

const KernelTable& table(Isa isa) {
  if (!supported(isa)) throw std::invalid_argument("kernel variant not supported by this CPU");
  return isa == Isa::Avx2 ? kAvx2 : kScalar;
}

const KernelTable& active() {
  if (const KernelTable* t = g_override.load(std::memory_order_acquire)) return *t;
  return cpu_has_avx2() ? kAvx2 : kScalar;
}

void select(Isa isa) { g_override.store(&table(isa), std::memory_order_release); }

void select_auto() { g_override.store(nullptr, std::memory_order_release); }

std::string_view name(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

}  // namespace tnc::kernels
