#pragma once

// Numeric inner loops of the integrator. Every kernel has a scalar reference and an AVX2
// variant that performs the same IEEE operations in the same order, so the variants agree
// bit for bit and trajectories do not depend on the dispatch choice.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace tnc::kernels {

enum class Isa { Scalar, Avx2 };

/// Flattened Laurent terms. Factor j of term t lives at [j * terms + t]; unused factor slots
/// have exponent 0. Terms are grouped by output row: row r owns [row_begin[r], row_begin[r+1]).
struct TermTable {
  std::size_t terms = 0;
  std::size_t max_factors = 0;
  std::vector<double> coef;
  std::vector<std::int32_t> slot;
  std::vector<std::int32_t> exponent;
  std::vector<std::size_t> row_begin;
};

struct KernelTable {
  Isa isa;
  /// out[t] = coef[t] * prod_j slots[slot[j][t]] ^ exponent[j][t]
  void (*eval_terms)(const TermTable& table, const double* slots, double* out);
  /// out[i] = base[i] + h * (c[0]*k[0][i] + c[1]*k[1][i] + ...)
  void (*combine)(std::size_t n, const double* base, double h, std::span<const double> c,
                  const double* const* k, double* out);
  /// max_i |err[i]| / (atol + rtol * max(|y0[i]|, |y1[i]|))
  double (*error_norm)(std::size_t n, const double* err, const double* y0, const double* y1, double atol,
                       double rtol);
};

[[nodiscard]] bool supported(Isa isa);
/// The table in use: AVX2 when the CPU has it, unless overridden by select().
[[nodiscard]] const KernelTable& active();
/// Forces a variant; throws std::invalid_argument if the CPU lacks it.
void select(Isa isa);
/// Restores automatic selection.
void select_auto();
[[nodiscard]] const KernelTable& table(Isa isa);
[[nodiscard]] std::string_view name(Isa isa);

/// Sums term values into rows; shared by all variants (row order and in-row order fixed).
void reduce_rows(const TermTable& table, const double* term_values, double* rows);

namespace scalar {
void eval_terms(const TermTable& table, const double* slots, double* out);
void combine(std::size_t n, const double* base, double h, std::span<const double> c, const double* const* k,
             double* out);
double error_norm(std::size_t n, const double* err, const double* y0, const double* y1, double atol, double rtol);
}  // namespace scalar

namespace avx2 {
void eval_terms(const TermTable& table, const double* slots, double* out);
void combine(std::size_t n, const double* base, double h, std::span<const double> c, const double* const* k,
             double* out);
double error_norm(std::size_t n, const double* err, const double* y0, const double* y1, double atol, double rtol);
}  // namespace avx2

}  // namespace tnc::kernels
