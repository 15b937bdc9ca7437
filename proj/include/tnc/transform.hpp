#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tnc/events.hpp"
#include "tnc/odesys.hpp"

namespace tnc {

enum class Mode {
  Stable,  ///< beta-augmented construction; bottoms stay above min(v_B(0), beta/gamma)
  Warmup,  ///< beta-free construction; correct ratios but factors may drift (unstable)
};

class CompileError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RatioPair {
  std::string top;
  std::string bottom;
  friend bool operator==(const RatioPair&, const RatioPair&) = default;
};

/// Symbol names used for the factors of `v`.
RatioPair ratio_symbols(const std::string& v);

/// A system in transcriptional-network form together with how it encodes its source.
struct TNSystem {
  ODESystem base;    ///< ODEs over tops, bottoms, direct variables and placeholders
  ODESystem source;  ///< the system being implemented (needed for bias recompilation)
  std::vector<std::pair<std::string, RatioPair>> pairing;  ///< in source order
  Rational gamma{1};
  Rational beta{1};
  Mode mode = Mode::Stable;
  std::map<std::string, bool> hungarian;  ///< per ratio variable

  [[nodiscard]] const RatioPair* pair_of(std::string_view v) const;
  /// v -> v_T * v_B^-1 for every ratio variable.
  [[nodiscard]] Bindings ratio_bindings() const;

  friend bool operator==(const TNSystem&, const TNSystem&) = default;
};

/// Top and bottom right-hand sides for one ratio variable whose source ODE is `rhs`.
std::pair<LaurentPolynomial, LaurentPolynomial> compile_ratio_rhs(const LaurentPolynomial& rhs,
                                                                  const RatioPair& pair,
                                                                  const Bindings& ratio_bindings,
                                                                  const Rational& gamma, const Rational& beta,
                                                                  Mode mode);

/// Compiles `sys` into a transcriptional network with decay `gamma`.
/// `denominator_scale[v]` sets v_B(0) (default 1); v_T(0) = v(0) * v_B(0).
TNSystem compile(const ODESystem& sys, const Rational& gamma, const Rational& beta = Rational(1),
                 Mode mode = Mode::Stable, const std::map<std::string, Rational>& denominator_scale = {});

struct TNOffense {
  std::string variable;
  Monomial monomial;
  Rational coefficient;  ///< coefficient in rhs + gamma*variable
};

struct TNValidation {
  std::vector<TNOffense> offenses;
  [[nodiscard]] bool valid() const { return offenses.empty(); }
};

/// Checks rhs(w) + gamma*w is a positive Laurent polynomial for every variable w.
TNValidation validate_tn(const ODESystem& sys, const Rational& gamma);

/// Simulates `sys` over [0, t_end] and returns margin times the largest observed p_v^-/v
/// (q_v^- for Hungarian variables) over ratio variables, rounded up to 3 significant digits.
Rational estimate_gamma(const ODESystem& sys, double t_end, double margin = 1.1,
                        const EventSchedule& events = {}, const PlaceholderImpls& placeholders = {});

/// Adds a direct variable `name` with ODE gamma_track * (sum c_i * v_i_T/v_i_B - name).
TNSystem add_tracker(const TNSystem& tn, const std::string& name,
                     const std::vector<std::pair<Rational, std::string>>& target, const Rational& gamma_track,
                     const Rational& initial = Rational(0));

}  // namespace tnc
