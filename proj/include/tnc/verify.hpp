#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tnc/sim.hpp"
#include "tnc/transform.hpp"

namespace tnc {

class VerifyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct IdentityResult {
  bool pass = false;
  LaurentPolynomial residual;  ///< zero iff pass
};

/// For each ratio pair, checks (rhs(v_T)*v_B - v_T*rhs(v_B)) * v_B^-2 == rhs_sys(v) under
/// v -> v_T/v_B, in exact arithmetic. Keyed by source variable.
std::map<std::string, IdentityResult> symbolic_ratio_identity(const ODESystem& sys, const TNSystem& tn);

struct RatioErrorResult {
  std::map<std::string, double> max_error;  ///< per source variable (ratio pairs and direct variables)
  std::vector<std::string> nonpositive_bottoms;  ///< pairs whose bottom sample was <= 0
};

/// Max over the shared grid of |v(t) - v_T(t)/v_B(t)|; direct variables compare as-is.
RatioErrorResult ratio_error(const Trajectory& orig, const Trajectory& tn,
                             const std::vector<std::pair<std::string, RatioPair>>& pairing,
                             const std::vector<std::string>& direct = {});

struct BookendPair {
  double bottom_min = 0.0;
  double bottom_max = 0.0;
  double top_max = 0.0;
  double floor = 0.0;  ///< min(v_B(0), beta/gamma) - tolerance
  bool pass = false;
};

struct BookendOptions {
  double tolerance = 1e-6;
  /// Optional ceiling on every bottom factor; bottoms above it fail.
  std::optional<double> bottom_ceiling;
};

/// Bottom factors must stay above min(v_B(0), beta/gamma) - tolerance and every factor finite.
std::map<std::string, BookendPair> bookend_check(const Trajectory& tn_traj, const TNSystem& tn,
                                                 const BookendOptions& options = {});

/// max over samples of |sum_i w_i x_i(t) - expected|.
double conservation_check(const Trajectory& traj, const std::map<std::string, Rational>& weights,
                          const Rational& expected);

struct VerifyThresholds {
  double max_ratio_error = 1e-6;
  /// Ratio error is only compared up to this time (chaotic systems); empty = whole run.
  std::optional<double> ratio_horizon;
  BookendOptions bookend;
};

struct VerificationReport {
  std::map<std::string, IdentityResult> symbolic;
  std::map<std::string, double> max_ratio_error;
  std::vector<std::string> nonpositive_bottoms;
  std::map<std::string, BookendPair> bookends;
  std::map<std::string, double> conservation;  ///< named residuals
  std::map<std::string, double> conservation_limits;
  VerifyThresholds thresholds;
  double t_end = 0.0;

  [[nodiscard]] bool symbolic_pass() const;
  [[nodiscard]] bool ratio_pass() const;
  [[nodiscard]] bool bookend_pass() const;
  [[nodiscard]] bool conservation_pass() const;
  [[nodiscard]] bool verdict() const;

  /// Line-oriented `key=value` serialization.
  void write(std::ostream& os) const;
};

struct ConservationLaw {
  std::string name;
  std::map<std::string, Rational> weights;
  Rational expected;
  double tolerance = 1e-6;
};

/// Runs every check: symbolic identity, co-simulation, bookends, conservation laws.
VerificationReport verify(const TNSystem& tn, const SimParams& params, const EventSchedule& events = {},
                          const PlaceholderImpls& placeholders = {}, const VerifyThresholds& thresholds = {},
                          const std::vector<ConservationLaw>& laws = {});

}  // namespace tnc
