#pragma once

// Line-oriented system files (.tn for ODEs, .crn for reaction networks; compiled networks use
// the same syntax plus `pair` and `source` lines):
//
//   var x = 2                 initial value (may be negative before shifts)
//   ode x' = y - 2            right-hand side
//   A + 2B ->{k} 3C           mass-action reaction; X <->{30}{0.5} 2X is reversible
//   direct x                  keep x as a single factor instead of a ratio pair
//   placeholder f = extremum_objective(x)
//   track x = z + 0.1*p       direct variable x' = gamma*(target - x); `track x rate 2 = ...`
//   shift x 2                 replace x by x - 2 everywhere, raise x(0) by 2
//   scale x 3                 denominator factor x_B(0) = 3
//   gamma 5/2 | gamma auto    beta 1    mode stable|warmup
//   event 5 set x 0.09 0.1    event 10 set v 10    event 30 bias v 6
//   sim t_end 25 points 1000 rtol 1e-8 atol 1e-10 max_step 0.1
//   verify ratio_tol 1e-3 horizon 1
//   conserve total = x1 + x2 + x3 + x4 == 13
//   pair x x_T x_B            (compiled files) ratio pairing
//   source <line>             (compiled files) a line of the source system

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tnc/events.hpp"
#include "tnc/odesys.hpp"
#include "tnc/transform.hpp"
#include "tnc/verify.hpp"

namespace tnc {

class FormatError : public std::runtime_error {
 public:
  FormatError(int line, const std::string& message)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message : message), line_(line) {}
  [[nodiscard]] int line() const { return line_; }

 private:
  int line_;
};

struct VarDecl {
  std::string name;
  Rational initial;
  friend bool operator==(const VarDecl&, const VarDecl&) = default;
};

struct OdeDecl {
  std::string name;
  LaurentPolynomial rhs;
  friend bool operator==(const OdeDecl&, const OdeDecl&) = default;
};

struct ReactionLine {
  std::map<std::string, int> reactants;
  std::map<std::string, int> products;
  Rational forward;
  std::optional<Rational> backward;
  friend bool operator==(const ReactionLine&, const ReactionLine&) = default;
};

struct PlaceholderDecl {
  std::string name;
  std::string impl;  ///< empty when only declared
  std::vector<std::string> arguments;
  friend bool operator==(const PlaceholderDecl&, const PlaceholderDecl&) = default;
};

struct TrackDecl {
  std::string name;
  LaurentPolynomial target;
  std::optional<Rational> rate;  ///< defaults to gamma
  friend bool operator==(const TrackDecl&, const TrackDecl&) = default;
};

struct ShiftDecl {
  std::string name;
  Rational amount;
  friend bool operator==(const ShiftDecl&, const ShiftDecl&) = default;
};

struct EventDecl {
  Rational time;
  enum class Kind { Set, SetRatio, Bias } kind = Kind::Set;
  std::string variable;
  Rational a;
  Rational b;
  friend bool operator==(const EventDecl&, const EventDecl&) = default;
};

struct ConserveDecl {
  std::string name;
  LaurentPolynomial expr;
  Rational expected;
  friend bool operator==(const ConserveDecl&, const ConserveDecl&) = default;
};

struct SimDecl {
  std::optional<Rational> t_end;
  std::optional<int> points;
  std::optional<Rational> rtol;
  std::optional<Rational> atol;
  std::optional<Rational> max_step;
  friend bool operator==(const SimDecl&, const SimDecl&) = default;
};

struct VerifyDecl {
  std::optional<Rational> ratio_tol;
  std::optional<Rational> horizon;
  friend bool operator==(const VerifyDecl&, const VerifyDecl&) = default;
};

/// Parsed contents of a system file, kept declaration by declaration so it prints back.
struct SystemFile {
  std::vector<VarDecl> vars;
  std::vector<OdeDecl> odes;
  std::vector<ReactionLine> reactions;
  std::vector<std::string> direct;
  std::vector<PlaceholderDecl> placeholders;
  std::vector<TrackDecl> tracks;
  std::vector<ShiftDecl> shifts;
  std::vector<std::pair<std::string, Rational>> scales;
  std::optional<Rational> gamma;  ///< empty = auto
  std::optional<Rational> beta;
  std::optional<Mode> mode;
  std::vector<EventDecl> events;
  SimDecl sim;
  VerifyDecl verify;
  std::vector<ConserveDecl> conserve;
  std::vector<std::pair<std::string, RatioPair>> pairs;  ///< compiled files only
  std::vector<std::string> source_lines;                  ///< compiled files only

  [[nodiscard]] bool is_network() const { return !pairs.empty(); }

  /// Source ODE system with reactions expanded, trackers added (rate defaults to `gamma`) and
  /// shifts applied.
  [[nodiscard]] ODESystem system(const std::optional<Rational>& gamma_override = std::nullopt) const;
  /// Compiled network described by a file with `pair` lines.
  [[nodiscard]] TNSystem network() const;
  /// The embedded source system of a compiled file.
  [[nodiscard]] SystemFile source() const;

  [[nodiscard]] EventSchedule event_schedule() const;
  [[nodiscard]] PlaceholderImpls placeholder_impls() const;
  [[nodiscard]] SimParams sim_params() const;
  [[nodiscard]] VerifyThresholds verify_thresholds() const;
  [[nodiscard]] std::vector<ConservationLaw> conservation_laws() const;
  [[nodiscard]] std::map<std::string, Rational> denominator_scales() const;

  friend bool operator==(const SystemFile&, const SystemFile&) = default;
};

SystemFile parse_system_file(std::string_view text);
SystemFile load_system_file(const std::filesystem::path& path);

/// Canonical text; parse(print(f)) == f.
std::string print_system_file(const SystemFile& file);

/// A compiled file: the network, its settings, and the source file embedded as `source` lines.
SystemFile network_file(const TNSystem& tn, const SystemFile& source);

}  // namespace tnc
