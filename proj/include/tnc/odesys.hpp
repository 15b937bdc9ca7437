#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "tnc/laurent.hpp"

namespace tnc {

/// How a source variable is carried into the transcriptional network.
enum class Representation {
  Ratio,   ///< v = v_T / v_B
  Direct,  ///< v is itself a transcription factor
};

class SystemError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Named variables with Laurent right-hand sides, initial values and declared placeholders.
class ODESystem {
 public:
  /// Appends a variable. Throws SystemError on a duplicate name or a negative initial value.
  void add_variable(const std::string& name, LaurentPolynomial rhs, Rational initial = Rational(0),
                    Representation rep = Representation::Ratio);
  void add_placeholder(const std::string& name);

  [[nodiscard]] const std::vector<std::string>& variables() const { return variables_; }
  [[nodiscard]] const std::set<std::string, std::less<>>& placeholders() const { return placeholders_; }
  [[nodiscard]] bool has_variable(std::string_view name) const;
  [[nodiscard]] bool is_placeholder(std::string_view name) const { return placeholders_.contains(name); }

  [[nodiscard]] const LaurentPolynomial& rhs(std::string_view v) const;
  [[nodiscard]] const Rational& initial(std::string_view v) const;
  [[nodiscard]] Representation representation(std::string_view v) const;

  void set_rhs(std::string_view v, LaurentPolynomial rhs);
  void set_initial(std::string_view v, Rational value);
  void set_representation(std::string_view v, Representation rep);

  /// Throws SystemError if any right-hand side mentions an undeclared symbol.
  void check_closed() const;

  friend bool operator==(const ODESystem&, const ODESystem&) = default;

 private:
  std::size_t index_of(std::string_view v) const;

  std::vector<std::string> variables_;
  std::vector<LaurentPolynomial> rhs_;
  std::vector<Rational> initial_;
  std::vector<Representation> representation_;
  std::set<std::string, std::less<>> placeholders_;
};

/// Mass-action reaction; species multisets are stored as name -> count.
struct Reaction {
  std::map<std::string, int> reactants;
  std::map<std::string, int> products;
  Rational rate_constant{1};
};

/// Parses "A + 2B ->{k} 3C" or "X <->{30}{0.5} 2X" (the reversible form yields two reactions).
/// "0" or "empty" denotes the empty multiset.
std::vector<Reaction> parse_reactions(std::string_view line);

/// q such that the negative part of rhs(v) equals v*q, or nullopt if some negative monomial lacks v.
std::optional<LaurentPolynomial> hungarian_quotient(const ODESystem& sys, std::string_view v);

/// Mass-action ODEs. Species are ordered by first appearance; missing initials default to 0.
ODESystem reactions_to_odes(const std::vector<Reaction>& crn, const std::map<std::string, Rational>& initial);

/// Replaces v by (v - c) in every right-hand side and raises v's initial value by c.
ODESystem shift_variable(const ODESystem& sys, std::string_view v, const Rational& c);

struct Diagnostic {
  enum class Severity { Warning, Error };
  Severity severity = Severity::Warning;
  std::string variable;
  std::string message;
};

/// One diagnostic per non-Hungarian Ratio variable; an Error when it also starts at 0.
std::vector<Diagnostic> check_positivity_preconditions(const ODESystem& sys);

}  // namespace tnc
