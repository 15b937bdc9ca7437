#pragma once

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "tnc/rational.hpp"

namespace tnc {

/// Integration settings. The output grid has `sample_points` uniform intervals over [0, t_end].
struct SimParams {
  double t_end = 1.0;
  int sample_points = 1000;
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  std::optional<double> max_step;
};

/// Overwrites a variable with top/bottom (the pair itself for a compiled ratio variable).
struct SetRatio {
  std::string variable;
  double top = 0.0;
  double bottom = 1.0;
};

/// Overwrites a variable with a value.
struct SetDirect {
  std::string variable;
  double value = 0.0;
};

/// Replaces the constant term added to a source variable's ODE from this time on.
struct SetBias {
  std::string variable;
  Rational constant;
};

struct Event {
  double time = 0.0;
  std::variant<SetRatio, SetDirect, SetBias> action;
};

using EventSchedule = std::vector<Event>;

/// External nonnegative signal bound to a placeholder symbol at simulation time. Arguments are
/// source variable names; compiled ratio variables are passed as top/bottom.
struct PlaceholderImpl {
  std::vector<std::string> arguments;
  std::function<double(std::span<const double>)> fn;
};

using PlaceholderImpls = std::map<std::string, PlaceholderImpl, std::less<>>;

/// Built-in placeholder functions available to system files, by name.
std::optional<std::function<double(std::span<const double>)>> builtin_placeholder(std::string_view name);

}  // namespace tnc
