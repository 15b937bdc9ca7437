#pragma once

#include <cstddef>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "tnc/events.hpp"
#include "tnc/transform.hpp"

namespace tnc {

/// Sampled time series with one column per state variable.
class Trajectory {
 public:
  Trajectory() = default;
  explicit Trajectory(std::vector<std::string> names);

  void append(double t, const double* state);
  void mark_event(std::size_t sample_index) { event_marks_.push_back(sample_index); }

  [[nodiscard]] std::size_t size() const { return times_.size(); }
  [[nodiscard]] const std::vector<double>& times() const { return times_; }
  [[nodiscard]] const std::vector<std::string>& names() const { return names_; }
  [[nodiscard]] bool has(std::string_view name) const;
  [[nodiscard]] const std::vector<double>& column(std::string_view name) const;
  [[nodiscard]] double value(std::string_view name, std::size_t i) const { return column(name)[i]; }
  [[nodiscard]] const std::vector<std::size_t>& event_marks() const { return event_marks_; }

  /// Adds a derived column (e.g. a ratio); throws if the name exists or the length differs.
  void add_column(std::string name, std::vector<double> values);

  /// `t,<name>,...` header then one row per sample, 17 significant digits, LF endings.
  void write_csv(std::ostream& os) const;

 private:
  std::vector<double> times_;
  std::vector<std::string> names_;
  std::vector<std::vector<double>> columns_;
  std::vector<std::size_t> event_marks_;
};

class SimulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Integration stopped because the state stopped being finite (or the step size collapsed
/// against a singularity). Carries everything sampled before that.
class BlowUpError : public SimulationError {
 public:
  BlowUpError(const std::string& what, double last_finite_time, Trajectory partial)
      : SimulationError(what), last_finite_time_(last_finite_time), partial_(std::move(partial)) {}
  [[nodiscard]] double last_finite_time() const { return last_finite_time_; }
  [[nodiscard]] const Trajectory& partial() const { return partial_; }

 private:
  double last_finite_time_;
  Trajectory partial_;
};

/// Dormand-Prince 5(4) with PI step-size control and dense output on the uniform sample grid.
/// Events are applied at their times; samples at an event time show the post-event state.
Trajectory integrate(const ODESystem& sys, const SimParams& params, const EventSchedule& events = {},
                     const PlaceholderImpls& placeholders = {});

/// Same for a compiled network. Bias events recompile the affected pair from the source ODE.
Trajectory integrate(const TNSystem& tn, const SimParams& params, const EventSchedule& events = {},
                     const PlaceholderImpls& placeholders = {});

}  // namespace tnc
