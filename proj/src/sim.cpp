#include "tnc/sim.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <memory>
#include <ostream>
#include <sstream>

#include "tnc/kernels.hpp"

namespace tnc {

// ---------------------------------------------------------------------------
// Trajectory

Trajectory::Trajectory(std::vector<std::string> names) : names_(std::move(names)), columns_(names_.size()) {}

void Trajectory::append(double t, const double* state) {
  times_.push_back(t);
  for (std::size_t i = 0; i < columns_.size(); ++i) columns_[i].push_back(state[i]);
}

bool Trajectory::has(std::string_view name) const {
  return std::find(names_.begin(), names_.end(), name) != names_.end();
}

const std::vector<double>& Trajectory::column(std::string_view name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) throw std::out_of_range("trajectory has no column '" + std::string(name) + "'");
  return columns_[static_cast<std::size_t>(it - names_.begin())];
}

void Trajectory::add_column(std::string name, std::vector<double> values) {
  if (has(name)) throw std::invalid_argument("duplicate trajectory column '" + name + "'");
  if (values.size() != times_.size()) throw std::invalid_argument("column '" + name + "' has the wrong length");
  names_.push_back(std::move(name));
  columns_.push_back(std::move(values));
}

void Trajectory::write_csv(std::ostream& os) const {
  os << 't';
  for (const auto& n : names_) os << ',' << n;
  os << '\n';
  char buf[32];
  for (std::size_t i = 0; i < times_.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", times_[i]);
    os << buf;
    for (const auto& col : columns_) {
      std::snprintf(buf, sizeof buf, "%.17g", col[i]);
      os << ',' << buf;
    }
    os << '\n';
  }
}

std::optional<std::function<double(std::span<const double>)>> builtin_placeholder(std::string_view name) {
  if (name == "extremum_objective")
    return [](std::span<const double> a) {
      const double x = a[0];
      return std::exp(-2.0 * (x - 3.0) * (x - 3.0)) + std::exp(-2.0 * (x - 5.0) * (x - 5.0) / 3.0);
    };
  if (name == "identity") return [](std::span<const double> a) { return a[0]; };
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Integration

namespace {

/// Where a source variable lives in the state vector.
struct Location {
  int direct = -1;
  int top = -1;
  int bottom = -1;
  [[nodiscard]] bool is_ratio() const { return top >= 0; }
};

struct Model {
  std::vector<std::string> names;
  std::vector<double> initial;
  std::map<std::string, Location, std::less<>> locations;
  std::function<std::vector<LaurentPolynomial>(const std::map<std::string, Rational>&)> build_rhs;
  std::vector<std::string> placeholders;
};

/// Right-hand sides lowered onto the kernel term layout.
class Program {
 public:
  Program(const Model& model, const std::vector<LaurentPolynomial>& rhs, const PlaceholderImpls& impls)
      : n_(model.names.size()) {
    std::map<std::string, std::int32_t, std::less<>> slot_of;
    for (std::size_t i = 0; i < n_; ++i) slot_of.emplace(model.names[i], static_cast<std::int32_t>(i));
    for (const auto& p : model.placeholders) {
      auto it = impls.find(p);
      if (it == impls.end()) throw SimulationError("placeholder '" + p + "' has no implementation");
      Placeholder ph;
      ph.name = p;
      ph.fn = it->second.fn;
      for (const auto& a : it->second.arguments) {
        auto loc = model.locations.find(a);
        if (loc == model.locations.end())
          throw SimulationError("placeholder '" + p + "' takes unknown variable '" + a + "'");
        ph.args.push_back(loc->second);
      }
      placeholders_.push_back(std::move(ph));
      slot_of.emplace(p, static_cast<std::int32_t>(n_ + placeholders_.size() - 1));
    }
    slots_.assign(n_ + placeholders_.size() + 1, 0.0);
    slots_.back() = 1.0;

    std::vector<std::vector<std::pair<std::int32_t, std::int32_t>>> factors;
    table_.row_begin.push_back(0);
    for (std::size_t r = 0; r < n_; ++r) {
      for (const auto& [m, c] : rhs[r].terms()) {
        table_.coef.push_back(c.to_double());
        auto& fs = factors.emplace_back();
        for (const auto& [name, e] : m.factors()) {
          auto it = slot_of.find(name);
          if (it == slot_of.end())
            throw SimulationError("ODE for '" + model.names[r] + "' uses unknown symbol '" + name + "'");
          fs.emplace_back(it->second, e);
        }
        table_.max_factors = std::max(table_.max_factors, fs.size());
      }
      table_.row_begin.push_back(table_.coef.size());
    }
    table_.terms = table_.coef.size();
    table_.slot.assign(table_.terms * table_.max_factors, 0);
    table_.exponent.assign(table_.terms * table_.max_factors, 0);
    for (std::size_t t = 0; t < table_.terms; ++t)
      for (std::size_t j = 0; j < factors[t].size(); ++j) {
        table_.slot[j * table_.terms + t] = factors[t][j].first;
        table_.exponent[j * table_.terms + t] = factors[t][j].second;
      }
    term_values_.assign(table_.terms, 0.0);
  }

  void operator()(const double* y, double* dy) {
    std::copy(y, y + n_, slots_.begin());
    for (std::size_t p = 0; p < placeholders_.size(); ++p) {
      auto& ph = placeholders_[p];
      args_.clear();
      for (const auto& loc : ph.args) args_.push_back(loc.is_ratio() ? y[loc.top] / y[loc.bottom] : y[loc.direct]);
      const double v = ph.fn(args_);
      if (!std::isfinite(v) || v < 0.0)
        throw SimulationError("placeholder '" + ph.name + "' returned " + std::to_string(v) +
                              " (must be finite and nonnegative)");
      slots_[n_ + p] = v;
    }
    const auto& k = kernels::active();
    k.eval_terms(table_, slots_.data(), term_values_.data());
    kernels::reduce_rows(table_, term_values_.data(), dy);
  }

 private:
  struct Placeholder {
    std::string name;
    std::function<double(std::span<const double>)> fn;
    std::vector<Location> args;
  };

  std::size_t n_;
  kernels::TermTable table_;
  std::vector<double> slots_;
  std::vector<double> term_values_;
  std::vector<Placeholder> placeholders_;
  std::vector<double> args_;
};

// Dormand-Prince 5(4) tableau and Hairer's dense-output coefficients.
constexpr std::array<double, 1> a2{1.0 / 5};
constexpr std::array<double, 2> a3{3.0 / 40, 9.0 / 40};
constexpr std::array<double, 3> a4{44.0 / 45, -56.0 / 15, 32.0 / 9};
constexpr std::array<double, 4> a5{19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729};
constexpr std::array<double, 5> a6{9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656};
constexpr std::array<double, 5> b7{35.0 / 384, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84};  // k1,k3..k6
constexpr std::array<double, 6> e7{71.0 / 57600, -71.0 / 16695, 71.0 / 1920, -17253.0 / 339200, 22.0 / 525,
                                   -1.0 / 40};  // k1,k3..k7
constexpr std::array<double, 6> d7{-12715105075.0 / 11282082432.0, 87487479700.0 / 32700410799.0,
                                   -10690763975.0 / 1880347072.0,  701980252875.0 / 199316789632.0,
                                   -1453857185.0 / 822651844.0,    69997945.0 / 29380423.0};  // k1,k3..k7

class Integrator {
 public:
  Integrator(const Model& model, const SimParams& params, const EventSchedule& events,
             const PlaceholderImpls& impls)
      : model_(model), params_(params), impls_(impls), n_(model.names.size()), traj_(model.names) {
    if (!(params.t_end > 0.0) || !std::isfinite(params.t_end)) throw SimulationError("t_end must be positive");
    if (params.sample_points < 1) throw SimulationError("sample_points must be at least 1");
    if (!(params.rel_tol > 0.0) || !(params.abs_tol >= 0.0)) throw SimulationError("rel_tol must be positive and abs_tol nonnegative");
    if (params.max_step && !(*params.max_step > 0.0)) throw SimulationError("max_step must be positive");
    events_ = events;
    std::stable_sort(events_.begin(), events_.end(), [](const Event& a, const Event& b) { return a.time < b.time; });
    for (const auto& e : events_)
      if (!(e.time >= 0.0) || !std::isfinite(e.time)) throw SimulationError("event times must be finite and >= 0");
    for (auto& k : k_) k.resize(n_);
    y_ = model.initial;
    y_new_.resize(n_);
    stage_.resize(n_);
    err_.resize(n_);
    zeros_.assign(n_, 0.0);
    for (auto& r : rcont_) r.resize(n_);
  }

  Trajectory run() {
    const int N = params_.sample_points;
    std::size_t next_event = 0;
    std::size_t next_sample = 0;
    double t = 0.0;
    rebuild();

    auto sample_time = [&](std::size_t i) {
      return i == static_cast<std::size_t>(N) ? params_.t_end : params_.t_end * static_cast<double>(i) / N;
    };

    for (;;) {
      // Apply every event due now, then emit samples at this instant.
      bool applied = false;
      while (next_event < events_.size() && events_[next_event].time <= t) {
        apply(events_[next_event]);
        applied = true;
        ++next_event;
      }
      if (applied) {
        rebuild();
        if (next_sample <= static_cast<std::size_t>(N)) traj_.mark_event(next_sample);
      }
      check_state(t);
      while (next_sample <= static_cast<std::size_t>(N) && sample_time(next_sample) <= t) {
        traj_.append(sample_time(next_sample), y_.data());
        ++next_sample;
      }
      if (t >= params_.t_end) break;

      const double t_stop = next_event < events_.size() ? std::min(events_[next_event].time, params_.t_end)
                                                        : params_.t_end;
      epoch(t, t_stop, next_sample, sample_time);
      t = t_stop;
    }
    return std::move(traj_);
  }

 private:
  void rebuild() {
    program_ = std::make_unique<Program>(model_, model_.build_rhs(bias_), impls_);
  }

  const Location& locate(const std::string& v) const {
    auto it = model_.locations.find(v);
    if (it == model_.locations.end()) throw SimulationError("event refers to unknown variable '" + v + "'");
    return it->second;
  }

  void apply(const Event& e) {
    std::visit(
        [&](const auto& a) {
          using A = std::decay_t<decltype(a)>;
          const Location& loc = locate(a.variable);
          if constexpr (std::is_same_v<A, SetRatio>) {
            if (!(a.bottom > 0.0) || !(a.top >= 0.0))
              throw SimulationError("set event for '" + a.variable + "' needs top >= 0 and bottom > 0");
            if (loc.is_ratio()) {
              y_[loc.top] = a.top;
              y_[loc.bottom] = a.bottom;
            } else {
              y_[loc.direct] = a.top / a.bottom;
            }
          } else if constexpr (std::is_same_v<A, SetDirect>) {
            if (!(a.value >= 0.0)) throw SimulationError("set event for '" + a.variable + "' needs a value >= 0");
            if (loc.is_ratio()) {
              y_[loc.top] = a.value;
              y_[loc.bottom] = 1.0;
            } else {
              y_[loc.direct] = a.value;
            }
          } else {
            if (a.constant.is_zero())
              bias_.erase(a.variable);
            else
              bias_[a.variable] = a.constant;
          }
        },
        e.action);
  }

  void check_state(double t) {
    for (std::size_t i = 0; i < n_; ++i)
      if (!std::isfinite(y_[i]))
        throw BlowUpError("state of '" + model_.names[i] + "' is not finite at t = " + std::to_string(t), t, traj_);
  }

  void f(const double* y, double* dy) { (*program_)(y, dy); }

  double initial_step(double t, double t_stop) {
    // Hairer's starting-step heuristic.
    const double span = t_stop - t;
    double dnf = 0.0, dny = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      const double sk = params_.abs_tol + params_.rel_tol * std::fabs(y_[i]);
      dnf += (k_[0][i] / sk) * (k_[0][i] / sk);
      dny += (y_[i] / sk) * (y_[i] / sk);
    }
    double h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : 0.01 * std::sqrt(dny / dnf);
    h = std::min(h, max_step(span));
    for (std::size_t i = 0; i < n_; ++i) stage_[i] = y_[i] + h * k_[0][i];
    f(stage_.data(), k_[1].data());
    double der2 = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      const double sk = params_.abs_tol + params_.rel_tol * std::fabs(y_[i]);
      der2 += ((k_[1][i] - k_[0][i]) / sk) * ((k_[1][i] - k_[0][i]) / sk);
    }
    der2 = std::sqrt(der2) / h;
    const double der12 = std::max(std::fabs(der2), std::sqrt(dnf));
    const double h1 = der12 <= 1e-15 ? std::max(1e-6, h * 1e-3) : std::pow(0.01 / der12, 0.2);
    h = std::min({100.0 * h, h1, max_step(span)});
    if (!std::isfinite(h) || h <= 0.0) h = std::min(1e-6, span);
    return h;
  }

  [[nodiscard]] double max_step(double span) const {
    return params_.max_step ? std::min(*params_.max_step, span) : span;
  }

  template <class SampleTime>
  void epoch(double t, double t_stop, std::size_t& next_sample, const SampleTime& sample_time) {
    const auto& kern = kernels::active();
    const std::size_t N = static_cast<std::size_t>(params_.sample_points);
    f(y_.data(), k_[0].data());
    double h = initial_step(t, t_stop);
    double facold = 1e-4;
    bool last_rejected = false;
    constexpr double beta = 0.04, expo1 = 0.2 - beta * 0.75, safe = 0.9, facc1 = 5.0, facc2 = 0.1;
    std::size_t steps = 0;

    while (t < t_stop) {
      if (++steps > 50'000'000) throw BlowUpError("step limit exceeded", t, traj_);
      bool last = false;
      if (t + h >= t_stop || t + 1.01 * h >= t_stop) {
        h = t_stop - t;
        last = true;
      }
      const double* const ks[7] = {k_[0].data(), k_[1].data(), k_[2].data(), k_[3].data(),
                                   k_[4].data(), k_[5].data(), k_[6].data()};
      kern.combine(n_, y_.data(), h, a2, ks, stage_.data());
      f(stage_.data(), k_[1].data());
      kern.combine(n_, y_.data(), h, a3, ks, stage_.data());
      f(stage_.data(), k_[2].data());
      kern.combine(n_, y_.data(), h, a4, ks, stage_.data());
      f(stage_.data(), k_[3].data());
      kern.combine(n_, y_.data(), h, a5, ks, stage_.data());
      f(stage_.data(), k_[4].data());
      kern.combine(n_, y_.data(), h, a6, ks, stage_.data());
      f(stage_.data(), k_[5].data());
      const double* const k_sol[5] = {ks[0], ks[2], ks[3], ks[4], ks[5]};
      kern.combine(n_, y_.data(), h, b7, k_sol, y_new_.data());
      f(y_new_.data(), k_[6].data());
      const double* const k_err[6] = {ks[0], ks[2], ks[3], ks[4], ks[5], ks[6]};
      kern.combine(n_, zeros_.data(), h, e7, k_err, err_.data());
      const double err = kern.error_norm(n_, err_.data(), y_.data(), y_new_.data(), params_.abs_tol, params_.rel_tol);

      if (!std::isfinite(err) || !all_finite(y_new_)) {
        h *= 0.2;
        last_rejected = true;
        if (h < min_step(t)) throw BlowUpError(blowup_message(t), t, traj_);
        continue;
      }

      const double fac11 = std::pow(err, expo1);
      double fac = fac11 / std::pow(facold, beta);
      fac = std::max(facc2, std::min(facc1, fac / safe));
      double h_new = h / fac;

      if (err <= 1.0) {
        facold = std::max(err, 1e-4);
        // Dense output coefficients for (t, t + h].
        const double* const k_dense[6] = {ks[0], ks[2], ks[3], ks[4], ks[5], ks[6]};
        kern.combine(n_, zeros_.data(), h, d7, k_dense, rcont_[4].data());
        for (std::size_t i = 0; i < n_; ++i) {
          const double ydiff = y_new_[i] - y_[i];
          const double bspl = h * k_[0][i] - ydiff;
          rcont_[0][i] = y_[i];
          rcont_[1][i] = ydiff;
          rcont_[2][i] = bspl;
          rcont_[3][i] = ydiff - h * k_[6][i] - bspl;
        }
        const double t_next = last ? t_stop : t + h;
        while (next_sample <= N && sample_time(next_sample) < t_stop && sample_time(next_sample) <= t_next) {
          const double theta = (sample_time(next_sample) - t) / h;
          const double theta1 = 1.0 - theta;
          for (std::size_t i = 0; i < n_; ++i)
            stage_[i] = rcont_[0][i] +
                        theta * (rcont_[1][i] +
                                 theta1 * (rcont_[2][i] + theta * (rcont_[3][i] + theta1 * rcont_[4][i])));
          traj_.append(sample_time(next_sample), stage_.data());
          ++next_sample;
        }
        std::swap(y_, y_new_);
        std::swap(k_[0], k_[6]);
        t = t_next;
        if (last_rejected) h_new = std::min(h_new, h);
        last_rejected = false;
        h = std::min(h_new, max_step(t_stop - t));
        if (t < t_stop && h < min_step(t)) throw BlowUpError(blowup_message(t), t, traj_);
      } else {
        h = h / std::min(facc1, fac11 / safe);
        last_rejected = true;
        if (h < min_step(t)) throw BlowUpError(blowup_message(t), t, traj_);
      }
    }
  }

  static double min_step(double t) { return 1e-13 * std::max(1.0, std::fabs(t)); }

  std::string blowup_message(double t) const {
    std::ostringstream os;
    os.precision(17);
    os << "integration failed (step size underflow or non-finite state); last finite time t = " << t;
    return os.str();
  }

  static bool all_finite(const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
  }

  const Model& model_;
  const SimParams& params_;
  const PlaceholderImpls& impls_;
  std::size_t n_;
  Trajectory traj_;
  EventSchedule events_;
  std::map<std::string, Rational> bias_;
  std::unique_ptr<Program> program_;
  std::vector<double> y_, y_new_, stage_, err_, zeros_;
  std::array<std::vector<double>, 7> k_;
  std::array<std::vector<double>, 5> rcont_;
};

Model model_for(const ODESystem& sys) {
  sys.check_closed();
  Model m;
  m.names = sys.variables();
  for (std::size_t i = 0; i < m.names.size(); ++i) {
    m.initial.push_back(sys.initial(m.names[i]).to_double());
    m.locations[m.names[i]].direct = static_cast<int>(i);
  }
  m.placeholders.assign(sys.placeholders().begin(), sys.placeholders().end());
  m.build_rhs = [&sys](const std::map<std::string, Rational>& bias) {
    std::vector<LaurentPolynomial> rhs;
    for (const auto& v : sys.variables()) {
      LaurentPolynomial r = sys.rhs(v);
      if (auto it = bias.find(v); it != bias.end()) r += LaurentPolynomial(it->second);
      rhs.push_back(std::move(r));
    }
    return rhs;
  };
  return m;
}

Model model_for(const TNSystem& tn) {
  tn.base.check_closed();
  Model m;
  m.names = tn.base.variables();
  auto index = [&](const std::string& s) {
    return static_cast<int>(std::find(m.names.begin(), m.names.end(), s) - m.names.begin());
  };
  for (std::size_t i = 0; i < m.names.size(); ++i) m.initial.push_back(tn.base.initial(m.names[i]).to_double());
  for (const auto& v : tn.source.variables()) {
    Location loc;
    if (const RatioPair* p = tn.pair_of(v)) {
      loc.top = index(p->top);
      loc.bottom = index(p->bottom);
    } else if (tn.base.has_variable(v)) {
      loc.direct = index(v);
    } else {
      continue;
    }
    m.locations[v] = loc;
  }
  // Factors can also be addressed directly by events.
  for (std::size_t i = 0; i < m.names.size(); ++i) m.locations.try_emplace(m.names[i], Location{static_cast<int>(i)});
  m.placeholders.assign(tn.base.placeholders().begin(), tn.base.placeholders().end());
  m.build_rhs = [&tn](const std::map<std::string, Rational>& bias) {
    ODESystem base = tn.base;
    const Bindings bindings = tn.ratio_bindings();
    for (const auto& [v, c] : bias) {
      if (!tn.source.has_variable(v)) throw SimulationError("bias on unknown source variable '" + v + "'");
      const LaurentPolynomial biased = tn.source.rhs(v) + LaurentPolynomial(c);
      if (const RatioPair* p = tn.pair_of(v)) {
        auto [top, bottom] = compile_ratio_rhs(biased, *p, bindings, tn.gamma, tn.beta, tn.mode);
        base.set_rhs(p->top, std::move(top));
        base.set_rhs(p->bottom, std::move(bottom));
      } else {
        base.set_rhs(v, biased.substitute(bindings));
      }
    }
    std::vector<LaurentPolynomial> rhs;
    for (const auto& w : base.variables()) rhs.push_back(base.rhs(w));
    return rhs;
  };
  return m;
}

}  // namespace

Trajectory integrate(const ODESystem& sys, const SimParams& params, const EventSchedule& events,
                     const PlaceholderImpls& placeholders) {
  const Model model = model_for(sys);
  return Integrator(model, params, events, placeholders).run();
}

Trajectory integrate(const TNSystem& tn, const SimParams& params, const EventSchedule& events,
                     const PlaceholderImpls& placeholders) {
  const Model model = model_for(tn);
  return Integrator(model, params, events, placeholders).run();
}

}  // namespace tnc
