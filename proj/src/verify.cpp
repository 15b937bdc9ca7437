#include "tnc/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

namespace tnc {

std::map<std::string, IdentityResult> symbolic_ratio_identity(const ODESystem& sys, const TNSystem& tn) {
  std::map<std::string, IdentityResult> out;
  const Bindings bindings = tn.ratio_bindings();
  for (const auto& [v, pair] : tn.pairing) {
    if (!sys.has_variable(v)) throw VerifyError("pairing names '" + v + "', which the source does not define");
    if (!tn.base.has_variable(pair.top) || !tn.base.has_variable(pair.bottom))
      throw VerifyError("pairing for '" + v + "' names factors missing from the network");
    const auto top = LaurentPolynomial::symbol(pair.top);
    const auto bottom = LaurentPolynomial::symbol(pair.bottom);
    // d(v_T/v_B)/dt by the quotient rule.
    const LaurentPolynomial quotient =
        (tn.base.rhs(pair.top) * bottom - top * tn.base.rhs(pair.bottom)) * LaurentPolynomial::symbol(pair.bottom, -2);
    IdentityResult r;
    r.residual = quotient - sys.rhs(v).substitute(bindings);
    r.pass = r.residual.is_zero();
    out.emplace(v, std::move(r));
  }
  for (const auto& v : sys.variables()) {
    if (tn.pair_of(v) || !tn.base.has_variable(v)) continue;
    IdentityResult r;
    r.residual = tn.base.rhs(v) - sys.rhs(v).substitute(bindings);
    r.pass = r.residual.is_zero();
    out.emplace(v, std::move(r));
  }
  return out;
}

RatioErrorResult ratio_error(const Trajectory& orig, const Trajectory& tn,
                             const std::vector<std::pair<std::string, RatioPair>>& pairing,
                             const std::vector<std::string>& direct) {
  if (orig.size() != tn.size()) throw VerifyError("trajectories are not on a shared sample grid");
  for (std::size_t i = 0; i < orig.size(); ++i)
    if (orig.times()[i] != tn.times()[i]) throw VerifyError("trajectories are not on a shared sample grid");

  RatioErrorResult out;
  for (const auto& [v, pair] : pairing) {
    const auto& x = orig.column(v);
    const auto& top = tn.column(pair.top);
    const auto& bottom = tn.column(pair.bottom);
    double worst = 0.0;
    bool bad_bottom = false;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (!(bottom[i] > 0.0)) {
        bad_bottom = true;
        continue;
      }
      worst = std::max(worst, std::fabs(x[i] - top[i] / bottom[i]));
    }
    if (bad_bottom) {
      out.nonpositive_bottoms.push_back(v);
      worst = std::numeric_limits<double>::infinity();
    }
    out.max_error[v] = worst;
  }
  for (const auto& v : direct) {
    const auto& a = orig.column(v);
    const auto& b = tn.column(v);
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::fabs(a[i] - b[i]));
    out.max_error[v] = worst;
  }
  return out;
}

std::map<std::string, BookendPair> bookend_check(const Trajectory& tn_traj, const TNSystem& tn,
                                                 const BookendOptions& options) {
  std::map<std::string, BookendPair> out;
  const double barrier = tn.beta.to_double() / tn.gamma.to_double();
  for (const auto& [v, pair] : tn.pairing) {
    const auto& top = tn_traj.column(pair.top);
    const auto& bottom = tn_traj.column(pair.bottom);
    BookendPair b;
    b.bottom_min = std::numeric_limits<double>::infinity();
    b.bottom_max = -std::numeric_limits<double>::infinity();
    b.top_max = -std::numeric_limits<double>::infinity();
    bool finite = true;
    for (std::size_t i = 0; i < bottom.size(); ++i) {
      finite = finite && std::isfinite(bottom[i]) && std::isfinite(top[i]);
      b.bottom_min = std::min(b.bottom_min, bottom[i]);
      b.bottom_max = std::max(b.bottom_max, bottom[i]);
      b.top_max = std::max(b.top_max, top[i]);
    }
    const double start = bottom.empty() ? tn.base.initial(pair.bottom).to_double() : bottom.front();
    b.floor = std::min(start, barrier) - options.tolerance;
    b.pass = finite && b.bottom_min >= b.floor;
    if (options.bottom_ceiling && b.bottom_max > *options.bottom_ceiling) b.pass = false;
    out.emplace(v, b);
  }
  return out;
}

double conservation_check(const Trajectory& traj, const std::map<std::string, Rational>& weights,
                          const Rational& expected) {
  std::vector<std::pair<double, const std::vector<double>*>> cols;
  for (const auto& [v, w] : weights) cols.emplace_back(w.to_double(), &traj.column(v));
  const double target = expected.to_double();
  double worst = traj.size() == 0 ? std::fabs(target) : 0.0;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    double sum = 0.0;
    for (const auto& [w, col] : cols) sum += w * (*col)[i];
    worst = std::max(worst, std::fabs(sum - target));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Report

bool VerificationReport::symbolic_pass() const {
  return std::all_of(symbolic.begin(), symbolic.end(), [](const auto& kv) { return kv.second.pass; });
}

bool VerificationReport::ratio_pass() const {
  return nonpositive_bottoms.empty() &&
         std::all_of(max_ratio_error.begin(), max_ratio_error.end(),
                     [&](const auto& kv) { return kv.second <= thresholds.max_ratio_error; });
}

bool VerificationReport::bookend_pass() const {
  return std::all_of(bookends.begin(), bookends.end(), [](const auto& kv) { return kv.second.pass; });
}

bool VerificationReport::conservation_pass() const {
  for (const auto& [name, r] : conservation)
    if (!(r <= conservation_limits.at(name))) return false;
  return true;
}

bool VerificationReport::verdict() const {
  return symbolic_pass() && ratio_pass() && bookend_pass() && conservation_pass();
}

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

const char* pass_fail(bool ok) { return ok ? "pass" : "fail"; }

}  // namespace

void VerificationReport::write(std::ostream& os) const {
  os << "t_end=" << num(t_end) << '\n';
  os << "threshold.max_ratio_error=" << num(thresholds.max_ratio_error) << '\n';
  if (thresholds.ratio_horizon) os << "threshold.ratio_horizon=" << num(*thresholds.ratio_horizon) << '\n';
  os << "threshold.bottom_tolerance=" << num(thresholds.bookend.tolerance) << '\n';
  for (const auto& [v, r] : symbolic) {
    os << "symbolic." << v << '=' << pass_fail(r.pass) << '\n';
    if (!r.pass) os << "symbolic." << v << ".residual=" << r.residual.to_string() << '\n';
  }
  for (const auto& [v, e] : max_ratio_error) os << "ratio_error." << v << '=' << num(e) << '\n';
  for (const auto& v : nonpositive_bottoms) os << "ratio_error." << v << ".nonpositive_bottom=1\n";
  for (const auto& [v, b] : bookends) {
    os << "bottom_min." << v << '=' << num(b.bottom_min) << '\n';
    os << "bottom_max." << v << '=' << num(b.bottom_max) << '\n';
    os << "top_max." << v << '=' << num(b.top_max) << '\n';
    os << "bookend." << v << '=' << pass_fail(b.pass) << '\n';
  }
  for (const auto& [name, r] : conservation) os << "conservation." << name << '=' << num(r) << '\n';
  os << "check.symbolic=" << pass_fail(symbolic_pass()) << '\n';
  os << "check.ratio_error=" << pass_fail(ratio_pass()) << '\n';
  os << "check.bookend=" << pass_fail(bookend_pass()) << '\n';
  os << "check.conservation=" << pass_fail(conservation_pass()) << '\n';
  os << "verdict=" << pass_fail(verdict()) << '\n';
}

namespace {

Trajectory truncate(const Trajectory& traj, double horizon) {
  Trajectory out(traj.names());
  std::vector<double> row(traj.names().size());
  for (std::size_t i = 0; i < traj.size() && traj.times()[i] <= horizon; ++i) {
    for (std::size_t j = 0; j < row.size(); ++j) row[j] = traj.column(traj.names()[j])[i];
    out.append(traj.times()[i], row.data());
  }
  return out;
}

}  // namespace

VerificationReport verify(const TNSystem& tn, const SimParams& params, const EventSchedule& events,
                          const PlaceholderImpls& placeholders, const VerifyThresholds& thresholds,
                          const std::vector<ConservationLaw>& laws) {
  VerificationReport report;
  report.thresholds = thresholds;
  report.t_end = params.t_end;
  report.symbolic = symbolic_ratio_identity(tn.source, tn);

  const Trajectory orig = integrate(tn.source, params, events, placeholders);
  const Trajectory compiled = integrate(tn, params, events, placeholders);

  std::vector<std::string> direct;
  for (const auto& v : tn.source.variables())
    if (!tn.pair_of(v) && tn.base.has_variable(v)) direct.push_back(v);

  RatioErrorResult errors;
  if (thresholds.ratio_horizon)
    errors = ratio_error(truncate(orig, *thresholds.ratio_horizon), truncate(compiled, *thresholds.ratio_horizon),
                         tn.pairing, direct);
  else
    errors = ratio_error(orig, compiled, tn.pairing, direct);
  report.max_ratio_error = std::move(errors.max_error);
  report.nonpositive_bottoms = std::move(errors.nonpositive_bottoms);
  report.bookends = bookend_check(compiled, tn, thresholds.bookend);

  // Conservation is checked on the source run and on the ratios of the compiled run.
  Trajectory ratios = compiled;
  for (const auto& [v, pair] : tn.pairing) {
    std::vector<double> col(compiled.size());
    for (std::size_t i = 0; i < col.size(); ++i) col[i] = compiled.value(pair.top, i) / compiled.value(pair.bottom, i);
    ratios.add_column(v, std::move(col));
  }
  for (const auto& law : laws) {
    report.conservation[law.name + ".source"] = conservation_check(orig, law.weights, law.expected);
    report.conservation[law.name + ".compiled"] = conservation_check(ratios, law.weights, law.expected);
    report.conservation_limits[law.name + ".source"] = law.tolerance;
    report.conservation_limits[law.name + ".compiled"] = law.tolerance;
  }
  return report;
}

}  // namespace tnc
