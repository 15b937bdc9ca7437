#include "tnc/transform.hpp"

#include <algorithm>
#include <cmath>

#include "tnc/sim.hpp"

namespace tnc {

RatioPair ratio_symbols(const std::string& v) { return {v + "_T", v + "_B"}; }

const RatioPair* TNSystem::pair_of(std::string_view v) const {
  for (const auto& [name, pair] : pairing)
    if (name == v) return &pair;
  return nullptr;
}

Bindings TNSystem::ratio_bindings() const {
  Bindings b;
  for (const auto& [v, pair] : pairing)
    b.emplace(v, LaurentPolynomial::symbol(pair.top) * LaurentPolynomial::symbol(pair.bottom, -1));
  return b;
}

std::pair<LaurentPolynomial, LaurentPolynomial> compile_ratio_rhs(const LaurentPolynomial& rhs,
                                                                  const RatioPair& pair,
                                                                  const Bindings& ratio_bindings,
                                                                  const Rational& gamma, const Rational& beta,
                                                                  Mode mode) {
  const auto [plus, minus] = rhs.split_signs();
  const LaurentPolynomial p = plus.substitute(ratio_bindings);
  const LaurentPolynomial m = minus.substitute(ratio_bindings);
  const auto top = LaurentPolynomial::symbol(pair.top);
  const auto bottom = LaurentPolynomial::symbol(pair.bottom);

  // Canonical products cancel v_T against v_T^-1, so a Hungarian variable leaves no
  // v_T in any denominator of the bottom ODE.
  LaurentPolynomial top_rhs = p * bottom - LaurentPolynomial(gamma) * top;
  LaurentPolynomial bottom_rhs =
      m * LaurentPolynomial(Monomial({{pair.bottom, 2}, {pair.top, -1}})) - LaurentPolynomial(gamma) * bottom;
  if (mode == Mode::Stable) {
    top_rhs += LaurentPolynomial(beta) * top * LaurentPolynomial::symbol(pair.bottom, -1);
    bottom_rhs += LaurentPolynomial(beta);
  }
  return {std::move(top_rhs), std::move(bottom_rhs)};
}

namespace {

std::string describe(const TNOffense& o) {
  return "'" + o.variable + "' has non-decay term " + (LaurentPolynomial(o.monomial, o.coefficient)).to_string();
}

void check_placeholders(const ODESystem& base) {
  for (const auto& w : base.variables())
    for (const auto& [m, c] : base.rhs(w).terms())
      for (const auto& [name, e] : m.factors())
        if (base.is_placeholder(name) && e != 1)
          throw CompileError("placeholder '" + name + "' appears with exponent " + std::to_string(e) +
                             " in the compiled ODE for '" + w + "'; placeholders may only appear linearly");
}

}  // namespace

TNSystem compile(const ODESystem& sys, const Rational& gamma, const Rational& beta, Mode mode,
                 const std::map<std::string, Rational>& denominator_scale) {
  if (gamma.sign() <= 0) throw CompileError("gamma must be positive, got " + gamma.to_string());
  if (beta.sign() <= 0) throw CompileError("beta must be positive, got " + beta.to_string());
  sys.check_closed();

  TNSystem tn;
  tn.source = sys;
  tn.gamma = gamma;
  tn.beta = beta;
  tn.mode = mode;

  std::set<std::string, std::less<>> taken(sys.placeholders().begin(), sys.placeholders().end());
  taken.insert(sys.variables().begin(), sys.variables().end());
  for (const auto& v : sys.variables()) {
    if (sys.representation(v) != Representation::Ratio) continue;
    RatioPair pair = ratio_symbols(v);
    for (const auto& s : {pair.top, pair.bottom})
      if (taken.contains(s)) throw CompileError("factor name '" + s + "' for '" + v + "' collides with an existing symbol");
    taken.insert(pair.top);
    taken.insert(pair.bottom);
    tn.pairing.emplace_back(v, std::move(pair));
  }
  for (const auto& [v, scale] : denominator_scale)
    if (!tn.pair_of(v)) throw CompileError("denominator scale given for non-ratio variable '" + v + "'");

  const Bindings bindings = tn.ratio_bindings();
  for (const auto& p : sys.placeholders()) tn.base.add_placeholder(p);

  for (const auto& v : sys.variables()) {
    if (const RatioPair* pair = tn.pair_of(v)) {
      const bool hungarian = hungarian_quotient(sys, v).has_value();
      tn.hungarian[v] = hungarian;
      if (!hungarian && sys.initial(v).is_zero())
        throw CompileError("'" + v + "' is not in Hungarian form and starts at 0: its bottom factor ODE divides by " +
                           pair->top);
      Rational scale(1);
      if (auto it = denominator_scale.find(v); it != denominator_scale.end()) scale = it->second;
      if (scale.sign() <= 0) throw CompileError("denominator scale for '" + v + "' must be positive");
      auto [top_rhs, bottom_rhs] = compile_ratio_rhs(sys.rhs(v), *pair, bindings, gamma, beta, mode);
      tn.base.add_variable(pair->top, std::move(top_rhs), sys.initial(v) * scale, Representation::Direct);
      tn.base.add_variable(pair->bottom, std::move(bottom_rhs), scale, Representation::Direct);
    } else {
      tn.base.add_variable(v, sys.rhs(v).substitute(bindings), sys.initial(v), Representation::Direct);
    }
  }

  const TNValidation report = validate_tn(tn.base, gamma);
  if (!report.valid()) {
    std::string msg = "result is not a transcriptional network with gamma = " + gamma.to_string() + ":";
    for (const auto& o : report.offenses) msg += "\n  " + describe(o);
    throw CompileError(msg);
  }
  check_placeholders(tn.base);
  return tn;
}

TNValidation validate_tn(const ODESystem& sys, const Rational& gamma) {
  TNValidation report;
  for (const auto& w : sys.variables()) {
    const LaurentPolynomial production = sys.rhs(w) + LaurentPolynomial(gamma) * LaurentPolynomial::symbol(w);
    for (const auto& [m, c] : production.terms())
      if (c.sign() < 0) report.offenses.push_back({w, m, c});
  }
  return report;
}

Rational estimate_gamma(const ODESystem& sys, double t_end, double margin, const EventSchedule& events,
                        const PlaceholderImpls& placeholders) {
  if (!(margin >= 1.0)) throw std::invalid_argument("gamma margin must be >= 1");
  SimParams params;
  params.t_end = t_end;
  params.sample_points = 5000;
  const Trajectory traj = integrate(sys, params, events, placeholders);

  struct Quotient {
    std::string v;
    LaurentPolynomial numerator;
    bool divide_by_v;
  };
  std::vector<Quotient> quotients;
  for (const auto& v : sys.variables()) {
    if (sys.representation(v) != Representation::Ratio) continue;
    if (auto q = hungarian_quotient(sys, v))
      quotients.push_back({v, *q, false});
    else
      quotients.push_back({v, sys.rhs(v).split_signs().second, true});
  }

  double sup = 0.0;
  Point point;
  std::vector<double> args;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    for (const auto& v : sys.variables()) point[v] = traj.value(v, i);
    for (const auto& [name, impl] : placeholders) {
      args.clear();
      for (const auto& a : impl.arguments) args.push_back(point.at(a));
      point[name] = impl.fn(args);
    }
    for (const auto& q : quotients) {
      double value = q.numerator.evaluate(point);
      if (q.divide_by_v) {
        if (q.numerator.is_zero()) continue;
        const double x = point.at(q.v);
        if (!(x > 0.0))
          throw std::runtime_error("cannot estimate gamma: non-Hungarian variable '" + q.v + "' reaches " +
                                   std::to_string(x) + " at t = " + std::to_string(traj.times()[i]));
        value /= x;
      }
      sup = std::max(sup, value);
    }
  }
  // A system with no negative terms at all admits any gamma; use 1.
  if (sup == 0.0) return Rational::ceil_decimal(margin, 3);
  return Rational::ceil_decimal(margin * sup, 3);
}

TNSystem add_tracker(const TNSystem& tn, const std::string& name,
                     const std::vector<std::pair<Rational, std::string>>& target, const Rational& gamma_track,
                     const Rational& initial) {
  if (gamma_track.sign() <= 0) throw CompileError("tracking rate must be positive");
  if (tn.base.has_variable(name) || tn.base.is_placeholder(name) || tn.source.has_variable(name) ||
      tn.source.is_placeholder(name))
    throw CompileError("tracker name '" + name + "' is already in use");

  LaurentPolynomial source_target;
  LaurentPolynomial compiled_target;
  for (const auto& [c, v] : target) {
    if (c.sign() <= 0)
      throw CompileError("tracker coefficient " + c.to_string() + " for '" + v +
                         "' is not positive; the production term would leave transcriptional-network form");
    const RatioPair* pair = tn.pair_of(v);
    if (!pair) throw CompileError("tracker target '" + v + "' is not a ratio variable");
    source_target += LaurentPolynomial(c) * LaurentPolynomial::symbol(v);
    compiled_target += LaurentPolynomial(Monomial({{pair->top, 1}, {pair->bottom, -1}}), c);
  }

  const LaurentPolynomial self = LaurentPolynomial::symbol(name);
  TNSystem out = tn;
  out.source.add_variable(name, LaurentPolynomial(gamma_track) * (source_target - self), initial,
                          Representation::Direct);
  out.base.add_variable(name, LaurentPolynomial(gamma_track) * (compiled_target - self), initial,
                        Representation::Direct);
  const TNValidation report = validate_tn(out.base, out.gamma);
  if (!report.valid())
    throw CompileError("tracker '" + name + "' with rate " + gamma_track.to_string() +
                       " breaks transcriptional-network form for gamma = " + out.gamma.to_string());
  return out;
}

}  // namespace tnc
