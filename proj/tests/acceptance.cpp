// Acceptance checks. Prints one PASS/FAIL line per criterion; `acceptance N` runs only N.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "tnc/driver.hpp"
#include "tnc/parse.hpp"
#include "tnc/verify.hpp"

using namespace tnc;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

/// Sample index with time closest to t.
std::size_t at(const Trajectory& tr, double t) {
  const auto& ts = tr.times();
  auto it = std::lower_bound(ts.begin(), ts.end(), t - 1e-12);
  if (it == ts.end()) return ts.size() - 1;
  return static_cast<std::size_t>(it - ts.begin());
}

double ratio(const Trajectory& tr, const TNSystem& tn, const std::string& v, std::size_t i) {
  const RatioPair* p = tn.pair_of(v);
  return tr.value(p->top, i) / tr.value(p->bottom, i);
}

// 1 -------------------------------------------------------------------------

Outcome sine_cosine_symbolic() {
  const SystemFile file = load_corpus("sine_cosine.tn");
  const TNSystem tn = compile(file.system(), Rational(5, 2), Rational(1));

  ODESystem expected;
  expected.add_variable("x_T", parse_expr("x_T/x_B + x_B*y_T/y_B - 2.5*x_T"), 2, Representation::Direct);
  expected.add_variable("x_B", parse_expr("1 + 2*x_B^2/x_T - 2.5*x_B"), 1, Representation::Direct);
  expected.add_variable("y_T", parse_expr("y_T/y_B + 2*y_B - 2.5*y_T"), 1, Representation::Direct);
  expected.add_variable("y_B", parse_expr("1 + x_T*y_B^2/(x_B*y_T) - 2.5*y_B"), 1, Representation::Direct);

  Outcome o;
  o.pass = tn.base == expected;
  std::ostringstream os;
  if (!o.pass)
    for (const auto& v : tn.base.variables())
      os << v << "' = " << tn.base.rhs(v).to_string() << " [" << tn.base.initial(v).to_string() << "]; ";
  o.detail = o.pass ? "four equations and initials (2,1,1,1) equal exactly" : os.str();
  return o;
}

// 2 -------------------------------------------------------------------------

Outcome sine_cosine_dynamics() {
  const CorpusRun run = corpus_run("sine_cosine.tn");
  const auto err = ratio_error(run.original, run.compiled, run.tn.pairing);
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::size_t i = 0; i < run.compiled.size(); ++i) {
    const double r = ratio(run.compiled, run.tn, "x", i);
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  Outcome o;
  o.pass = err.nonpositive_bottoms.empty() && err.max_error.at("x") <= 1e-6 && err.max_error.at("y") <= 1e-6 &&
           lo >= 1 - 1e-3 && hi <= 3 + 1e-3;
  o.detail = fmt("t_end=%g err x=%.3g y=%.3g, x_T/x_B in [%.6f, %.6f]", run.params.t_end, err.max_error.at("x"),
                 err.max_error.at("y"), lo, hi);
  return o;
}

// 3 -------------------------------------------------------------------------

Outcome gamma_estimate() {
  const SystemFile file = load_corpus("sine_cosine.tn");
  const Rational g = estimate_gamma(file.system(), file.sim_params().t_end, 1.0);
  // Closed form: x = 2 - sin t, y = 2 - cos t; the quotients are 2/x for x and x/y for y.
  double sup = 0.0;
  for (int k = 0; k <= 1'000'000; ++k) {
    const double t = 2 * M_PI * k / 1'000'000;
    sup = std::max({sup, 2 / (2 - std::sin(t)), (2 - std::sin(t)) / (2 - std::cos(t))});
  }
  Outcome o;
  o.pass = std::fabs(g.to_double() - 2.5) <= 0.05;
  o.detail = fmt("estimate=%s, target 2.5 +- 0.05, closed-form supremum of the quotients=%.5f", g.to_string().c_str(),
                 sup);
  return o;
}

// 4 -------------------------------------------------------------------------

Outcome bubble_sort() {
  const CorpusRun run = corpus_run("bubble_sort.tn");
  const std::vector<std::string> xs{"x1", "x2", "x3", "x4"};
  const std::vector<double> sorted{1, 2, 3, 7};
  const std::size_t end = at(run.original, 50.0);
  double worst_orig = 0, worst_comp = 0, cons_orig = 0, cons_comp = 0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    worst_orig = std::max(worst_orig, std::fabs(run.original.value(xs[k], end) - sorted[k]));
    worst_comp = std::max(worst_comp, std::fabs(ratio(run.compiled, run.tn, xs[k], end) - sorted[k]));
  }
  for (std::size_t i = 0; i < run.original.size(); ++i) {
    double so = 0, sc = 0;
    for (const auto& x : xs) {
      so += run.original.value(x, i);
      sc += ratio(run.compiled, run.tn, x, i);
    }
    cons_orig = std::max(cons_orig, std::fabs(so - 13));
    cons_comp = std::max(cons_comp, std::fabs(sc - 13));
  }
  Outcome o;
  o.pass = worst_orig <= 1e-2 && worst_comp <= 1e-2 && cons_orig <= 1e-6 && cons_comp <= 1e-6;
  o.detail = fmt("gamma=%s, |x(50)-(1,2,3,7)| orig=%.4g compiled=%.4g; |sum-13| orig=%.3g compiled=%.3g",
                 run.tn.gamma.to_string().c_str(), worst_orig, worst_comp, cons_orig, cons_comp);
  return o;
}

// 5 -------------------------------------------------------------------------

Outcome schlogl() {
  const CorpusRun run = corpus_run("schlogl.crn");
  const auto y_at = [&](double t) { return ratio(run.compiled, run.tn, "y", at(run.compiled, t)); };
  const double dt = run.params.t_end / run.params.sample_points;
  const double before5 = y_at(5 - dt), high = y_at(10 - dt), remembered = y_at(15 - dt), restored = y_at(25);
  Outcome o;
  o.pass = std::fabs(before5 - 0.1) <= 0.02 && std::fabs(high - 0.984) <= 0.02 &&
           std::fabs(remembered - 0.9) <= 0.02 && std::fabs(restored - 0.1) <= 0.02;
  o.detail = fmt("y before 5=%.4f, at x=0.9=%.4f, after return=%.4f, after low excursion=%.4f (gamma=%s)", before5,
                 high, remembered, restored, run.tn.gamma.to_string().c_str());
  return o;
}

// 6 -------------------------------------------------------------------------

Outcome willamowski_rossler() {
  const SystemFile file = load_corpus("willamowski_rossler.crn");
  const TNSystem tn = compile_file(file).tn;
  const VerificationReport report =
      verify(tn, file.sim_params(), {}, {}, file.verify_thresholds(), file.conservation_laws());
  const RunPair run = run_pair(tn, file.sim_params());
  bool in_range = true;
  double lo = std::numeric_limits<double>::infinity(), hi = 0;
  for (const auto* tr : {&run.original, &run.compiled})
    for (const auto& v : tr->names())
      for (double value : tr->column(v)) {
        lo = std::min(lo, value);
        hi = std::max(hi, value);
        in_range = in_range && value > 0 && value < 1e4;
      }
  double worst = 0;
  for (const auto& [v, e] : report.max_ratio_error) worst = std::max(worst, e);
  Outcome o;
  o.pass = report.ratio_pass() && worst <= 1e-3 && in_range && report.bookend_pass() && report.symbolic_pass();
  o.detail = fmt("gamma=%s, ratio error over [0,1]=%.3g, values over [0,10] in [%.3g, %.3g], bookends %s",
                 tn.gamma.to_string().c_str(), worst, lo, hi, report.bookend_pass() ? "pass" : "fail");
  return o;
}

// 7 -------------------------------------------------------------------------

Outcome pid() {
  const CorpusRun run = corpus_run("pid.tn");
  const std::vector<std::pair<double, double>> windows{{18, 20}, {28, 30}, {38, 50}, {58, 70}};
  double worst = 0;
  std::string per;
  for (const auto& [from, to] : windows) {
    double w = 0;
    for (std::size_t i = 0; i < run.compiled.size(); ++i) {
      const double t = run.compiled.times()[i];
      if (t >= from && t < to) w = std::max(w, std::fabs(ratio(run.compiled, run.tn, "v", i) - 8));
    }
    per += fmt(" [%g,%g):%.3g", from, to, w);
    worst = std::max(worst, w);
  }
  Outcome o;
  o.pass = worst <= 0.05;
  o.detail = "max |v-8| per window" + per + fmt(" (gamma=%s)", run.tn.gamma.to_string().c_str());
  return o;
}

// 8 -------------------------------------------------------------------------

Outcome extremum() {
  SystemFile file = load_corpus("extremum.tn");
  const std::vector<std::pair<double, double>> cases{{2.7, 3.08}, {3.5, 3.08}, {4.5, 5.0}, {5.5, 5.0}, {7.0, 5.0}};
  bool pass = true;
  std::string per;
  for (const auto& [start, target] : cases) {
    for (auto& v : file.vars)
      if (v.name == "z") v.initial = Rational::parse(fmt("%g", start)) - Rational(1, 5);
    const TNSystem tn = compile_file(file).tn;
    const Trajectory tr = integrate(tn, file.sim_params(), {}, file.placeholder_impls());
    // x rides on the dither z + 0.1*p, so judge the average over the last ten time units' worth of cycles.
    double sum = 0;
    int n = 0;
    for (std::size_t i = 0; i < tr.size(); ++i)
      if (tr.times()[i] >= 180) {
        sum += tr.value("x", i);
        ++n;
      }
    const double mean = sum / n;
    pass = pass && std::fabs(mean - target) <= 0.1;
    per += fmt(" %g->%.3f", start, mean);
  }
  Outcome o;
  o.pass = pass;
  o.detail = "mean x over [180,200]:" + per;
  return o;
}

// 9 -------------------------------------------------------------------------

LaurentPolynomial random_rhs(std::mt19937_64& rng, const std::vector<std::string>& vars, const std::string& self) {
  std::uniform_int_distribution<int> n_terms(1, 4), exp(0, 3), num(-3, 3), den(1, 2), pick(0, 3);
  LaurentPolynomial out;
  const int terms = n_terms(rng);
  for (int k = 0; k < terms; ++k) {
    Monomial m;
    int budget = 3;
    for (const auto& v : vars) {
      const int e = std::min(budget, std::uniform_int_distribution<int>(0, budget)(rng));
      budget -= e;
      m = m * Monomial::symbol(v, e);
    }
    int c = num(rng);
    if (c == 0) c = 1;
    out += LaurentPolynomial(m, Rational(c, den(rng)));
  }
  // Damping keeps a useful share of the systems bounded.
  if (pick(rng) != 0) out -= LaurentPolynomial(Monomial::symbol(self, exp(rng) % 3 + 1), Rational(1 + pick(rng)));
  return out;
}

Outcome random_systems() {
  std::mt19937_64 rng(20240917);
  int symbolic_ok = 0, bounded = 0, bounded_ok = 0;
  std::string first_failure;
  SimParams params;
  params.t_end = 5;
  params.sample_points = 500;
  for (int s = 0; s < 200; ++s) {
    const int n = std::uniform_int_distribution<int>(1, 3)(rng);
    std::vector<std::string> vars;
    for (int k = 0; k < n; ++k) vars.push_back("u" + std::to_string(k));
    ODESystem sys;
    for (const auto& v : vars)
      sys.add_variable(v, random_rhs(rng, vars, v), Rational(std::uniform_int_distribution<int>(1, 8)(rng), 4));

    Rational gamma(1);
    bool is_bounded = false;
    try {
      const Trajectory tr = integrate(sys, params);
      is_bounded = true;
      for (const auto& v : vars)
        for (double x : tr.column(v)) is_bounded = is_bounded && x > 0 && x <= 100;
      if (is_bounded) gamma = estimate_gamma(sys, params.t_end);
    } catch (const std::exception&) {
      is_bounded = false;
    }

    const TNSystem tn = compile(sys, gamma);
    const auto identity = symbolic_ratio_identity(sys, tn);
    const bool exact = std::all_of(identity.begin(), identity.end(), [](const auto& kv) { return kv.second.pass; });
    symbolic_ok += exact;
    if (!exact && first_failure.empty()) first_failure = fmt("system %d symbolic", s);
    if (!is_bounded) continue;
    ++bounded;

    VerifyThresholds thresholds;
    thresholds.max_ratio_error = 1e-5;
    const VerificationReport report = verify(tn, params, {}, {}, thresholds);
    const bool ok = report.ratio_pass() && report.bookend_pass();
    bounded_ok += ok;
    if (!ok && first_failure.empty()) {
      double worst = 0;
      for (const auto& [v, e] : report.max_ratio_error) worst = std::max(worst, e);
      first_failure = fmt("system %d ratio error %.3g bookend %s", s, worst, report.bookend_pass() ? "pass" : "fail");
    }
  }
  Outcome o;
  o.pass = symbolic_ok == 200 && bounded_ok == bounded && bounded > 0;
  o.detail = fmt("symbolic identity %d/200; bounded systems %d, co-simulation ok %d", symbolic_ok, bounded, bounded_ok);
  if (!first_failure.empty()) o.detail += "; first failure: " + first_failure;
  return o;
}

// 10 ------------------------------------------------------------------------

Outcome negative_controls() {
  const SystemFile file = load_corpus("sine_cosine.tn");
  const ODESystem sys = file.system();
  SimParams params = file.sim_params();
  params.t_end = 100;
  params.sample_points = 4000;
  // Warmup factors decay toward 1e-40; only relative error control keeps their quotient accurate.
  params.abs_tol = 0;

  const TNSystem warm = compile(sys, Rational(5, 2), Rational(1), Mode::Warmup);
  const VerificationReport report = verify(warm, params);
  double worst = 0, bottom_min = std::numeric_limits<double>::infinity();
  for (const auto& [v, e] : report.max_ratio_error) worst = std::max(worst, e);
  for (const auto& [v, b] : report.bookends) bottom_min = std::min(bottom_min, b.bottom_min);

  TNSystem broken = compile(sys, Rational(5, 2), Rational(1));
  // Drop beta*x_T/x_B from x_T' only.
  const Monomial beta_term = Monomial::symbol("x_T") * Monomial::symbol("x_B", -1);
  LaurentPolynomial xt = broken.base.rhs("x_T");
  xt -= LaurentPolynomial(beta_term, xt.coefficient(beta_term));
  broken.base.set_rhs("x_T", xt);
  const auto identity = symbolic_ratio_identity(sys, broken);
  const IdentityResult& x = identity.at("x");

  Outcome o;
  o.pass = report.ratio_pass() && !report.bookend_pass() && !x.pass && !x.residual.is_zero();
  o.detail = fmt("warmup: ratio error %.3g (%s), min bottom %.3g, bookend %s; beta-deleted residual for x: %s", worst,
                 report.ratio_pass() ? "pass" : "fail", bottom_min, report.bookend_pass() ? "pass" : "fail",
                 x.residual.to_string().c_str());
  return o;
}

// 11 ------------------------------------------------------------------------

Outcome mass_action() {
  const Rational k(3, 7);
  const ODESystem sys = reactions_to_odes({{{{"A", 1}, {"B", 2}}, {{"C", 3}}, k}}, {});
  const LaurentPolynomial rate = LaurentPolynomial(k) * parse_expr("A*B^2");
  const bool exact = sys.rhs("A") == -rate && sys.rhs("B") == LaurentPolynomial(-2) * rate &&
                     sys.rhs("C") == LaurentPolynomial(3) * rate;

  const ODESystem auto_cat = reactions_to_odes(parse_reactions("2X ->{1} 3X"), {{"X", Rational(1)}});
  SimParams params;
  params.t_end = 0.9;
  const Trajectory tr = integrate(auto_cat, params);
  const double x = tr.column("X").back();
  Outcome o;
  o.pass = exact && std::fabs(x - 10.0) <= 1e-4;
  o.detail = fmt("A+2B->3C %s; X(0.9)=%.9f vs 10", exact ? "exact" : "mismatch", x);
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"sine-cosine network equals the printed one", sine_cosine_symbolic},
      {"sine-cosine co-simulation", sine_cosine_dynamics},
      {"gamma estimate on sine-cosine", gamma_estimate},
      {"bubble sort", bubble_sort},
      {"Schlogl memory protocol", schlogl},
      {"Willamowski-Rossler", willamowski_rossler},
      {"PID disturbance recovery", pid},
      {"extremum seeking", extremum},
      {"random systems", random_systems},
      {"negative controls", negative_controls},
      {"mass-action oracle", mass_action},
  };
  const int only = argc > 1 ? std::atoi(argv[1]) : 0;
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (only && only != static_cast<int>(i + 1)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %2zu: %s  %s (%.2fs) %s\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first, secs,
                o.detail.c_str());
    failures += !o.pass;
  }
  return failures ? 1 : 0;
}
