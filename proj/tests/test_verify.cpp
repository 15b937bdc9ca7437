#include <cmath>
#include <limits>
#include <sstream>

#include "doctest.h"
#include "tnc/driver.hpp"
#include "tnc/parse.hpp"

using namespace tnc;

namespace {

ODESystem sine() { return load_corpus("sine_cosine.tn").system(); }

Trajectory table(std::vector<std::string> names, const std::vector<std::vector<double>>& rows) {
  Trajectory tr(std::move(names));
  for (std::size_t i = 0; i < rows.size(); ++i) tr.append(static_cast<double>(i), rows[i].data());
  return tr;
}

}  // namespace

TEST_SUITE("verify") {

TEST_CASE("symbolic identity holds for both modes") {
  for (Mode mode : {Mode::Stable, Mode::Warmup}) {
    const TNSystem tn = compile(sine(), Rational(5, 2), Rational(1), mode);
    const auto r = symbolic_ratio_identity(tn.source, tn);
    REQUIRE(r.size() == 2);
    for (const auto& [v, res] : r) {
      CHECK(res.pass);
      CHECK(res.residual.is_zero());
    }
  }
  const TNSystem bubble = compile_file(load_corpus("bubble_sort.tn")).tn;
  for (const auto& [v, res] : symbolic_ratio_identity(bubble.source, bubble)) CHECK(res.pass);
}

TEST_CASE("dropping a production term leaves a residual") {
  TNSystem tn = compile(sine(), Rational(5, 2));
  tn.base.set_rhs("x_T", tn.base.rhs("x_T") - parse_expr("x_T/x_B"));
  const auto r = symbolic_ratio_identity(tn.source, tn);
  CHECK_FALSE(r.at("x").pass);
  CHECK(r.at("x").residual == parse_expr("-x_B^-1*x_T*x_B^-1"));
  CHECK(r.at("y").pass);

  TNSystem wrong = compile(sine(), Rational(5, 2));
  wrong.pairing.emplace_back("q", RatioPair{"q_T", "q_B"});
  CHECK_THROWS_AS((void)symbolic_ratio_identity(wrong.source, wrong), VerifyError);
}

TEST_CASE("ratio error") {
  const std::vector<std::pair<std::string, RatioPair>> pairing{{"x", {"x_T", "x_B"}}};
  const Trajectory orig = table({"x"}, {{1.0}, {2.0}});
  const Trajectory exact = table({"x_T", "x_B"}, {{2.0, 2.0}, {1.0, 0.5}});
  CHECK(ratio_error(orig, exact, pairing).max_error.at("x") == 0.0);

  const Trajectory off = table({"x_T", "x_B"}, {{2.0, 2.0}, {1.0, 0.4}});
  CHECK(ratio_error(orig, off, pairing).max_error.at("x") == doctest::Approx(0.5));

  const Trajectory neg = table({"x_T", "x_B"}, {{2.0, 2.0}, {1.0, 0.0}});
  const auto bad = ratio_error(orig, neg, pairing);
  CHECK(bad.nonpositive_bottoms == std::vector<std::string>{"x"});
  CHECK(std::isinf(bad.max_error.at("x")));

  const Trajectory shorter = table({"x_T", "x_B"}, {{2.0, 2.0}});
  CHECK_THROWS_AS((void)ratio_error(orig, shorter, pairing), VerifyError);

  const Trajectory direct_orig = table({"x", "d"}, {{1.0, 3.0}, {2.0, 4.0}});
  const Trajectory direct_tn = table({"x_T", "x_B", "d"}, {{1.0, 1.0, 0.0}, {2.0, 1.0, 1.0}});
  CHECK(ratio_error(direct_orig, direct_tn, pairing, {"d"}).max_error.at("d") == 3.0);
}

TEST_CASE("bookends") {
  SimParams p;
  p.t_end = 10;
  p.sample_points = 200;
  const TNSystem stable = compile(sine(), Rational(5, 2));
  for (const auto& [v, b] : bookend_check(integrate(stable, p), stable)) {
    CHECK(b.pass);
    CHECK(b.floor == doctest::Approx(0.4 - 1e-6));
    CHECK(b.bottom_min >= 0.4 - 1e-6);
  }

  const TNSystem warm = compile(sine(), Rational(5, 2), Rational(1), Mode::Warmup);
  p.t_end = 100;
  p.abs_tol = 0.0;
  bool any_fail = false;
  for (const auto& [v, b] : bookend_check(integrate(warm, p), warm)) any_fail = any_fail || !b.pass;
  CHECK(any_fail);

  // A bottom factor started at beta/gamma stays above it.
  const TNSystem at_barrier =
      compile(sine(), Rational(5, 2), Rational(1), Mode::Stable, {{"x", Rational(2, 5)}, {"y", Rational(2, 5)}});
  p.t_end = 25;
  p.abs_tol = 1e-10;
  for (const auto& [v, b] : bookend_check(integrate(at_barrier, p), at_barrier)) CHECK(b.pass);

  double prev = 0.0;
  for (int beta : {1, 2, 4}) {
    const TNSystem tn = compile(sine(), Rational(5, 2), Rational(beta));
    const double m = bookend_check(integrate(tn, p), tn).at("x").bottom_max;
    CHECK(m > prev);
    prev = m;
  }

  BookendOptions ceiling;
  ceiling.bottom_ceiling = 0.5;
  CHECK_FALSE(bookend_check(integrate(stable, p), stable, ceiling).at("x").pass);
}

TEST_CASE("conservation") {
  const CorpusRun run = corpus_run("bubble_sort.tn");
  const std::map<std::string, Rational> ones{{"x1", 1}, {"x2", 1}, {"x3", 1}, {"x4", 1}};
  CHECK(conservation_check(run.original, ones, 13) <= 1e-6);
  CHECK(conservation_check(run.original, {}, 0) == 0.0);
  CHECK(conservation_check(run.original, {}, 2) == 2.0);

  const CorpusRun s = corpus_run("sine_cosine.tn");
  CHECK(conservation_check(s.original, {{"x", 1}}, 2) > 0.5);
}

TEST_CASE("report") {
  const SystemFile file = load_corpus("bubble_sort.tn");
  const TNSystem tn = compile_file(file).tn;
  const VerificationReport r =
      verify(tn, file.sim_params(), {}, {}, file.verify_thresholds(), file.conservation_laws());
  CHECK(r.verdict());
  CHECK(r.conservation.contains("total.source"));
  CHECK(r.conservation.contains("total.compiled"));
  std::ostringstream os;
  r.write(os);
  const std::string text = os.str();
  for (const char* key : {"t_end=50\n", "symbolic.x1=pass\n", "check.symbolic=pass\n", "check.ratio_error=pass\n",
                          "check.bookend=pass\n", "check.conservation=pass\n", "verdict=pass\n"})
    CHECK(text.find(key) != std::string::npos);
  CHECK(text.find("ratio_error.y12=") != std::string::npos);
  CHECK(text.find("bottom_min.x4=") != std::string::npos);

  VerifyThresholds strict = file.verify_thresholds();
  strict.max_ratio_error = 0.0;
  const VerificationReport tight = verify(tn, file.sim_params(), {}, {}, strict);
  CHECK_FALSE(tight.ratio_pass());
  CHECK_FALSE(tight.verdict());
}

}  // TEST_SUITE
