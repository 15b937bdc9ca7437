#include "doctest.h"
#include "tnc/driver.hpp"
#include "tnc/parse.hpp"

using namespace tnc;

namespace {

const char* const kCorpus[] = {"sine_cosine.tn", "bubble_sort.tn", "schlogl.crn",
                               "willamowski_rossler.crn", "pid.tn", "extremum.tn"};

int error_line(const std::string& text) {
  try {
    (void)parse_system_file(text);
  } catch (const FormatError& e) {
    return e.line();
  }
  return -1;
}

}  // namespace

TEST_SUITE("format") {

TEST_CASE("corpus files print canonically and parse back") {
  for (const char* name : kCorpus) {
    CAPTURE(name);
    const SystemFile file = load_corpus(name);
    const std::string text = print_system_file(file);
    const SystemFile again = parse_system_file(text);
    CHECK(again == file);
    CHECK(print_system_file(again) == text);
  }
}

TEST_CASE("compiled network files reproduce the network") {
  for (const char* name : kCorpus) {
    CAPTURE(name);
    const SystemFile file = load_corpus(name);
    const TNSystem tn = compile_file(file).tn;
    const SystemFile net = network_file(tn, file);
    CHECK(net.is_network());
    const SystemFile back = parse_system_file(print_system_file(net));
    CHECK(back == net);
    CHECK(back.network() == tn);
    CHECK(back.event_schedule().size() == file.event_schedule().size());
    CHECK(compile_file(back).tn == tn);
  }
  const SystemFile sine = load_corpus("sine_cosine.tn");
  const TNSystem warm = compile(sine.system(), Rational(5, 2), Rational(1), Mode::Warmup);
  const SystemFile wf = network_file(warm, sine);
  CHECK_FALSE(wf.beta.has_value());
  CHECK(parse_system_file(print_system_file(wf)).network() == warm);
}

TEST_CASE("sine file expands to the shifted system") {
  ODESystem expected;
  expected.add_variable("x", parse_expr("y - 2"), 2);
  expected.add_variable("y", parse_expr("2 - x"), 1);
  CHECK(load_corpus("sine_cosine.tn").system() == expected);
}

TEST_CASE("reaction files expand by mass action") {
  const ODESystem schlogl = load_corpus("schlogl.crn").system();
  CHECK(schlogl.rhs("x") == LaurentPolynomial());
  CHECK(schlogl.rhs("y") == parse_expr("x - 11*y^3 + 16.5*y^2 - 6.5*y"));
  CHECK(schlogl.initial("x") == Rational(1, 2));

  const ODESystem wr = load_corpus("willamowski_rossler.crn").system();
  CHECK(wr.variables() == std::vector<std::string>{"x", "y", "z"});
  CHECK(wr.rhs("x") == parse_expr("30*x - 0.5*x^2 - x*y - x*z"));
  CHECK(wr.rhs("y") == parse_expr("x*y - 10*y"));
  CHECK(wr.rhs("z") == parse_expr("16.5*z - 0.5*z^2 - x*z"));

  const auto events = load_corpus("schlogl.crn").event_schedule();
  REQUIRE(events.size() == 4);
  const auto& first = std::get<SetRatio>(events[0].action);
  CHECK(events[0].time == 5.0);
  CHECK(first.top == 0.09);
  CHECK(first.bottom == 0.1);
}

TEST_CASE("pid file") {
  const SystemFile file = load_corpus("pid.tn");
  const ODESystem sys = file.system();
  CHECK(sys.rhs("v") == parse_expr("4 - 2.5*v + i + d"));
  const auto events = file.event_schedule();
  REQUIRE(events.size() == 4);
  CHECK(std::get<SetBias>(events[2].action).constant == Rational(6));
  CHECK(std::get<SetBias>(events[3].action).constant == Rational(-2));
  CHECK(file.sim_params().sample_points == 1400);
}

TEST_CASE("settings lines") {
  const SystemFile f = parse_system_file(
      "var x = 1\node x' = -x\ngamma 3/2\nbeta 2\nmode warmup\nscale x 3\n"
      "sim t_end 4 points 8 rtol 1e-6 atol 0 max_step 0.5\nverify ratio_tol 1e-3 horizon 2\n");
  CHECK(f.gamma == Rational(3, 2));
  CHECK(f.beta == Rational(2));
  CHECK(f.mode == Mode::Warmup);
  CHECK(f.denominator_scales().at("x") == Rational(3));
  const SimParams p = f.sim_params();
  CHECK(p.t_end == 4.0);
  CHECK(p.sample_points == 8);
  CHECK(p.rel_tol == 1e-6);
  CHECK(p.abs_tol == 0.0);
  CHECK(p.max_step == 0.5);
  CHECK(f.verify_thresholds().max_ratio_error == 1e-3);
  CHECK(f.verify_thresholds().ratio_horizon == 2.0);
  CHECK_FALSE(parse_system_file("gamma auto\n").gamma.has_value());
}

TEST_CASE("trackers and direct variables") {
  const SystemFile f = parse_system_file("var z = 2\node z' = -z\ntrack x rate 2 = 3*z\ndirect z\n");
  const ODESystem sys = f.system();
  CHECK(sys.rhs("x") == parse_expr("6*z - 2*x"));
  CHECK(sys.representation("x") == Representation::Direct);
  CHECK(sys.representation("z") == Representation::Direct);
  CHECK_THROWS_AS((void)parse_system_file("var z = 2\node z' = -z\ntrack x = z\n").system(), FormatError);
  CHECK(parse_system_file("var z = 2\node z' = -z\ntrack x = z\n").system(Rational(4)).rhs("x") ==
        parse_expr("4*z - 4*x"));
}

TEST_CASE("errors") {
  CHECK(error_line("var x = 1\nbogus\n") == 2);
  CHECK(error_line("# comment\n\nvar x 1\n") == 3);
  CHECK(error_line("var x = 1\node x' = (x\n") == 2);
  CHECK(error_line("gamma -1\n") == 1);
  CHECK(error_line("sim points 0\n") == 1);
  CHECK(error_line("event 1 launch x\n") == 1);
  CHECK(error_line("A ->{k} B\n") == 1);

  CHECK_THROWS_AS((void)parse_system_file("var x = -5\nshift x 2\node x' = 0\n").system(), FormatError);
  CHECK_NOTHROW((void)parse_system_file("var x = -1\nshift x 2\node x' = 0\n").system());
  CHECK_THROWS_AS((void)parse_system_file("var x = 1\n").system(), FormatError);
  CHECK_THROWS_AS((void)parse_system_file("var x = 1\node x' = 0\nshift q 1\n").system(), FormatError);
  CHECK_THROWS_AS((void)parse_system_file("var x = 1\node x' = 0\nplaceholder f = nonesuch(x)\n").placeholder_impls(),
                  FormatError);
  CHECK_THROWS_AS((void)parse_system_file("var x = 1\node x' = 0\n").network(), FormatError);
  CHECK_THROWS_AS((void)load_system_file("/nonexistent/file.tn"), FormatError);
}

}  // TEST_SUITE
