#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "tnc/driver.hpp"
#include "tnc/kernels.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code = -1;
  std::string out;
};

Result run(const std::string& args) {
  const std::string cmd = std::string(TNC_CLI_PATH) + " " + args + " 2>/dev/null";
  Result r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string corpus(const char* name) { return (tnc::corpus_dir() / name).string(); }

fs::path scratch() {
  const fs::path dir = fs::temp_directory_path() / ("tnc_cli_test_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir;
}

std::string write(const fs::path& path, const std::string& text) {
  std::ofstream(path) << text;
  return path.string();
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool has_line(const std::string& text, const std::string& line) {
  return ("\n" + text).find("\n" + line + "\n") != std::string::npos;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("compile writes the canonical network") {
  const Result r = run("compile " + corpus("sine_cosine.tn"));
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("# transcriptional network compiled from sine_cosine.tn\n", 0) == 0);
  CHECK(has_line(r.out, "gamma 2.5"));
  CHECK(has_line(r.out, "beta 1"));
  CHECK(has_line(r.out, "pair x x_T x_B"));
  CHECK(has_line(r.out, "ode x_B' = 1 - 2.5*x_B + 2*x_B^2*x_T^-1"));
  CHECK(run("compile " + corpus("sine_cosine.tn")).out == r.out);

  const Result warm = run("compile --mode warmup " + corpus("sine_cosine.tn"));
  CHECK(warm.code == 0);
  CHECK(warm.out.find("\nbeta ") == std::string::npos);
  CHECK(has_line(warm.out, "mode warmup"));

  const Result est = run("compile --gamma auto " + corpus("sine_cosine.tn"));
  CHECK(est.code == 0);
  CHECK(est.out.find("# gamma estimated as ") != std::string::npos);

  const fs::path dir = scratch();
  const Result to_file = run("compile -o " + (dir / "sine.net").string() + " " + corpus("sine_cosine.tn"));
  CHECK(to_file.code == 0);
  CHECK(slurp(dir / "sine.net") == r.out);
  CHECK(run("compile " + (dir / "sine.net").string()).code == 2);
}

TEST_CASE("simulate writes CSV and SVG") {
  const Result one = run("simulate --points 1 " + corpus("sine_cosine.tn"));
  REQUIRE(one.code == 0);
  CHECK(one.out.rfind("t,x,y\n0,2,1\n", 0) == 0);
  CHECK(std::count(one.out.begin(), one.out.end(), '\n') == 3);

  const Result compiled = run("simulate --compiled --points 2 " + corpus("sine_cosine.tn"));
  CHECK(compiled.out.rfind("t,x_T,x_B,y_T,y_B,x,y\n", 0) == 0);
  CHECK(run("simulate --points 50 " + corpus("willamowski_rossler.crn")).out ==
        run("simulate --points 50 " + corpus("willamowski_rossler.crn")).out);

  const fs::path dir = scratch();
  const fs::path svg = dir / "plot.svg";
  const Result plot = run("simulate --svg " + svg.string() + " --plot x,y " + corpus("sine_cosine.tn"));
  CHECK(plot.code == 0);
  CHECK(plot.out.empty());
  const std::string text = slurp(svg);
  CHECK(text.rfind("<svg", 0) == 0);
  CHECK(text.find("data-name=\"x\"") != std::string::npos);
  CHECK(text.find("data-name=\"y\"") != std::string::npos);
  CHECK(text.find("class=\"legend\"") != std::string::npos);
  CHECK(run("simulate --svg " + svg.string() + " --plot nope " + corpus("sine_cosine.tn")).code == 2);

  const std::string blow = write(dir / "blow.tn", "var x = 1\node x' = x^2\nsim t_end 2 points 20\n");
  const Result b = run("simulate " + blow);
  CHECK(b.code == 1);
  CHECK(b.out.rfind("t,x\n0,1\n", 0) == 0);
}

TEST_CASE("verify exit codes") {
  const fs::path dir = scratch();
  const std::string report = (dir / "report.txt").string();
  CHECK(run("verify --report " + report + " " + corpus("bubble_sort.tn")).code == 0);
  const std::string text = slurp(report);
  CHECK(has_line(text, "verdict=pass"));
  CHECK(has_line(text, "input=bubble_sort.tn"));

  const Result warm = run("verify --mode warmup --t-end 100 " + corpus("sine_cosine.tn"));
  CHECK(warm.code == 1);
  CHECK(has_line(warm.out, "check.bookend=fail"));
  CHECK(has_line(warm.out, "abs_tol=0"));

  std::string net = run("compile " + corpus("sine_cosine.tn")).out;
  const std::string good = write(dir / "good.net", net);
  CHECK(run("verify --tn-file " + good + " " + corpus("sine_cosine.tn")).code == 0);
  const auto at = net.find("ode x_T' = ");
  REQUIRE(at != std::string::npos);
  const auto eol = net.find('\n', at);
  net.replace(at, eol - at, "ode x_T' = -2.5*x_T + x_B*y_T*y_B^-1 + x_B^-1*x_T - 5*x_T");
  const Result corrupt = run("verify --tn-file " + write(dir / "bad.net", net) + " " + corpus("sine_cosine.tn"));
  CHECK(corrupt.code == 1);
  CHECK(has_line(corrupt.out, "symbolic.x=fail"));

  CHECK(run("verify /nonexistent.tn").code == 2);
  CHECK(run("verify " + write(dir / "broken.tn", "var x = 1\node x' = (\n")).code == 2);
  CHECK(run("frobnicate").code == 2);
}

TEST_CASE("gamma") {
  CHECK(run("gamma --margin 1 " + corpus("sine_cosine.tn")).out == "2.22\n");
  const fs::path dir = scratch();
  CHECK(run("gamma " + write(dir / "decay.tn", "var x = 1\node x' = -x\n")).out == "1.1\n");
  const Result wr = run("gamma " + corpus("willamowski_rossler.crn"));
  CHECK(wr.code == 0);
  CHECK(tnc::Rational::parse(wr.out.substr(0, wr.out.size() - 1)) > tnc::Rational(0));
}

TEST_CASE("isa override") {
  const std::string a = run("--isa scalar simulate --points 40 " + corpus("willamowski_rossler.crn")).out;
  CHECK_FALSE(a.empty());
  if (tnc::kernels::supported(tnc::kernels::Isa::Avx2))
    CHECK(run("--isa avx2 simulate --points 40 " + corpus("willamowski_rossler.crn")).out == a);
  CHECK(run("--isa sse simulate " + corpus("sine_cosine.tn")).code == 2);
}

}  // TEST_SUITE
