// tnc: compile, simulate and verify transcriptional-network implementations of polynomial ODEs.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tnc/driver.hpp"
#include "tnc/kernels.hpp"
#include "tnc/plot.hpp"

using namespace tnc;

namespace {

constexpr int kFail = 1;
constexpr int kError = 2;

struct CompileFlags {
  std::string gamma;  // empty or "auto" = estimate
  std::optional<std::string> beta;
  std::optional<std::string> mode;
  double margin = 1.1;
  std::optional<double> estimate_t_end;
};

struct SimFlags {
  std::optional<double> t_end;
  std::optional<int> points;
  std::optional<double> rtol;
  std::optional<double> atol;
  std::optional<double> max_step;
};

void add_compile_flags(CLI::App* cmd, CompileFlags& f) {
  cmd->add_option("--gamma", f.gamma, "Decay constant (rational, e.g. 5/2); omit or 'auto' to estimate");
  cmd->add_option("--beta", f.beta, "Constant production of every bottom factor (default 1)");
  cmd->add_option("--mode", f.mode, "stable or warmup")->check(CLI::IsMember({"stable", "warmup"}));
  cmd->add_option("--margin", f.margin, "Safety factor applied to the estimated gamma")->check(CLI::Range(1.0, 1e6));
}

void add_sim_flags(CLI::App* cmd, SimFlags& f) {
  cmd->add_option("--t-end", f.t_end, "End of the simulated interval")->check(CLI::PositiveNumber);
  cmd->add_option("--points", f.points, "Number of uniform output intervals")->check(CLI::PositiveNumber);
  cmd->add_option("--rtol", f.rtol, "Relative tolerance")->check(CLI::PositiveNumber);
  cmd->add_option("--atol", f.atol, "Absolute tolerance")->check(CLI::NonNegativeNumber);
  cmd->add_option("--max-step", f.max_step, "Largest integration step")->check(CLI::PositiveNumber);
}

CompileOptions compile_options(const CompileFlags& f) {
  CompileOptions o;
  if (f.gamma == "auto")
    o.estimate_gamma = true;
  else if (!f.gamma.empty())
    o.gamma = Rational::parse(f.gamma);
  if (f.beta) o.beta = Rational::parse(*f.beta);
  if (f.mode) o.mode = *f.mode == "warmup" ? Mode::Warmup : Mode::Stable;
  o.margin = f.margin;
  o.estimate_t_end = f.estimate_t_end;
  return o;
}

SimParams sim_params(const SystemFile& file, const SimFlags& f) {
  SimParams p = file.sim_params();
  if (f.t_end) p.t_end = *f.t_end;
  if (f.points) p.sample_points = *f.points;
  if (f.rtol) p.rel_tol = *f.rtol;
  if (f.atol) p.abs_tol = *f.atol;
  if (f.max_step) p.max_step = *f.max_step;
  return p;
}

/// Appends v = v_T/v_B for every ratio pair of a compiled run.
void add_ratio_columns(Trajectory& tr, const TNSystem& tn) {
  for (const auto& [v, pair] : tn.pairing) {
    std::vector<double> col(tr.size());
    for (std::size_t i = 0; i < col.size(); ++i) col[i] = tr.value(pair.top, i) / tr.value(pair.bottom, i);
    tr.add_column(v, std::move(col));
  }
}

/// Writes to `path`, or stdout when empty or "-".
template <class F>
void write_output(const std::string& path, F&& body) {
  if (path.empty() || path == "-") {
    body(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  body(out);
}

std::string file_name(const std::string& path) { return std::filesystem::path(path).filename().string(); }

// --------------------------------------------------------------------------

struct CompileCmd {
  std::string input;
  std::string out;
  CompileFlags flags;

  int run() const {
    const SystemFile file = load_system_file(input);
    if (file.is_network()) throw std::runtime_error(input + " is already a compiled network");
    const CompiledFile compiled = compile_file(file, compile_options(flags));
    std::string header = "# transcriptional network compiled from " + file_name(input) + "\n";
    if (compiled.gamma_estimated) {
      char buf[128];
      std::snprintf(buf, sizeof buf, "# gamma estimated as %s over [0, %g] with margin %g\n",
                    compiled.tn.gamma.to_string().c_str(),
                    flags.estimate_t_end.value_or(file.sim_params().t_end), flags.margin);
      header += buf;
    }
    const std::string text = header + print_system_file(network_file(compiled.tn, file));
    write_output(out, [&](std::ostream& os) { os << text; });
    return 0;
  }
};

struct SimulateCmd {
  std::string input;
  std::string csv;
  std::string svg;
  std::vector<std::string> plot;
  bool compiled = false;
  CompileFlags compile;
  SimFlags sim;

  int run() const {
    const SystemFile file = load_system_file(input);
    const SimParams params = sim_params(file, sim);
    const EventSchedule events = file.event_schedule();
    const PlaceholderImpls placeholders = file.placeholder_impls();

    std::optional<TNSystem> tn;
    if (file.is_network() || compiled) tn = compile_file(file, compile_options(compile)).tn;

    Trajectory traj;
    int status = 0;
    try {
      traj = tn ? integrate(*tn, params, events, placeholders) : integrate(file.system(), params, events, placeholders);
    } catch (const BlowUpError& e) {
      std::cerr << "tnc: blow-up: " << e.what() << '\n';
      traj = e.partial();
      status = kFail;
    }

    std::vector<std::string> columns = plot;
    if (tn) {
      add_ratio_columns(traj, *tn);
      if (columns.empty())
        for (const auto& v : tn->source.variables())
          if (traj.has(v)) columns.push_back(v);
    } else if (columns.empty()) {
      columns = traj.names();
    }
    for (const auto& c : columns)
      if (!traj.has(c)) throw std::runtime_error("no column '" + c + "' to plot");

    if (!svg.empty()) {
      PlotOptions options;
      options.title = file_name(input);
      write_output(svg, [&](std::ostream& os) { write_svg(os, traj, columns, options); });
    }
    if (!csv.empty() || svg.empty()) write_output(csv, [&](std::ostream& os) { traj.write_csv(os); });
    return status;
  }
};

struct VerifyCmd {
  std::string input;
  std::string tn_file;
  std::string report_path;
  std::optional<double> ratio_tol;
  std::optional<double> horizon;
  CompileFlags compile;
  SimFlags sim;

  int run() const {
    const SystemFile file = load_system_file(input);
    if (file.is_network()) throw std::runtime_error("verify takes the source system; pass the network with --tn-file");

    TNSystem tn;
    if (!tn_file.empty()) {
      tn = load_system_file(tn_file).network();
      tn.source = file.system(tn.gamma);
    } else {
      tn = compile_file(file, compile_options(compile)).tn;
    }

    SimParams params = sim_params(file, sim);
    // Warmup factors decay exponentially; an absolute floor would stop controlling their quotient.
    if (tn.mode == Mode::Warmup && !sim.atol) params.abs_tol = 0.0;
    VerifyThresholds thresholds = file.verify_thresholds();
    if (ratio_tol) thresholds.max_ratio_error = *ratio_tol;
    if (horizon) thresholds.ratio_horizon = *horizon;

    const VerificationReport report =
        verify(tn, params, file.event_schedule(), file.placeholder_impls(), thresholds, file.conservation_laws());
    write_output(report_path, [&](std::ostream& os) {
      os << "input=" << file_name(input) << '\n';
      os << "gamma=" << tn.gamma.to_string() << '\n';
      os << "beta=" << tn.beta.to_string() << '\n';
      os << "mode=" << (tn.mode == Mode::Stable ? "stable" : "warmup") << '\n';
      os << "rel_tol=" << params.rel_tol << '\n';
      os << "abs_tol=" << params.abs_tol << '\n';
      report.write(os);
    });
    return report.verdict() ? 0 : kFail;
  }
};

struct GammaCmd {
  std::string input;
  std::optional<double> t_end;
  double margin = 1.1;

  int run() const {
    const SystemFile file = load_system_file(input);
    const ODESystem sys = file.is_network() ? file.network().source : file.system(file.gamma);
    const double horizon = t_end.value_or(file.sim_params().t_end);
    std::cout << estimate_gamma(sys, horizon, margin, file.event_schedule(), file.placeholder_impls()).to_string()
              << '\n';
    return 0;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Compile polynomial and Laurent ODEs into transcriptional networks and check the result."};
  app.require_subcommand(1);
  std::string isa = "auto";
  app.add_option("--isa", isa, "Integrator kernels: auto, scalar or avx2")
      ->check(CLI::IsMember({"auto", "scalar", "avx2"}));

  CompileCmd compile;
  auto* c = app.add_subcommand("compile", "Write the transcriptional network for a system file");
  c->add_option("input", compile.input, "System file (.tn or .crn)")->required()->check(CLI::ExistingFile);
  c->add_option("--out,-o", compile.out, "Output path (default stdout)");
  add_compile_flags(c, compile.flags);
  c->add_option("--t-end", compile.flags.estimate_t_end, "Horizon for the gamma estimate")->check(CLI::PositiveNumber);

  SimulateCmd simulate;
  auto* s = app.add_subcommand("simulate", "Integrate a system or network and emit CSV and SVG");
  s->add_option("input", simulate.input, "System or compiled network file")->required()->check(CLI::ExistingFile);
  s->add_option("--csv", simulate.csv, "CSV output path (default stdout unless --svg is given)");
  s->add_option("--svg", simulate.svg, "SVG plot output path");
  s->add_option("--plot", simulate.plot, "Columns to plot (comma separated)")->delimiter(',');
  s->add_flag("--compiled", simulate.compiled, "Compile a source file first and simulate the network");
  add_compile_flags(s, simulate.compile);
  add_sim_flags(s, simulate.sim);

  VerifyCmd verify_cmd;
  auto* v = app.add_subcommand("verify", "Compile, co-simulate and check a system; exit 0 on pass, 1 on fail");
  v->add_option("input", verify_cmd.input, "Source system file")->required()->check(CLI::ExistingFile);
  v->add_option("--tn-file", verify_cmd.tn_file, "Check this compiled network instead of compiling")
      ->check(CLI::ExistingFile);
  v->add_option("--report", verify_cmd.report_path, "Report output path (default stdout)");
  v->add_option("--ratio-tol", verify_cmd.ratio_tol, "Largest accepted |v - v_T/v_B|")->check(CLI::PositiveNumber);
  v->add_option("--horizon", verify_cmd.horizon, "Compare ratios only up to this time")->check(CLI::PositiveNumber);
  add_compile_flags(v, verify_cmd.compile);
  add_sim_flags(v, verify_cmd.sim);

  GammaCmd gamma;
  auto* g = app.add_subcommand("gamma", "Print the estimated decay constant");
  g->add_option("input", gamma.input, "System file")->required()->check(CLI::ExistingFile);
  g->add_option("--t-end", gamma.t_end, "Simulation horizon")->check(CLI::PositiveNumber);
  g->add_option("--margin", gamma.margin, "Safety factor (>= 1)")->check(CLI::Range(1.0, 1e6));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kError;
  }

  try {
    if (isa == "scalar") kernels::select(kernels::Isa::Scalar);
    if (isa == "avx2") kernels::select(kernels::Isa::Avx2);
    if (*c) return compile.run();
    if (*s) return simulate.run();
    if (*v) return verify_cmd.run();
    if (*g) return gamma.run();
  } catch (const std::exception& e) {
    std::cerr << "tnc: " << e.what() << '\n';
    return kError;
  }
  return kError;
}
