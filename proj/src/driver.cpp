#include "tnc/driver.hpp"

#include <cstdlib>

namespace tnc {

CompiledFile compile_file(const SystemFile& file, const CompileOptions& options) {
  CompiledFile out;
  if (file.is_network()) {
    out.tn = file.network();
    return out;
  }
  const std::optional<Rational> given = options.gamma ? options.gamma : file.gamma;
  Rational g;
  if (given && !options.estimate_gamma) {
    g = *given;
  } else {
    // Trackers run at the file's gamma while estimating, then at the estimate.
    const double horizon = options.estimate_t_end.value_or(file.sim_params().t_end);
    g = estimate_gamma(file.system(file.gamma), horizon, options.margin, file.event_schedule(),
                       file.placeholder_impls());
    out.gamma_estimated = true;
  }
  const ODESystem sys = file.system(g);
  const Rational beta = options.beta ? *options.beta : file.beta.value_or(Rational(1));
  const Mode mode = options.mode ? *options.mode : file.mode.value_or(Mode::Stable);
  out.tn = compile(sys, g, beta, mode, file.denominator_scales());
  return out;
}

RunPair run_pair(const TNSystem& tn, const SimParams& params, const EventSchedule& events,
                 const PlaceholderImpls& placeholders) {
  return {integrate(tn.source, params, events, placeholders), integrate(tn, params, events, placeholders)};
}

std::filesystem::path corpus_dir() {
  if (const char* env = std::getenv("TNC_CORPUS"); env && *env) return env;
#ifdef TNC_CORPUS_DIR
  return TNC_CORPUS_DIR;
#else
  return "corpus";
#endif
}

SystemFile load_corpus(std::string_view file_name) { return load_system_file(corpus_dir() / file_name); }

CorpusRun corpus_run(std::string_view file_name, const CompileOptions& options) {
  CorpusRun run;
  run.file = load_corpus(file_name);
  run.tn = compile_file(run.file, options).tn;
  run.params = run.file.sim_params();
  auto pair = run_pair(run.tn, run.params, run.file.event_schedule(), run.file.placeholder_impls());
  run.original = std::move(pair.original);
  run.compiled = std::move(pair.compiled);
  return run;
}

}  // namespace tnc
