#pragma once

#include <filesystem>
#include <optional>
#include <string_view>

#include "tnc/format.hpp"
#include "tnc/sim.hpp"

namespace tnc {

struct CompileOptions {
  std::optional<Rational> gamma;  ///< overrides the file; neither set = estimate
  bool estimate_gamma = false;    ///< estimate even if the file sets gamma
  std::optional<Rational> beta;
  std::optional<Mode> mode;
  double margin = 1.1;
  std::optional<double> estimate_t_end;  ///< horizon for the estimate; defaults to the file's t_end
};

struct CompiledFile {
  TNSystem tn;
  bool gamma_estimated = false;
};

/// Compiles a source file, or loads the network of a compiled file as-is.
CompiledFile compile_file(const SystemFile& file, const CompileOptions& options = {});

/// Integrates the source system and the network on the same grid.
struct RunPair {
  Trajectory original;
  Trajectory compiled;
};
RunPair run_pair(const TNSystem& tn, const SimParams& params, const EventSchedule& events = {},
                 const PlaceholderImpls& placeholders = {});

/// Directory holding the example systems; $TNC_CORPUS overrides the build-time location.
std::filesystem::path corpus_dir();
SystemFile load_corpus(std::string_view file_name);

struct CorpusRun {
  SystemFile file;
  TNSystem tn;
  SimParams params;
  Trajectory original;
  Trajectory compiled;
};

/// Loads, compiles and co-simulates a corpus file with its own settings.
CorpusRun corpus_run(std::string_view file_name, const CompileOptions& options = {});

}  // namespace tnc
