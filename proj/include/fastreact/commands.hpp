#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "fastreact/config.hpp"

namespace fastreact {

enum ExitCode : int {
  kExitOk = 0,
  kExitValidation = 1,
  kExitDivergence = 2,
  kExitAssumption = 3,
};

struct RunOptions {
  std::string out_dir = ".";
  std::optional<unsigned> threads;
  bool quiet = false;
};

/// Executes one experiment and writes its CSV (and SVG when configured) under
/// out_dir, plus a <csv>.meta.yaml with the seed and command. Exceptions propagate.
void run_experiment(const ExperimentConfig& cfg, const RunOptions& opt, std::ostream& log);

/// Maps library exceptions to exit codes; messages go to `err`.
int run_guarded(const ExperimentConfig& cfg, const RunOptions& opt, std::ostream& log,
                std::ostream& err);

/// Command-line entry: --config, --out, --seed, --threads, --quiet.
int cli_main(int argc, char** argv);

}  // namespace fastreact
