#pragma once
// Command implementations behind the CLI: each loads or builds a run
// configuration, executes it, and writes CSV outputs plus a manifest.json
// under a single output directory.
#include <cstdint>
#include <optional>
#include <string>

#include "evbma/config.hpp"

namespace evbma {

struct CommandOptions {
  std::string out_dir;  // empty -> the config's output_dir
  std::optional<int> parallelism;
  std::optional<std::uint64_t> seed;
  std::optional<int> replications;
};

void apply_overrides(RunConfig& config, const CommandOptions& options);

// Runs every expanded design point; writes results_<point>.csv per point,
// summary.csv, summary_alpha.csv, and manifest.json.
void cmd_simulate(const std::string& config_path, const CommandOptions& options);

// Reruns the built-in benchmark grid (three source models x evidence scales
// {0.5, 1, 2} x horizons {50..750}).  suite selects the outputs: "table1"
// (mean posterior source weights), "figures" (scaled-error summaries plus
// box-plot data), or "all".
void cmd_reproduce(const std::string& suite, const CommandOptions& options);

// kind is one of rates | decay | divergence | pac; writes diagnostics.csv.
void cmd_diagnose(const std::string& kind, const std::string& config_path,
                  const CommandOptions& options);

// Parses and expands the config, reporting the first violation if any.
void cmd_validate_config(const std::string& config_path);

}  // namespace evbma
