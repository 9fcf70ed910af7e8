#pragma once
// JSON run configuration: one document drives simulation, reproduction
// suites, and diagnostics.  Validation errors name the offending path.
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "evbma/simulate.hpp"

namespace evbma {

struct ConfigError : std::runtime_error {
  ConfigError(const std::string& path, const std::string& message)
      : std::runtime_error(path.empty() ? message : path + ": " + message), path(path) {}
  std::string path;
};

struct DesignEntry {
  std::string id;
  ModelId model = ModelId::Custom;
  std::vector<double> e_grid;  // benchmark models only
  std::vector<int> t_grid;
  std::optional<PolicySpec> policy;  // override for benchmark models; custom default alternating
  // custom designs:
  std::optional<Environment> environment;
  std::vector<Source> sources;
  std::vector<double> prior_model_probs;  // empty = uniform
  bool operator==(const DesignEntry&) const = default;
};

struct PacRequest {
  double epsilon = 0.1;
  std::optional<double> acceleration;   // given directly...
  std::optional<std::string> design_id; // ...or derived from a design's unbiased sources
  bool operator==(const PacRequest&) const = default;
};

struct DiagnosticsConfig {
  std::int64_t horizon = 10000;
  bool use_ell = false;
  std::vector<PacRequest> pac;
  bool operator==(const DiagnosticsConfig&) const = default;
};

struct RunConfig {
  std::vector<DesignEntry> designs;
  int replications = 1000;
  std::uint64_t base_seed = kDefaultBaseSeed;
  int parallelism = 1;
  std::string output_dir = "out";
  std::vector<std::string> output_formats{"csv"};
  double working_variance = 1.0;
  bool record_trajectory = false;
  DiagnosticsConfig diagnostics;
  bool operator==(const RunConfig&) const = default;
};

// One concrete (design entry, e, T) combination, compiled to a runnable design.
struct ExpandedPoint {
  std::string design_id;
  std::string point_id;
  ModelId model = ModelId::Custom;
  std::optional<double> e;
  int T = 0;
  DesignPoint design;
};

RunConfig parse_config(const std::string& text);
RunConfig load_config_file(const std::string& path);
std::string serialize_config(const RunConfig& config);

// Expands grids into runnable design points; applies replications/seed/
// working variance from the config.
std::vector<ExpandedPoint> expand_config(const RunConfig& config);

// Role labels used in outputs: "diffuse", "unbiased", or "biased" for a
// source at one cell, judged against the environment's true mean.
std::string source_role(const SourcePrior& prior, double truth);

}  // namespace evbma
