#pragma once
// Experiment designs and the Monte Carlo engine.  run_design parallelizes
// replications with OpenMP; run_design_serial is the plain-loop reference
// kept for correctness testing, and both produce bit-identical results
// because every replication derives its own counter-based streams.
#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "evbma/bma.hpp"
#include "evbma/core.hpp"
#include "evbma/policies.hpp"
#include "evbma/rng.hpp"

namespace evbma {

struct OutcomeDist {
  enum class Kind { Gaussian, Bernoulli, ShiftedLogNormal, Constant };
  Kind kind = Kind::Gaussian;
  double mean = 0.0;   // always the distribution mean
  double param = 1.0;  // sd (Gaussian) or log-scale shape (ShiftedLogNormal)

  double sample(CounterRng& rng) const;
  void validate() const;
  bool operator==(const OutcomeDist&) const = default;
};

struct Environment {
  int arms = 0;
  int covariates = 1;
  std::vector<OutcomeDist> cells;  // indexed covariate * arms + arm

  std::size_t index(int arm, int covariate) const;
  const OutcomeDist& cell(int arm, int covariate) const;
  double truth(int arm, int covariate) const { return cell(arm, covariate).mean; }
  void validate() const;
  bool operator==(const Environment&) const = default;
};

struct Source {
  std::string name;
  std::vector<SourcePrior> cell_priors;  // same layout as Environment::cells

  const SourcePrior& prior(const Environment& env, int arm, int covariate) const;
  bool operator==(const Source&) const = default;
};

enum class ModelId { Model1, Model2, Model3, Custom };
std::string model_name(ModelId id);

inline constexpr std::uint64_t kDefaultBaseSeed = 412200152ull;
inline constexpr std::array<int, 5> kBenchmarkHorizons{50, 100, 250, 500, 750};
inline constexpr std::array<double, 3> kBenchmarkEvidenceScales{0.5, 1.0, 2.0};

struct DesignPoint {
  ModelId model_id = ModelId::Custom;
  double evidence_scale = 0.0;  // informative-source rate e; 0 when unused
  int horizon = 0;              // T
  Environment environment;
  std::vector<Source> sources;
  PolicySpec policy;
  int replications = 1;
  std::uint64_t base_seed = kDefaultBaseSeed;
  WorkingModel working;
  std::vector<double> prior_model_probs;  // empty = uniform over sources
  std::vector<int> weight_checkpoints;    // ascending t values; may be empty

  void validate() const;
  std::vector<double> effective_prior_probs() const;
  bool operator==(const DesignPoint&) const = default;
};

struct WeightCheckpoint {
  int t = 0;
  std::vector<std::vector<double>> cell_weights;  // [cell][source]
};

struct CellResult {
  CellKey cell;
  std::int64_t count = 0;
  double truth = 0.0;
  double bma_estimate = 0.0;
  std::optional<double> standard_estimate;  // missing when the cell saw no data
  std::vector<double> weights;              // final posterior model probabilities
};

struct ReplicationResult {
  int rep_index = 0;
  std::vector<CellResult> cells;
  std::vector<WeightCheckpoint> checkpoints;
};

// Two-arm Gaussian benchmark designs: outcomes N(1,1) vs N(1.3,1), a diffuse
// source centered on the truth, plus informative sources at rate e --
// unbiased (Model1), biased by +1 (Model2), or both (Model3).  Assignment
// alternates deterministically so each arm sees exactly T/2 observations.
DesignPoint build_benchmark_model(ModelId id, double e, int T);

ReplicationResult run_replication(const DesignPoint& design, int rep_index);
std::vector<ReplicationResult> run_design(const DesignPoint& design, int parallelism);
std::vector<ReplicationResult> run_design_serial(const DesignPoint& design);

}  // namespace evbma
