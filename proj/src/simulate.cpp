#include "evbma/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace evbma {

double OutcomeDist::sample(CounterRng& rng) const {
  switch (kind) {
    case Kind::Gaussian:
      return mean + param * rng.normal();
    case Kind::Bernoulli:
      return rng.uniform() < mean ? 1.0 : 0.0;
    case Kind::ShiftedLogNormal: {
      // shift solved so the mean is exact: E[exp(param * Z)] = exp(param^2/2)
      const double shift = mean - std::exp(0.5 * param * param);
      return shift + std::exp(param * rng.normal());
    }
    case Kind::Constant:
      return mean;
  }
  throw std::logic_error("OutcomeDist::sample: unhandled kind");
}

void OutcomeDist::validate() const {
  if (!std::isfinite(mean)) throw std::invalid_argument("OutcomeDist: mean must be finite");
  switch (kind) {
    case Kind::Gaussian:
      if (!(param > 0.0)) throw std::invalid_argument("OutcomeDist: gaussian sd must be > 0");
      break;
    case Kind::Bernoulli:
      if (mean < 0.0 || mean > 1.0)
        throw std::invalid_argument("OutcomeDist: bernoulli mean must lie in [0,1]");
      break;
    case Kind::ShiftedLogNormal:
      if (!(param > 0.0))
        throw std::invalid_argument("OutcomeDist: shifted_lognormal shape must be > 0");
      break;
    case Kind::Constant:
      break;
  }
}

std::size_t Environment::index(int arm, int covariate) const {
  if (arm < 0 || arm >= arms || covariate < 0 || covariate >= covariates)
    throw std::out_of_range("Environment: cell out of range");
  return static_cast<std::size_t>(covariate) * static_cast<std::size_t>(arms) +
         static_cast<std::size_t>(arm);
}

const OutcomeDist& Environment::cell(int arm, int covariate) const {
  return cells[index(arm, covariate)];
}

void Environment::validate() const {
  if (arms < 2) throw std::invalid_argument("Environment: need at least two arms");
  if (covariates < 1) throw std::invalid_argument("Environment: need at least one covariate cell");
  if (cells.size() != static_cast<std::size_t>(arms) * static_cast<std::size_t>(covariates))
    throw std::invalid_argument("Environment: cell grid size mismatch");
  for (const auto& c : cells) c.validate();
}

const SourcePrior& Source::prior(const Environment& env, int arm, int covariate) const {
  return cell_priors[env.index(arm, covariate)];
}

std::string model_name(ModelId id) {
  switch (id) {
    case ModelId::Model1: return "model1";
    case ModelId::Model2: return "model2";
    case ModelId::Model3: return "model3";
    case ModelId::Custom: return "custom";
  }
  return "unknown";
}

void DesignPoint::validate() const {
  environment.validate();
  if (horizon < 2) throw std::invalid_argument("DesignPoint: horizon must be >= 2");
  if (replications < 1) throw std::invalid_argument("DesignPoint: replications must be >= 1");
  if (sources.empty()) throw std::invalid_argument("DesignPoint: need at least one source");
  if (!(working.variance > 0.0))
    throw std::invalid_argument("DesignPoint: working variance must be > 0");
  for (const auto& s : sources) {
    if (s.cell_priors.size() != environment.cells.size())
      throw std::invalid_argument("DesignPoint: source '" + s.name +
                                  "' does not cover every cell");
    for (const auto& p : s.cell_priors) {
      if (!std::isfinite(p.prior_mean))
        throw std::invalid_argument("DesignPoint: prior mean must be finite");
      if (!(p.schedule.value > 0.0))
        throw std::invalid_argument("DesignPoint: schedule parameter must be > 0");
    }
  }
  if (!prior_model_probs.empty()) {
    if (prior_model_probs.size() != sources.size())
      throw std::invalid_argument("DesignPoint: prior_model_probs size mismatch");
    double total = 0.0;
    for (double p : prior_model_probs) {
      if (!(p >= 0.0)) throw std::invalid_argument("DesignPoint: prior probs must be >= 0");
      total += p;
    }
    if (std::abs(total - 1.0) > 1e-9)
      throw std::invalid_argument("DesignPoint: prior probs must sum to 1");
  }
  policy.validate();
  const int hinted = policy.arm_count_hint();
  if (hinted > 0 && hinted != environment.arms)
    throw std::invalid_argument("DesignPoint: policy arm count disagrees with environment");
  for (std::size_t i = 1; i < weight_checkpoints.size(); ++i)
    if (weight_checkpoints[i] <= weight_checkpoints[i - 1])
      throw std::invalid_argument("DesignPoint: checkpoints must be strictly increasing");
}

std::vector<double> DesignPoint::effective_prior_probs() const {
  if (!prior_model_probs.empty()) return prior_model_probs;
  return std::vector<double>(sources.size(), 1.0 / static_cast<double>(sources.size()));
}

DesignPoint build_benchmark_model(ModelId id, double e, int T) {
  if (id == ModelId::Custom)
    throw std::invalid_argument("build_benchmark_model: id must be one of the benchmark models");
  if (!(e > 0.0)) throw std::invalid_argument("build_benchmark_model: e must be > 0");
  if (T < 2 || T % 2 != 0)
    throw std::invalid_argument("build_benchmark_model: T must be a positive even horizon");

  DesignPoint d;
  d.model_id = id;
  d.evidence_scale = e;
  d.horizon = T;
  d.environment.arms = 2;
  d.environment.covariates = 1;
  d.environment.cells = {
      {OutcomeDist::Kind::Gaussian, 1.0, 1.0},
      {OutcomeDist::Kind::Gaussian, 1.3, 1.0},
  };

  const auto centered = [&](double offset, PrecisionSchedule sched,
                            std::optional<double> cap) {
    std::vector<SourcePrior> priors;
    priors.reserve(d.environment.cells.size());
    for (const auto& cell : d.environment.cells)
      priors.push_back({cell.mean + offset, sched, cap});
    return priors;
  };

  d.sources.push_back({"diffuse", centered(0.0, PrecisionSchedule::constant(1.0), 1.0)});
  if (id == ModelId::Model1 || id == ModelId::Model3)
    d.sources.push_back(
        {"unbiased", centered(0.0, PrecisionSchedule::fixed_at_design(e), std::nullopt)});
  if (id == ModelId::Model2 || id == ModelId::Model3)
    d.sources.push_back(
        {"biased", centered(1.0, PrecisionSchedule::fixed_at_design(e), std::nullopt)});

  d.policy = PolicySpec::alternating(2);
  d.replications = 1000;
  d.weight_checkpoints.assign(kBenchmarkHorizons.begin(), kBenchmarkHorizons.end());
  std::erase_if(d.weight_checkpoints, [T](int t) { return t > T; });
  d.validate();
  return d;
}

namespace {

std::vector<std::vector<double>> weights_for_all_cells(const DesignPoint& design,
                                                       const std::vector<CellStats>& stats,
                                                       const std::vector<double>& priors) {
  const auto& env = design.environment;
  std::vector<std::vector<double>> out(stats.size());
  std::vector<SourcePrior> cell_sources(design.sources.size());
  std::vector<double> nus(design.sources.size());
  for (int x = 0; x < env.covariates; ++x) {
    for (int d = 0; d < env.arms; ++d) {
      const std::size_t idx = env.index(d, x);
      for (std::size_t s = 0; s < design.sources.size(); ++s) {
        cell_sources[s] = design.sources[s].cell_priors[idx];
        nus[s] = effective_precision(cell_sources[s], stats[idx], design.horizon);
      }
      out[idx] = model_weights(stats[idx], cell_sources, design.working, nus, priors).weights;
    }
  }
  return out;
}

}  // namespace

ReplicationResult run_replication(const DesignPoint& design, int rep_index) {
  const auto& env = design.environment;
  const auto priors = design.effective_prior_probs();
  const auto rep = static_cast<std::uint64_t>(rep_index);

  std::vector<CellStats> stats(env.cells.size());
  std::vector<CounterRng> outcome_rngs;
  outcome_rngs.reserve(env.cells.size());
  for (std::size_t c = 0; c < env.cells.size(); ++c)
    outcome_rngs.push_back(make_stream(design.base_seed, StreamPurpose::Outcome, rep, c));

  std::vector<ArmHistory> histories(static_cast<std::size_t>(env.covariates),
                                    ArmHistory(env.arms));
  std::vector<CounterRng> assign_rngs;
  assign_rngs.reserve(static_cast<std::size_t>(env.covariates));
  for (int x = 0; x < env.covariates; ++x)
    assign_rngs.push_back(make_stream(design.base_seed, StreamPurpose::Assignment, rep,
                                      static_cast<std::uint64_t>(x)));

  ReplicationResult result;
  result.rep_index = rep_index;
  std::size_t next_checkpoint = 0;

  for (int t = 1; t <= design.horizon; ++t) {
    for (int x = 0; x < env.covariates; ++x) {
      auto& hist = histories[static_cast<std::size_t>(x)];
      auto& arng = assign_rngs[static_cast<std::size_t>(x)];
      const auto probs = assignment_probabilities(design.policy, hist, t, arng);
      const int d = sample_assignment(probs, arng.uniform());
      const std::size_t idx = env.index(d, x);
      const double y = env.cells[idx].sample(outcome_rngs[idx]);
      stats[idx] = record_outcome(stats[idx], y);
      hist.arms[static_cast<std::size_t>(d)] = stats[idx];
    }
    if (next_checkpoint < design.weight_checkpoints.size() &&
        design.weight_checkpoints[next_checkpoint] == t) {
      result.checkpoints.push_back({t, weights_for_all_cells(design, stats, priors)});
      ++next_checkpoint;
    }
  }

  std::vector<SourcePrior> cell_sources(design.sources.size());
  std::vector<double> nus(design.sources.size());
  std::vector<SourcePosterior> posteriors(design.sources.size());
  for (int x = 0; x < env.covariates; ++x) {
    for (int d = 0; d < env.arms; ++d) {
      const std::size_t idx = env.index(d, x);
      for (std::size_t s = 0; s < design.sources.size(); ++s) {
        cell_sources[s] = design.sources[s].cell_priors[idx];
        nus[s] = effective_precision(cell_sources[s], stats[idx], design.horizon);
        posteriors[s] = posterior_mean(stats[idx], cell_sources[s], design.working, nus[s]);
      }
      const auto w = model_weights(stats[idx], cell_sources, design.working, nus, priors);

      CellResult cell;
      cell.cell = {d, x};
      cell.count = stats[idx].count;
      cell.truth = env.truth(d, x);
      cell.bma_estimate = bma_estimate(w, posteriors);
      if (stats[idx].count > 0) cell.standard_estimate = stats[idx].sample_mean();
      cell.weights = w.weights;
      result.cells.push_back(std::move(cell));
    }
  }
  return result;
}

std::vector<ReplicationResult> run_design_serial(const DesignPoint& design) {
  design.validate();
  std::vector<ReplicationResult> results(static_cast<std::size_t>(design.replications));
  for (int r = 0; r < design.replications; ++r)
    results[static_cast<std::size_t>(r)] = run_replication(design, r);
  return results;
}

std::vector<ReplicationResult> run_design(const DesignPoint& design, int parallelism) {
  design.validate();
  if (parallelism < 1) throw std::invalid_argument("run_design: parallelism must be >= 1");
  std::vector<ReplicationResult> results(static_cast<std::size_t>(design.replications));

#ifdef _OPENMP
  std::mutex error_mutex;
  std::string first_error;
#pragma omp parallel for schedule(dynamic) num_threads(parallelism)
  for (int r = 0; r < design.replications; ++r) {
    try {
      results[static_cast<std::size_t>(r)] = run_replication(design, r);
    } catch (const std::exception& e) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (first_error.empty()) first_error = e.what();
    }
  }
  if (!first_error.empty()) throw std::runtime_error("run_design: " + first_error);
#else
  (void)parallelism;
  for (int r = 0; r < design.replications; ++r)
    results[static_cast<std::size_t>(r)] = run_replication(design, r);
#endif
  return results;
}

}  // namespace evbma
