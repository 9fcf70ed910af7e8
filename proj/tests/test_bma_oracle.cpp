#include <doctest.h>

#include <cmath>
#include <vector>

#include "evbma/bma.hpp"
#include "evbma/rng.hpp"
#include "numeric_oracle.hpp"

using namespace evbma;

TEST_CASE("posterior mean agrees with numerical integration") {
  CellStats s;
  s = record_outcome(s, 1.0);
  s = record_outcome(s, 1.5);
  s = record_outcome(s, 2.0);
  const SourcePosterior post = posterior_mean(s, {1.0, PrecisionSchedule::constant(2.0), {}},
                                              WorkingModel{1.0}, 2.0);
  const double reference = oracle::posterior_mean(s.sample_mean(), 1.0 / 3.0, 1.0, 0.5);
  CHECK(post.mean == doctest::Approx(reference).epsilon(1e-10));
}

TEST_CASE("closed-form weights match integrated marginals across counts") {
  const WorkingModel wm{1.0};
  const std::vector<SourcePrior> sources = {
      {1.0, PrecisionSchedule::constant(0.8), {}},
      {1.9, PrecisionSchedule::constant(3.7), {}},
      {0.6, PrecisionSchedule::constant(22.0), {}},
  };
  const std::vector<double> nus = {0.8, 3.7, 22.0};
  const std::vector<double> priors = {0.5, 0.3, 0.2};

  CounterRng rng(91);
  CellStats s;
  for (int count = 1; count <= 20; ++count) {
    s = record_outcome(s, 1.0 + rng.normal());
    const WeightVector w = model_weights(s, sources, wm, nus, priors);

    std::vector<oracle::SourceSpec> specs;
    for (std::size_t k = 0; k < sources.size(); ++k)
      specs.push_back({sources[k].prior_mean, 1.0 / nus[k]});
    const double data_var = wm.variance / static_cast<double>(count);
    const auto reference = oracle::weights(s.sample_mean(), data_var, specs, priors);

    for (std::size_t k = 0; k < sources.size(); ++k) {
      INFO("count ", count, " source ", k);
      CHECK(std::abs(w.weights[k] - reference[k]) <=
            1e-6 * std::max(reference[k], 1e-300));
    }

    std::vector<SourcePosterior> posts;
    for (std::size_t k = 0; k < sources.size(); ++k)
      posts.push_back(posterior_mean(s, sources[k], wm, nus[k]));
    const double combined = bma_estimate(w, posts);
    const double combined_ref =
        oracle::averaged_mean(s.sample_mean(), data_var, specs, priors);
    CHECK(combined == doctest::Approx(combined_ref).epsilon(1e-8));
  }
}

TEST_CASE("weights against integration with a near-diffuse competitor") {
  const WorkingModel wm{1.0};
  const std::vector<SourcePrior> sources = {
      {0.0, PrecisionSchedule::constant(1e-4), {}},
      {2.5, PrecisionSchedule::constant(50.0), {}},
  };
  const std::vector<double> nus = {1e-4, 50.0};
  const std::vector<double> priors = {0.5, 0.5};

  CellStats s;
  CounterRng rng(17);
  for (int i = 0; i < 40; ++i) s = record_outcome(s, 2.0 + rng.normal());
  const WeightVector w = model_weights(s, sources, wm, nus, priors);

  const std::vector<oracle::SourceSpec> specs = {{0.0, 1e4}, {2.5, 0.02}};
  const auto reference = oracle::weights(s.sample_mean(), wm.variance / 40.0, specs, priors);
  CHECK(w.weights[0] == doctest::Approx(reference[0]).epsilon(1e-9));
  CHECK(w.weights[1] == doctest::Approx(reference[1]).epsilon(1e-9));
}
