#include "evbma/bma.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace evbma {

namespace {

void check_nu(double nu) {
  if (!(nu > 0.0) || !std::isfinite(nu))
    throw std::invalid_argument("bma: source precision must be positive and finite");
}

void check_model(const WorkingModel& model) {
  if (!(model.variance > 0.0))
    throw std::invalid_argument("bma: working variance must be > 0");
}

}  // namespace

SourcePosterior posterior_mean(const CellStats& stats, const SourcePrior& source,
                               const WorkingModel& model, double nu) {
  check_nu(nu);
  check_model(model);
  if (stats.count == 0) return {source.prior_mean, nu};
  const double a = static_cast<double>(stats.count) / model.variance;
  const double m = stats.sample_mean();
  return {(a * m + nu * source.prior_mean) / (a + nu), a + nu};
}

double log_marginal_kernel(const CellStats& stats, double prior_mean, double nu,
                           const WorkingModel& model) {
  check_nu(nu);
  check_model(model);
  if (stats.count < 1)
    throw std::invalid_argument("log_marginal_kernel: requires at least one observation");
  const double v = model.variance / static_cast<double>(stats.count) + 1.0 / nu;
  const double d = stats.sample_mean() - prior_mean;
  return -(d * d) / (2.0 * v) - 0.5 * std::log(2.0 * std::numbers::pi * v);
}

WeightVector weights_from_log_kernels(std::span<const double> log_kernels,
                                      std::span<const double> prior_model_probs) {
  if (log_kernels.empty())
    throw std::invalid_argument("weights_from_log_kernels: no sources");
  if (log_kernels.size() != prior_model_probs.size())
    throw std::invalid_argument("weights_from_log_kernels: size mismatch");

  WeightVector out;
  out.log_kernels.assign(log_kernels.begin(), log_kernels.end());
  std::vector<double> logs(log_kernels.size());
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < logs.size(); ++s) {
    const double p = prior_model_probs[s];
    if (p < 0.0) throw std::invalid_argument("weights_from_log_kernels: negative prior prob");
    logs[s] = log_kernels[s] + std::log(p);  // log(0) = -inf gives weight 0
    top = std::max(top, logs[s]);
  }
  if (!std::isfinite(top))
    throw std::invalid_argument("weights_from_log_kernels: all prior probabilities are zero");

  out.weights.resize(logs.size());
  double total = 0.0;
  for (std::size_t s = 0; s < logs.size(); ++s) {
    out.weights[s] = std::exp(logs[s] - top);
    total += out.weights[s];
  }
  for (double& w : out.weights) w /= total;
  return out;
}

WeightVector model_weights(const CellStats& stats, std::span<const SourcePrior> sources,
                           const WorkingModel& model, std::span<const double> nus,
                           std::span<const double> prior_model_probs) {
  if (sources.empty()) throw std::invalid_argument("model_weights: no sources");
  if (sources.size() != nus.size() || sources.size() != prior_model_probs.size())
    throw std::invalid_argument("model_weights: size mismatch");

  if (stats.count == 0) {
    // No data: every source's marginal is the same constant, so the
    // posterior model probabilities equal the priors exactly.
    WeightVector out;
    out.weights.assign(prior_model_probs.begin(), prior_model_probs.end());
    out.log_kernels.assign(sources.size(), 0.0);
    return out;
  }

  std::vector<double> kernels(sources.size());
  for (std::size_t s = 0; s < sources.size(); ++s)
    kernels[s] = log_marginal_kernel(stats, sources[s].prior_mean, nus[s], model);
  return weights_from_log_kernels(kernels, prior_model_probs);
}

double bma_estimate(const WeightVector& weights, std::span<const SourcePosterior> posteriors) {
  if (posteriors.empty()) throw std::invalid_argument("bma_estimate: no posteriors");
  if (weights.weights.size() != posteriors.size())
    throw std::invalid_argument("bma_estimate: size mismatch");
  // Anchored form: equal posterior means return the common mean exactly and
  // a common shift of all means shifts the estimate by exactly that amount.
  const double anchor = posteriors[0].mean;
  double acc = 0.0;
  for (std::size_t s = 0; s < posteriors.size(); ++s)
    acc += weights.weights[s] * (posteriors[s].mean - anchor);
  return anchor + acc;
}

double ev_index(const EVInputs& source) {
  if (!(source.p > 0.0)) throw std::invalid_argument("ev_index: p must be > 0");
  return -source.p * source.bias * source.bias + std::log(source.p);
}

double predicted_log_odds(const EVInputs& a, const EVInputs& b) {
  return 0.5 * (ev_index(a) - ev_index(b));
}

double predicted_weight_bound(const EVInputs& biased, double nu_biased,
                              double max_unbiased_nu, bool diffuse_regime) {
  if (biased.bias == 0.0)
    throw std::invalid_argument("predicted_weight_bound: source is not biased");
  if (!(biased.p > 0.0)) throw std::invalid_argument("predicted_weight_bound: p must be > 0");
  check_nu(nu_biased);
  const double decay = std::exp(-0.25 * nu_biased * biased.bias * biased.bias);
  if (diffuse_regime) return decay;
  if (!(max_unbiased_nu > 0.0))
    throw std::invalid_argument("predicted_weight_bound: max unbiased precision must be > 0");
  return (nu_biased / max_unbiased_nu) * decay;
}

}  // namespace evbma
