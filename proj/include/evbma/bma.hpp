#pragma once
// Conjugate posterior updates per source, posterior model weights over
// sources, and the closed-form weight predictions used by diagnostics.
#include <span>
#include <vector>

#include "evbma/core.hpp"

namespace evbma {

struct SourcePosterior {
  double mean = 0.0;
  double precision = 0.0;
};

struct WeightVector {
  std::vector<double> weights;      // posterior model probabilities, sum to 1
  std::vector<double> log_kernels;  // source-dependent log-marginal parts
};

// Inputs to the external-validity index: a source's bias and the effective
// precision p entering its marginal likelihood.
struct EVInputs {
  double bias = 0.0;
  double p = 1.0;
};

// Posterior mean/precision for one source.  With data precision
// a = count/variance: mean = (a*m + nu*zeta0)/(a + nu), precision = a + nu.
// With no data the posterior equals the prior.
SourcePosterior posterior_mean(const CellStats& stats, const SourcePrior& source,
                               const WorkingModel& model, double nu);

// Log marginal density of the sample mean under one source, dropping the
// source-independent constant: log phi(m; zeta0, v) with v = variance/count + 1/nu.
// Requires count >= 1.
double log_marginal_kernel(const CellStats& stats, double prior_mean, double nu,
                           const WorkingModel& model);

// Normalizes exp(log_kernel + log prior) with max subtraction.
WeightVector weights_from_log_kernels(std::span<const double> log_kernels,
                                      std::span<const double> prior_model_probs);

// Posterior model probabilities across sources.  With count = 0 the marginal
// is the same constant for every source, so the weights fall back to the
// prior model probabilities exactly.
WeightVector model_weights(const CellStats& stats, std::span<const SourcePrior> sources,
                           const WorkingModel& model, std::span<const double> nus,
                           std::span<const double> prior_model_probs);

// Weight-averaged posterior mean.  Anchored at the first posterior mean so a
// run with zero dispersion across sources returns that mean exactly.
double bma_estimate(const WeightVector& weights, std::span<const SourcePosterior> posteriors);

// External-validity index E(bias, p) = -p * bias^2 + log p.
double ev_index(const EVInputs& source);

// Large-sample log-odds between two sources: (E(a) - E(b)) / 2.
double predicted_log_odds(const EVInputs& a, const EVInputs& b);

// Asymptotic order bound on a biased source's weight.  In the regime with at
// least one unbiased informative source: (nu_b / max_unbiased_nu) * exp(-nu_b
// * bias^2 / 4); with only a diffuse competitor the prefactor drops.  An
// order bound, not an equality: compare against simulation via a fitted
// constant.
double predicted_weight_bound(const EVInputs& biased, double nu_biased,
                              double max_unbiased_nu, bool diffuse_regime);

}  // namespace evbma
