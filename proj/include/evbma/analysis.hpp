#pragma once
// Replication summaries, scaled errors, and the rate/decay regressions used
// to check estimator behavior against the predicted orders.
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "evbma/bma.hpp"
#include "evbma/simulate.hpp"

namespace evbma {

struct EstimatorSummary {
  std::int64_t replications = 0;  // replications contributing (standard skips empty cells)
  double mean = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double min = 0.0;
  double max = 0.0;
};

struct CellSummary {
  CellKey cell;
  double truth = 0.0;
  double mean_count = 0.0;
  EstimatorSummary bma_scaled_error;
  std::optional<EstimatorSummary> standard_scaled_error;
  std::vector<double> mean_weights;           // per source
  std::optional<double> mean_acceleration;    // absent when no unbiased source
};

struct DesignSummary {
  int replications = 0;
  std::vector<CellSummary> cells;
};

enum class RateAxis { LogN, LogNWithEll };

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  RateAxis axis = RateAxis::LogN;
  int points = 0;
};

// sqrt(n) * |estimate - truth|
double scaled_abs_error(double estimate, double truth, std::int64_t n);

// Weight-averaged speedup over the unbiased sources:
// sum_{s in U} alpha_s / (1 + c_s)  divided by  sum_{s in U} alpha_s.
// Throws when no source is unbiased.
double acceleration_factor(const WeightVector& weights, const std::vector<bool>& unbiased,
                           std::span<const double> c_values);
double acceleration_factor(std::span<const double> weights, const std::vector<bool>& unbiased,
                           std::span<const double> c_values);

// Aggregates replication results per cell.  Reductions run over sorted
// copies, so the summary is permutation-invariant over replications,
// bit for bit.
DesignSummary summarize_design(const DesignPoint& design,
                               std::span<const ReplicationResult> results);

// OLS of log(mean biased weight) on nu * bias^2 over the leading checkpoints
// with positive weight; needs at least three.
RateFit decay_slope_fit(std::span<const double> mean_alpha, std::span<const double> nu_values,
                        double bias);

// OLS of log(mean abs error) on log N, or on log(log(N)/sqrt(N)) when
// use_ell is set; needs at least three sample sizes.
RateFit rate_regression(const std::map<std::int64_t, double>& errors_by_n, bool use_ell);

// Smallest sample size with (acceleration / eps^2) * log(1/eps) coverage,
// never below 1.
std::int64_t pac_sample_size(double epsilon, double acceleration);

// Type-7 (linear interpolation) quantile of a sorted vector.
double quantile_sorted(std::span<const double> sorted, double p);

}  // namespace evbma
