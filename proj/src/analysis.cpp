#include "evbma/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace evbma {

double scaled_abs_error(double estimate, double truth, std::int64_t n) {
  if (n < 0) throw std::invalid_argument("scaled_abs_error: n must be >= 0");
  return std::sqrt(static_cast<double>(n)) * std::abs(estimate - truth);
}

double acceleration_factor(std::span<const double> weights, const std::vector<bool>& unbiased,
                           std::span<const double> c_values) {
  if (weights.size() != unbiased.size() || weights.size() != c_values.size())
    throw std::invalid_argument("acceleration_factor: size mismatch");
  double num = 0.0, den = 0.0, plain = 0.0;
  std::size_t members = 0;
  for (std::size_t s = 0; s < weights.size(); ++s) {
    if (!unbiased[s]) continue;
    if (!(c_values[s] >= 0.0))
      throw std::invalid_argument("acceleration_factor: c must be >= 0");
    const double inv = 1.0 / (1.0 + c_values[s]);
    num += inv * weights[s];
    den += weights[s];
    plain += inv;
    ++members;
  }
  if (members == 0)
    throw std::invalid_argument(
        "acceleration_factor: no unbiased sources (the unbiased set is empty)");
  // All unbiased mass underflowed: fall back to the unweighted average.
  if (den == 0.0) return plain / static_cast<double>(members);
  return num / den;
}

double acceleration_factor(const WeightVector& weights, const std::vector<bool>& unbiased,
                           std::span<const double> c_values) {
  return acceleration_factor(std::span<const double>(weights.weights), unbiased, c_values);
}

double quantile_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw std::invalid_argument("quantile_sorted: empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("quantile_sorted: p out of range");
  if (sorted.size() == 1) return sorted[0];
  const double h = static_cast<double>(sorted.size() - 1) * p;
  const std::size_t lo = static_cast<std::size_t>(h);
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

namespace {

// Mean over a sorted copy: fixed summation order regardless of input order.
EstimatorSummary summarize_values(std::vector<double> values) {
  EstimatorSummary s;
  s.replications = static_cast<std::int64_t>(values.size());
  if (values.empty()) return s;
  std::sort(values.begin(), values.end());
  double total = 0.0;
  for (double v : values) total += v;
  s.mean = total / static_cast<double>(values.size());
  s.q1 = quantile_sorted(values, 0.25);
  s.median = quantile_sorted(values, 0.50);
  s.q3 = quantile_sorted(values, 0.75);
  s.min = values.front();
  s.max = values.back();
  return s;
}

double sorted_mean(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  double total = 0.0;
  for (double v : values) total += v;
  return total / static_cast<double>(values.size());
}

struct OlsFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

OlsFit ols(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("ols: regressor is constant");
  OlsFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (f.intercept + f.slope * x[i]);
    ss_res += r * r;
  }
  f.r_squared = (syy == 0.0) ? (ss_res == 0.0 ? 1.0 : 0.0) : 1.0 - ss_res / syy;
  return f;
}

}  // namespace

DesignSummary summarize_design(const DesignPoint& design,
                               std::span<const ReplicationResult> results) {
  if (results.empty()) throw std::invalid_argument("summarize_design: no results");
  const auto& env = design.environment;
  const std::size_t n_cells = env.cells.size();
  const std::size_t n_sources = design.sources.size();

  // Per-cell unbiased masks and precision limits for the acceleration factor.
  std::vector<std::vector<bool>> unbiased(n_cells, std::vector<bool>(n_sources, false));
  std::vector<std::vector<double>> c_values(n_cells, std::vector<double>(n_sources, 0.0));
  std::vector<bool> any_unbiased(n_cells, false);
  for (std::size_t c = 0; c < n_cells; ++c) {
    const double truth = env.cells[c].mean;
    for (std::size_t s = 0; s < n_sources; ++s) {
      const auto& prior = design.sources[s].cell_priors[c];
      unbiased[c][s] = prior.prior_mean == truth;
      c_values[c][s] = precision_limit(prior, design.horizon).c;
      if (unbiased[c][s]) any_unbiased[c] = true;
    }
  }

  DesignSummary summary;
  summary.replications = static_cast<int>(results.size());
  for (int x = 0; x < env.covariates; ++x) {
    for (int d = 0; d < env.arms; ++d) {
      const std::size_t idx = env.index(d, x);
      std::vector<double> bma_errors, std_errors, counts, accels;
      std::vector<std::vector<double>> weight_cols(n_sources);
      bma_errors.reserve(results.size());
      for (const auto& rep : results) {
        const auto& cell = rep.cells[idx];
        if (cell.cell.treatment != d || cell.cell.covariate != x)
          throw std::logic_error("summarize_design: result layout mismatch");
        bma_errors.push_back(scaled_abs_error(cell.bma_estimate, cell.truth, cell.count));
        if (cell.standard_estimate)
          std_errors.push_back(scaled_abs_error(*cell.standard_estimate, cell.truth, cell.count));
        counts.push_back(static_cast<double>(cell.count));
        for (std::size_t s = 0; s < n_sources; ++s)
          weight_cols[s].push_back(cell.weights[s]);
        if (any_unbiased[idx])
          accels.push_back(acceleration_factor(std::span<const double>(cell.weights),
                                               unbiased[idx], c_values[idx]));
      }

      CellSummary cs;
      cs.cell = {d, x};
      cs.truth = env.truth(d, x);
      cs.mean_count = sorted_mean(std::move(counts));
      cs.bma_scaled_error = summarize_values(std::move(bma_errors));
      if (!std_errors.empty()) cs.standard_scaled_error = summarize_values(std::move(std_errors));
      for (std::size_t s = 0; s < n_sources; ++s)
        cs.mean_weights.push_back(sorted_mean(std::move(weight_cols[s])));
      if (any_unbiased[idx]) cs.mean_acceleration = sorted_mean(std::move(accels));
      summary.cells.push_back(std::move(cs));
    }
  }
  return summary;
}

RateFit decay_slope_fit(std::span<const double> mean_alpha, std::span<const double> nu_values,
                        double bias) {
  if (mean_alpha.size() != nu_values.size())
    throw std::invalid_argument("decay_slope_fit: size mismatch");
  if (bias == 0.0) throw std::invalid_argument("decay_slope_fit: bias must be nonzero");
  std::vector<double> x, y;
  for (std::size_t i = 0; i < mean_alpha.size(); ++i) {
    if (!(mean_alpha[i] > 0.0)) break;  // fit on the prefix of positive weights
    x.push_back(nu_values[i] * bias * bias);
    y.push_back(std::log(mean_alpha[i]));
  }
  if (x.size() < 3)
    throw std::invalid_argument("decay_slope_fit: fewer than 3 checkpoints with positive weight");
  const auto f = ols(x, y);
  return {f.slope, f.intercept, f.r_squared, RateAxis::LogN, static_cast<int>(x.size())};
}

RateFit rate_regression(const std::map<std::int64_t, double>& errors_by_n, bool use_ell) {
  if (errors_by_n.size() < 3)
    throw std::invalid_argument("rate_regression: need at least 3 sample sizes");
  std::vector<double> x, y;
  for (const auto& [n, err] : errors_by_n) {
    if (n < 2) throw std::invalid_argument("rate_regression: sample sizes must be >= 2");
    if (!(err > 0.0)) throw std::invalid_argument("rate_regression: errors must be positive");
    const double dn = static_cast<double>(n);
    x.push_back(use_ell ? std::log(std::log(dn) / std::sqrt(dn)) : std::log(dn));
    y.push_back(std::log(err));
  }
  const auto f = ols(x, y);
  return {f.slope, f.intercept, f.r_squared,
          use_ell ? RateAxis::LogNWithEll : RateAxis::LogN, static_cast<int>(x.size())};
}

std::int64_t pac_sample_size(double epsilon, double acceleration) {
  if (!(epsilon > 0.0) || epsilon >= 1.0)
    throw std::invalid_argument("pac_sample_size: epsilon must lie in (0,1)");
  if (!(acceleration > 0.0) || acceleration > 1.0)
    throw std::invalid_argument("pac_sample_size: acceleration must lie in (0,1]");
  const double raw = (acceleration / (epsilon * epsilon)) * std::log(1.0 / epsilon);
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(raw)));
}

}  // namespace evbma
