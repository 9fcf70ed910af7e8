#pragma once
// Assignment policies for the experiment loop and an exploration-divergence
// diagnostic.  Policies are pure: all randomness comes from the caller's
// stream, so replays are exact.
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "evbma/core.hpp"
#include "evbma/rng.hpp"

namespace evbma {

struct PolicySpec {
  enum class Kind { Rct, Alternating, EpsilonGreedy, Thompson, Ucb };
  Kind kind = Kind::Rct;

  // Rct
  std::vector<double> rct_probabilities;
  // Alternating (deterministic round-robin)
  int alternating_arms = 0;
  // EpsilonGreedy: epsilon_t = min(1, epsilon0 * t^-kappa), kappa in [0, 1)
  double epsilon0 = 1.0;
  double kappa = 0.5;
  // Thompson: per-arm Gaussian reference prior
  std::vector<double> thompson_prior_means;
  std::vector<double> thompson_prior_precisions;
  // Ucb: exploration coefficient
  double rho = 1.0;

  static PolicySpec rct(std::vector<double> probabilities);
  static PolicySpec alternating(int arms);
  static PolicySpec epsilon_greedy(double epsilon0, double kappa);
  static PolicySpec thompson(std::vector<double> prior_means,
                             std::vector<double> prior_precisions);
  static PolicySpec thompson_default(int arms);  // mean 0, precision 1e-6 per arm
  static PolicySpec ucb(double rho);

  void validate() const;           // throws on invariant violations
  int arm_count_hint() const;      // arms when the policy pins them, else 0
  std::string kind_name() const;
  bool operator==(const PolicySpec&) const = default;
};

struct ArmHistory {
  std::vector<CellStats> arms;
  explicit ArmHistory(int arm_count = 0) : arms(static_cast<std::size_t>(arm_count)) {}
};

// Probability vector over arms at step t (1-based).  Thompson sampling draws
// one posterior sample per arm from the supplied stream and returns a point
// mass; the other policies consume no randomness here.
std::vector<double> assignment_probabilities(const PolicySpec& spec, const ArmHistory& history,
                                             std::int64_t t, CounterRng& rng);

// Inverse-CDF draw from a probability vector; u in [0, 1).
int sample_assignment(std::span<const double> probabilities, double u);

struct DivergenceDiagnostic {
  double partial_sum = 0.0;   // sum over steps of the minimum per-arm assignment mass
  double quarter_sum = 0.0;   // the same sum truncated at horizon/4
  bool growth_ok = false;     // doubling heuristic: partial_sum > 2 * quarter_sum
};

// Finite-horizon check that the policy keeps exploring every arm.  Exact for
// Rct/Alternating/EpsilonGreedy; Thompson and Ucb are assessed from empirical
// assignment frequencies over internal replications.  A doubling heuristic,
// not a proof; outputs are labeled accordingly.
DivergenceDiagnostic check_exploration_divergence(const PolicySpec& spec, std::int64_t horizon,
                                                  int arms);

// Lower-bound partial sums for an epsilon schedule.  Performs no kappa
// validation so degenerate schedules can be inspected directly.
DivergenceDiagnostic epsilon_schedule_partial_sums(double epsilon0, double kappa, int arms,
                                                   std::int64_t horizon);

}  // namespace evbma
