#include "evbma/policies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace evbma {

PolicySpec PolicySpec::rct(std::vector<double> probabilities) {
  PolicySpec s;
  s.kind = Kind::Rct;
  s.rct_probabilities = std::move(probabilities);
  s.validate();
  return s;
}

PolicySpec PolicySpec::alternating(int arms) {
  PolicySpec s;
  s.kind = Kind::Alternating;
  s.alternating_arms = arms;
  s.validate();
  return s;
}

PolicySpec PolicySpec::epsilon_greedy(double epsilon0, double kappa) {
  PolicySpec s;
  s.kind = Kind::EpsilonGreedy;
  s.epsilon0 = epsilon0;
  s.kappa = kappa;
  s.validate();
  return s;
}

PolicySpec PolicySpec::thompson(std::vector<double> prior_means,
                                std::vector<double> prior_precisions) {
  PolicySpec s;
  s.kind = Kind::Thompson;
  s.thompson_prior_means = std::move(prior_means);
  s.thompson_prior_precisions = std::move(prior_precisions);
  s.validate();
  return s;
}

PolicySpec PolicySpec::thompson_default(int arms) {
  return thompson(std::vector<double>(static_cast<std::size_t>(arms), 0.0),
                  std::vector<double>(static_cast<std::size_t>(arms), 1e-6));
}

PolicySpec PolicySpec::ucb(double rho) {
  PolicySpec s;
  s.kind = Kind::Ucb;
  s.rho = rho;
  s.validate();
  return s;
}

void PolicySpec::validate() const {
  switch (kind) {
    case Kind::Rct: {
      if (rct_probabilities.size() < 2)
        throw std::invalid_argument("PolicySpec: rct needs at least two arms");
      double total = 0.0;
      for (double p : rct_probabilities) {
        if (!(p >= 0.0) || p > 1.0)
          throw std::invalid_argument("PolicySpec: rct probabilities must lie in [0,1]");
        total += p;
      }
      if (std::abs(total - 1.0) > 1e-9)
        throw std::invalid_argument("PolicySpec: rct probabilities must sum to 1");
      break;
    }
    case Kind::Alternating:
      if (alternating_arms < 2)
        throw std::invalid_argument("PolicySpec: alternating needs at least two arms");
      break;
    case Kind::EpsilonGreedy:
      if (!(epsilon0 > 0.0))
        throw std::invalid_argument("PolicySpec: epsilon0 must be > 0");
      if (!(kappa >= 0.0) || kappa >= 1.0)
        throw std::invalid_argument(
            "PolicySpec: kappa must lie in [0,1) so exploration mass diverges");
      break;
    case Kind::Thompson: {
      if (thompson_prior_means.size() < 2 ||
          thompson_prior_means.size() != thompson_prior_precisions.size())
        throw std::invalid_argument("PolicySpec: thompson needs matching per-arm priors");
      for (double p : thompson_prior_precisions)
        if (!(p > 0.0))
          throw std::invalid_argument("PolicySpec: thompson prior precisions must be > 0");
      break;
    }
    case Kind::Ucb:
      if (!(rho > 0.0)) throw std::invalid_argument("PolicySpec: rho must be > 0");
      break;
  }
}

int PolicySpec::arm_count_hint() const {
  switch (kind) {
    case Kind::Rct:
      return static_cast<int>(rct_probabilities.size());
    case Kind::Alternating:
      return alternating_arms;
    case Kind::Thompson:
      return static_cast<int>(thompson_prior_means.size());
    default:
      return 0;
  }
}

std::string PolicySpec::kind_name() const {
  switch (kind) {
    case Kind::Rct: return "rct";
    case Kind::Alternating: return "alternating";
    case Kind::EpsilonGreedy: return "epsilon_greedy";
    case Kind::Thompson: return "thompson";
    case Kind::Ucb: return "ucb";
  }
  return "unknown";
}

namespace {

// Index of the empirically best arm; unexplored arms count as best ties and
// all ties break toward the lowest index.
std::size_t best_arm(const std::vector<CellStats>& arms) {
  std::size_t best = 0;
  double best_mean = -std::numeric_limits<double>::infinity();
  bool best_unseen = false;
  for (std::size_t d = 0; d < arms.size(); ++d) {
    const bool unseen = arms[d].count == 0;
    const double mean = unseen ? 0.0 : arms[d].sample_mean();
    if (unseen) {
      if (!best_unseen) {
        best = d;
        best_unseen = true;
      }
    } else if (!best_unseen && mean > best_mean) {
      best = d;
      best_mean = mean;
    }
  }
  return best;
}

}  // namespace

std::vector<double> assignment_probabilities(const PolicySpec& spec, const ArmHistory& history,
                                             std::int64_t t, CounterRng& rng) {
  if (t < 1) throw std::invalid_argument("assignment_probabilities: t must be >= 1");
  const std::size_t arms = history.arms.size();
  if (arms < 2) throw std::invalid_argument("assignment_probabilities: need at least two arms");

  std::vector<double> probs(arms, 0.0);
  switch (spec.kind) {
    case PolicySpec::Kind::Rct: {
      if (spec.rct_probabilities.size() != arms)
        throw std::invalid_argument("assignment_probabilities: rct arm count mismatch");
      return spec.rct_probabilities;
    }
    case PolicySpec::Kind::Alternating: {
      probs[static_cast<std::size_t>((t - 1) % static_cast<std::int64_t>(arms))] = 1.0;
      return probs;
    }
    case PolicySpec::Kind::EpsilonGreedy: {
      const double eps =
          std::min(1.0, spec.epsilon0 * std::pow(static_cast<double>(t), -spec.kappa));
      const double base = eps / static_cast<double>(arms);
      std::fill(probs.begin(), probs.end(), base);
      probs[best_arm(history.arms)] += 1.0 - eps;
      return probs;
    }
    case PolicySpec::Kind::Thompson: {
      if (spec.thompson_prior_means.size() != arms)
        throw std::invalid_argument("assignment_probabilities: thompson arm count mismatch");
      std::size_t pick = 0;
      double best = -std::numeric_limits<double>::infinity();
      for (std::size_t d = 0; d < arms; ++d) {
        const double p0 = spec.thompson_prior_precisions[d];
        const double m0 = spec.thompson_prior_means[d];
        const double n = static_cast<double>(history.arms[d].count);
        const double prec = p0 + n;
        const double mean =
            (n > 0.0) ? (p0 * m0 + history.arms[d].outcome_sum) / prec : m0;
        const double draw = mean + rng.normal() / std::sqrt(prec);
        if (draw > best) {
          best = draw;
          pick = d;
        }
      }
      probs[pick] = 1.0;
      return probs;
    }
    case PolicySpec::Kind::Ucb: {
      std::size_t pick = 0;
      double best = -std::numeric_limits<double>::infinity();
      for (std::size_t d = 0; d < arms; ++d) {
        const double n = static_cast<double>(history.arms[d].count);
        const double index =
            (n == 0.0) ? std::numeric_limits<double>::infinity()
                       : history.arms[d].sample_mean() +
                             spec.rho * std::sqrt(2.0 * std::log(static_cast<double>(t)) / n);
        if (index > best) {
          best = index;
          pick = d;
        }
      }
      probs[pick] = 1.0;
      return probs;
    }
  }
  throw std::logic_error("assignment_probabilities: unhandled policy kind");
}

int sample_assignment(std::span<const double> probabilities, double u) {
  if (probabilities.empty()) throw std::invalid_argument("sample_assignment: empty vector");
  if (!(u >= 0.0) || u >= 1.0)
    throw std::invalid_argument("sample_assignment: u must lie in [0,1)");
  double cum = 0.0;
  for (std::size_t d = 0; d < probabilities.size(); ++d) {
    cum += probabilities[d];
    if (u < cum) return static_cast<int>(d);
  }
  return static_cast<int>(probabilities.size()) - 1;  // guards rounding shortfall
}

namespace {

DivergenceDiagnostic finish(double partial, double quarter) {
  return {partial, quarter, partial > 2.0 * quarter};
}

}  // namespace

DivergenceDiagnostic epsilon_schedule_partial_sums(double epsilon0, double kappa, int arms,
                                                   std::int64_t horizon) {
  if (arms < 2) throw std::invalid_argument("epsilon_schedule_partial_sums: need >= 2 arms");
  if (horizon < 4) throw std::invalid_argument("epsilon_schedule_partial_sums: horizon too short");
  const std::int64_t quarter_at = horizon / 4;
  double partial = 0.0, quarter = 0.0;
  for (std::int64_t i = 1; i <= horizon; ++i) {
    const double eps = std::min(1.0, epsilon0 * std::pow(static_cast<double>(i), -kappa));
    partial += eps / static_cast<double>(arms);
    if (i == quarter_at) quarter = partial;
  }
  return finish(partial, quarter);
}

DivergenceDiagnostic check_exploration_divergence(const PolicySpec& spec, std::int64_t horizon,
                                                  int arms) {
  spec.validate();
  if (horizon < 100)
    throw std::invalid_argument("check_exploration_divergence: horizon must be >= 100");
  const int hinted = spec.arm_count_hint();
  if (hinted > 0) arms = hinted;
  if (arms < 2) throw std::invalid_argument("check_exploration_divergence: need >= 2 arms");

  switch (spec.kind) {
    case PolicySpec::Kind::Rct: {
      const double lb = *std::min_element(spec.rct_probabilities.begin(),
                                          spec.rct_probabilities.end());
      return finish(lb * static_cast<double>(horizon),
                    lb * static_cast<double>(horizon / 4));
    }
    case PolicySpec::Kind::Alternating: {
      const double lb = 1.0 / static_cast<double>(arms);
      return finish(lb * static_cast<double>(horizon),
                    lb * static_cast<double>(horizon / 4));
    }
    case PolicySpec::Kind::EpsilonGreedy:
      return epsilon_schedule_partial_sums(spec.epsilon0, spec.kappa, arms, horizon);
    case PolicySpec::Kind::Thompson:
    case PolicySpec::Kind::Ucb:
      break;  // handled below via empirical frequencies
  }

  // Empirical lower envelope: run the policy against a fixed synthetic
  // environment and accumulate, per step, the least-assigned arm's frequency
  // across replications.
  constexpr int kReps = 64;
  constexpr std::uint64_t kSeed = 0xD1A6;
  std::vector<ArmHistory> histories(kReps, ArmHistory(arms));
  std::vector<CounterRng> rngs;
  rngs.reserve(kReps);
  for (int r = 0; r < kReps; ++r)
    rngs.push_back(make_stream(kSeed, StreamPurpose::Diagnostic, static_cast<std::uint64_t>(r)));

  const std::int64_t quarter_at = horizon / 4;
  double partial = 0.0, quarter = 0.0;
  std::vector<int> picks(static_cast<std::size_t>(arms));
  for (std::int64_t t = 1; t <= horizon; ++t) {
    std::fill(picks.begin(), picks.end(), 0);
    for (int r = 0; r < kReps; ++r) {
      const auto probs = assignment_probabilities(spec, histories[r], t, rngs[r]);
      const int d = sample_assignment(probs, rngs[r].uniform());
      picks[static_cast<std::size_t>(d)] += 1;
      // mildly separated Gaussian arms keep the exploit pressure realistic
      const double y = (d == 0 ? 0.0 : 0.3) + rngs[r].normal();
      histories[r].arms[static_cast<std::size_t>(d)] =
          record_outcome(histories[r].arms[static_cast<std::size_t>(d)], y);
    }
    const int least = *std::min_element(picks.begin(), picks.end());
    partial += static_cast<double>(least) / static_cast<double>(kReps);
    if (t == quarter_at) quarter = partial;
  }
  return finish(partial, quarter);
}

}  // namespace evbma
