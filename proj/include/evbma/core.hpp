#pragma once
// Cell bookkeeping and prior-source descriptions shared by the whole library.
#include <cstdint>
#include <optional>

namespace evbma {

struct CellKey {
  int treatment = 0;
  int covariate = 0;
  bool operator==(const CellKey&) const = default;
};

// Gaussian working likelihood; variance is configurable, default 1.
struct WorkingModel {
  double variance = 1.0;
  bool operator==(const WorkingModel&) const = default;
};

// How a source's precision evolves with the experiment:
//   Constant         -> nu0 forever (a diffuse source keeps a small constant)
//   LinearInArmCount -> nu = rate * N_t(d,x), grows with the data
//   FixedAtDesign    -> nu = rate * (T/2), set once from the design horizon
struct PrecisionSchedule {
  enum class Kind { Constant, LinearInArmCount, FixedAtDesign };
  Kind kind = Kind::Constant;
  double value = 1.0;  // nu0 for Constant, rate otherwise

  static PrecisionSchedule constant(double nu0);
  static PrecisionSchedule linear_in_arm_count(double rate);
  static PrecisionSchedule fixed_at_design(double rate);
  bool operator==(const PrecisionSchedule&) const = default;
};

struct SourcePrior {
  double prior_mean = 0.0;
  PrecisionSchedule schedule;
  // When set, the source is declared diffuse if its schedule is Constant
  // with nu0 <= diffuse_cap.
  std::optional<double> diffuse_cap;

  bool is_diffuse() const;
  bool operator==(const SourcePrior&) const = default;
};

// Sufficient statistics for one (treatment, covariate) cell.
struct CellStats {
  std::int64_t count = 0;
  double outcome_sum = 0.0;
  double outcome_sq_sum = 0.0;

  double sample_mean() const;  // requires count >= 1
  bool operator==(const CellStats&) const = default;
};

// Limit of nu/N as the arm count grows; 0 for constant-precision sources.
struct PrecisionLimit {
  double c = 0.0;
};

// Guards degenerate precisions (e.g. LinearInArmCount before any data).
inline constexpr double kPrecisionFloor = 1e-6;

// Returns updated statistics; rejects non-finite outcomes.
CellStats record_outcome(CellStats stats, double y);

double effective_precision(const SourcePrior& source, const CellStats& stats,
                           int design_horizon);

PrecisionLimit precision_limit(const SourcePrior& source, int design_horizon);

}  // namespace evbma
