#include "evbma/core.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace evbma {

PrecisionSchedule PrecisionSchedule::constant(double nu0) {
  if (!(nu0 > 0.0)) throw std::invalid_argument("PrecisionSchedule: nu0 must be > 0");
  return {Kind::Constant, nu0};
}

PrecisionSchedule PrecisionSchedule::linear_in_arm_count(double rate) {
  if (!(rate > 0.0)) throw std::invalid_argument("PrecisionSchedule: rate must be > 0");
  return {Kind::LinearInArmCount, rate};
}

PrecisionSchedule PrecisionSchedule::fixed_at_design(double rate) {
  if (!(rate > 0.0)) throw std::invalid_argument("PrecisionSchedule: rate must be > 0");
  return {Kind::FixedAtDesign, rate};
}

bool SourcePrior::is_diffuse() const {
  return diffuse_cap.has_value() && schedule.kind == PrecisionSchedule::Kind::Constant &&
         schedule.value <= *diffuse_cap;
}

double CellStats::sample_mean() const {
  if (count < 1) throw std::logic_error("CellStats::sample_mean: no observations");
  return outcome_sum / static_cast<double>(count);
}

CellStats record_outcome(CellStats stats, double y) {
  if (!std::isfinite(y)) throw std::invalid_argument("record_outcome: outcome must be finite");
  stats.count += 1;
  stats.outcome_sum += y;
  stats.outcome_sq_sum += y * y;
  return stats;
}

double effective_precision(const SourcePrior& source, const CellStats& stats,
                           int design_horizon) {
  double nu = 0.0;
  switch (source.schedule.kind) {
    case PrecisionSchedule::Kind::Constant:
      nu = source.schedule.value;
      break;
    case PrecisionSchedule::Kind::LinearInArmCount:
      nu = source.schedule.value * static_cast<double>(stats.count);
      break;
    case PrecisionSchedule::Kind::FixedAtDesign:
      if (design_horizon < 2)
        throw std::invalid_argument("effective_precision: design horizon must be >= 2");
      nu = source.schedule.value * (static_cast<double>(design_horizon) / 2.0);
      break;
  }
  return std::max(nu, kPrecisionFloor);
}

PrecisionLimit precision_limit(const SourcePrior& source, int design_horizon) {
  (void)design_horizon;  // the limit of nu/N does not depend on where T sits
  switch (source.schedule.kind) {
    case PrecisionSchedule::Kind::Constant:
      return {0.0};
    case PrecisionSchedule::Kind::LinearInArmCount:
    case PrecisionSchedule::Kind::FixedAtDesign:
      return {source.schedule.value};
  }
  return {0.0};
}

}  // namespace evbma
