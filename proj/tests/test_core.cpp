#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "evbma/core.hpp"

using namespace evbma;

TEST_CASE("cell statistics accumulate sums and counts") {
  CellStats s;
  s = record_outcome(s, 1.5);
  s = record_outcome(s, -0.5);
  s = record_outcome(s, 3.5);
  CHECK(s.count == 3);
  CHECK(s.outcome_sum == doctest::Approx(4.5));
  CHECK(s.outcome_sq_sum == doctest::Approx(1.5 * 1.5 + 0.25 + 3.5 * 3.5));
  CHECK(s.sample_mean() == doctest::Approx(1.5));
}

TEST_CASE("sample mean requires data and outcomes must be finite") {
  CellStats s;
  CHECK_THROWS_AS(s.sample_mean(), std::logic_error);
  CHECK_THROWS_AS(record_outcome(s, std::nan("")), std::invalid_argument);
  CHECK_THROWS_AS(record_outcome(s, INFINITY), std::invalid_argument);
}

TEST_CASE("schedule factories reject non-positive parameters") {
  CHECK_THROWS_AS(PrecisionSchedule::constant(0.0), std::invalid_argument);
  CHECK_THROWS_AS(PrecisionSchedule::constant(-1.0), std::invalid_argument);
  CHECK_THROWS_AS(PrecisionSchedule::linear_in_arm_count(0.0), std::invalid_argument);
  CHECK_THROWS_AS(PrecisionSchedule::fixed_at_design(-2.0), std::invalid_argument);
}

TEST_CASE("effective precision follows the schedule kind") {
  CellStats ten;
  for (int i = 0; i < 10; ++i) ten = record_outcome(ten, 0.0);
  const CellStats none;

  SourcePrior constant{0.0, PrecisionSchedule::constant(2.0), {}};
  CHECK(effective_precision(constant, none, 100) == 2.0);
  CHECK(effective_precision(constant, ten, 100) == 2.0);

  SourcePrior linear{0.0, PrecisionSchedule::linear_in_arm_count(0.5), {}};
  CHECK(effective_precision(linear, ten, 100) == 5.0);
  // before any data the precision sits at the floor instead of zero
  CHECK(effective_precision(linear, none, 100) == kPrecisionFloor);

  SourcePrior fixed{0.0, PrecisionSchedule::fixed_at_design(2.0), {}};
  CHECK(effective_precision(fixed, none, 100) == 100.0);
  CHECK(effective_precision(fixed, ten, 100) == 100.0);
  CHECK_THROWS_AS(effective_precision(fixed, ten, 0), std::invalid_argument);
}

TEST_CASE("precision limit c is the growth rate, zero for constant schedules") {
  CHECK(precision_limit({0.0, PrecisionSchedule::constant(5.0), {}}, 100).c == 0.0);
  CHECK(precision_limit({0.0, PrecisionSchedule::linear_in_arm_count(0.7), {}}, 100).c == 0.7);
  CHECK(precision_limit({0.0, PrecisionSchedule::fixed_at_design(0.7), {}}, 250).c == 0.7);
}

TEST_CASE("diffuse flag needs a constant schedule under the cap") {
  SourcePrior diffuse{1.0, PrecisionSchedule::constant(1.0), 1.0};
  CHECK(diffuse.is_diffuse());
  SourcePrior above_cap{1.0, PrecisionSchedule::constant(1.5), 1.0};
  CHECK_FALSE(above_cap.is_diffuse());
  SourcePrior growing{1.0, PrecisionSchedule::linear_in_arm_count(0.5), 1.0};
  CHECK_FALSE(growing.is_diffuse());
  SourcePrior uncapped{1.0, PrecisionSchedule::constant(1.0), {}};
  CHECK_FALSE(uncapped.is_diffuse());
}
