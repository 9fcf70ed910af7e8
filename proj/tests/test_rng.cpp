#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <set>
#include <vector>

#include "evbma/rng.hpp"

using namespace evbma;

TEST_CASE("counter stream matches the splitmix64 reference outputs") {
  CounterRng rng(0);
  CHECK(rng.next_u64() == 0xE220A8397B1DCDAFull);
  CHECK(rng.next_u64() == 0x6E789E6AA1B965F4ull);
  CHECK(rng.next_u64() == 0x06C45D188009454Full);
}

TEST_CASE("identical keys replay identical sequences") {
  CounterRng a = make_stream(42, StreamPurpose::Outcome, 7, 3);
  CounterRng b = make_stream(42, StreamPurpose::Outcome, 7, 3);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("streams with different labels do not collide") {
  std::set<std::uint64_t> keys;
  for (std::uint64_t seed : {0ull, 1ull, 42ull})
    for (auto purpose : {StreamPurpose::Assignment, StreamPurpose::Outcome})
      for (std::uint64_t a = 0; a < 4; ++a)
        for (std::uint64_t b = 0; b < 4; ++b)
          keys.insert(derive_stream_key(
              seed, {static_cast<std::uint64_t>(purpose), a, b}));
  CHECK(keys.size() == 3u * 2u * 4u * 4u);

  CounterRng x = make_stream(1, StreamPurpose::Outcome, 0);
  CounterRng y = make_stream(1, StreamPurpose::Outcome, 1);
  int same = 0;
  for (int i = 0; i < 64; ++i)
    if (x.next_u64() == y.next_u64()) ++same;
  CHECK(same == 0);
}

TEST_CASE("uniform stays in [0,1) and is unbiased") {
  CounterRng rng(12345);
  const int n = 100000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  // 4 sigma for the mean of n uniforms
  CHECK(std::abs(sum / n - 0.5) < 4.0 / std::sqrt(12.0 * n));
}

TEST_CASE("uniform_open never returns zero") {
  CounterRng rng(6);
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform_open();
    REQUIRE(u > 0.0);
    REQUIRE(u <= 1.0);
    REQUIRE(std::isfinite(std::log(u)));
  }
}

TEST_CASE("normal draws have standard moments") {
  CounterRng rng(777);
  const int n = 200000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    sum += z;
    sq += z * z;
  }
  const double mean = sum / n;
  const double var = sq / n - mean * mean;
  CHECK(std::abs(mean) < 4.0 / std::sqrt(static_cast<double>(n)));
  CHECK(std::abs(var - 1.0) < 4.0 * std::sqrt(2.0 / n));
}
