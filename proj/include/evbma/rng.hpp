#pragma once
// Counter-based random streams. Every (seed, label...) tuple derives an
// independent stream, and each draw depends only on (key, position within
// stream), so parallel and sequential execution consume identical variates.
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>

namespace evbma {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

constexpr std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ull;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBull;
  x ^= x >> 31;
  return x;
}

constexpr std::uint64_t derive_stream_key(std::uint64_t seed,
                                          std::initializer_list<std::uint64_t> words) {
  std::uint64_t h = mix64(seed + kGolden);
  for (std::uint64_t w : words) h = mix64(h ^ mix64(w + kGolden));
  return h;
}

class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) : state_(key) {}

  std::uint64_t next_u64() {
    state_ += kGolden;
    return mix64(state_);
  }

  // uniform on [0, 1)
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // uniform on (0, 1]; safe to pass through log()
  double uniform_open() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  // standard normal via Box-Muller; always consumes exactly two variates
  double normal() {
    const double u1 = uniform_open();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::uint64_t state_;
};

// Draw purposes get distinct labels so streams never collide: outcome draws
// for a cell are the same sequence no matter how much randomness the
// assignment policy consumed.
enum class StreamPurpose : std::uint64_t {
  Assignment = 0x41,
  Outcome = 0x4F,
  Diagnostic = 0x44,
};

inline CounterRng make_stream(std::uint64_t seed, StreamPurpose purpose,
                              std::uint64_t a, std::uint64_t b = 0) {
  return CounterRng(derive_stream_key(seed, {static_cast<std::uint64_t>(purpose), a, b}));
}

}  // namespace evbma
