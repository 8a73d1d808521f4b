#pragma once

// Counter-based uniforms: draw j of stream s is a pure function of
// (master seed, s, j), so any path can be replayed in isolation and ensemble
// output does not depend on how paths are scheduled.

#include <cstdint>

namespace symaudit {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

/// SplitMix64 output function.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Per-stream key derived from the master seed.
constexpr std::uint64_t stream_key(std::uint64_t master, std::uint64_t stream) {
  return mix64(master ^ mix64(stream * kGolden + 0x632BE59BD9B4E019ULL));
}

class CounterStream {
 public:
  CounterStream(std::uint64_t master, std::uint64_t stream) : key_(stream_key(master, stream)) {}

  std::uint64_t next_u64() { return mix64(key_ + (++counter_) * kGolden); }

  /// Uniform on (0, 1]; never returns 0, so -log(u) is finite.
  double uniform_open_left() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  std::uint64_t draws() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace symaudit
