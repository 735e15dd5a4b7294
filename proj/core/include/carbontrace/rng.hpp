#pragma once

#include <cstdint>

namespace carbontrace {

/// Counter-based pseudo-random stream derived from (master seed, stream
/// index). Identical (seed, index) pairs reproduce the identical sample
/// sequence no matter which thread consumes them or in which order streams
/// are created. One stream is assigned per Monte Carlo scenario.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream)
      : state_(mix(seed + 0x9e3779b97f4a7c15ull) ^
               mix(stream * 0xbf58476d1ce4e5b9ull + 0x94d049bb133111ebull)) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ull;
    return mix(state_);
  }

  /// Uniform double in [0, 1), 53 random bits.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
};

}  // namespace carbontrace
