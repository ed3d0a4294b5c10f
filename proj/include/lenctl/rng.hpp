#pragma once

#include <cstdint>
#include <random>

namespace lenctl {

// Portable random source for the simulator and samplers.
//
// The engine is std::mt19937_64, whose output sequence is fixed by the C++
// standard. Uniform doubles are derived from the top 53 bits of one engine
// draw, so results do not depend on a standard library's distribution
// implementation.
//
// Stream splitting: run `i` under base seed `s` is seeded with the i-th output
// (0-based) of SplitMix64 started at `s`, i.e.
//   splitmix64_mix(s + (i + 1) * 0x9E3779B97F4A7C15).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t splitmix64_mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t stream_seed(std::uint64_t base_seed, std::uint64_t stream) {
  return splitmix64_mix(base_seed + (stream + 1) * kGoldenGamma);
}

}  // namespace lenctl
