#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace jamflow {

// Derives a child seed from a root seed, a purpose tag, and up to three
// indices. Uses splitmix64 finalization over the root and an FNV-1a hash of
// the tag, so every (tag, indices) combination yields a decorrelated stream
// and the mapping is stable across platforms and runs.
std::uint64_t derive_seed(std::uint64_t root, std::string_view tag,
                          std::uint64_t a = 0, std::uint64_t b = 0,
                          std::uint64_t c = 0);

// Seeded random stream. All sampling goes through the methods below rather
// than std::uniform_*_distribution, whose output is implementation-defined;
// this keeps trajectories bit-identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform draw in [0, 1) with 53-bit resolution.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform01();
  }

  bool bernoulli(double p) { return uniform01() < p; }

  // Uniform index in {0, ..., n-1}; n must be positive.
  std::size_t uniform_index(std::size_t n);

 private:
  std::mt19937_64 engine_;
};

}  // namespace jamflow
