#pragma once

// Deterministic randomness. mt19937_64 output is fully specified by the
// standard, and the uniform mappings below avoid the implementation-defined
// std::uniform_*_distribution, so identical seeds give identical streams on
// every platform.

#include <cstdint>
#include <random>
#include <string_view>

namespace steerkit {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next() { return eng_(); }

  // Uniform in [0,1) with 53 random bits.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0,n). The modulo bias is below 2^-32 for the small
  // n used here.
  std::uint32_t below(std::uint32_t n) {
    return static_cast<std::uint32_t>(next() % n);
  }

  // 1 with probability p, else 0.
  int bernoulli(double p) { return uniform01() < p ? 1 : 0; }

 private:
  std::mt19937_64 eng_;
};

// FNV-1a, used to derive named substreams from one root seed.
std::uint64_t fnv1a(std::string_view text);

// Independent stream for (seed, name); different names decorrelate via a
// splitmix64 finalizer.
Rng substream(std::uint64_t seed, std::string_view name);

}  // namespace steerkit
