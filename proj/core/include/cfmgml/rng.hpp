#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace cfmgml {

// Seeded random source with hand-rolled draw functions. std::mt19937_64 is
// specified bit-for-bit by the standard; the distributions in <random> are
// not, so the draws below are spelled out to keep generated artifacts
// reproducible across standard-library versions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform integer in [0, bound). bound must be > 0. Modulo bias is
  // negligible for the small bounds used here (bag sizes, class counts).
  std::uint64_t uniform_index(std::uint64_t bound) { return engine_() % bound; }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  bool bernoulli(double p) { return uniform01() < p; }

  // Box-Muller; one value per call, the twin is discarded.
  double normal(double mean = 0.0, double stddev = 1.0) {
    double u1 = uniform01();
    double u2 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    double z = std::sqrt(-2.0 * std::log(u1)) *
               std::cos(6.283185307179586476925286766559 * u2);
    return mean + stddev * z;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace cfmgml
