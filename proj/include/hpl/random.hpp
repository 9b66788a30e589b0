#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace hpl {

// Seedable random source used by every sampler and by the solver.
//
// The engine is std::mt19937_64, but raw 64-bit draws are mapped to doubles
// explicitly instead of going through std::*_distribution, whose algorithms
// are implementation-defined. This keeps sampled point clouds and sampling
// orders bit-identical across standard libraries and builds.
class Rng {
 public:
  // One SplitMix64 mixing step decorrelates the engine states of nearby
  // seeds (raw small seeds leave mt19937_64 poorly mixed for many draws).
  explicit Rng(std::uint64_t seed) : gen_(splitmix64(seed)) {}

  static std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
  }

  std::uint64_t bits() { return gen_(); }

  // Uniform double strictly inside (0,1): ((x >> 11) + 0.5) * 2^-53.
  double uniform01() {
    return (static_cast<double>(gen_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  // Standard normal via Box-Muller; the second value of each pair is cached.
  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(kTwoPi * u2);
    has_spare_ = true;
    return r * std::cos(kTwoPi * u2);
  }

  // Uniform index in [0, n). n must be positive.
  std::size_t index(std::size_t n) {
    const auto i =
        static_cast<std::size_t>(uniform01() * static_cast<double>(n));
    return i < n ? i : n - 1;
  }

 private:
  static constexpr double kTwoPi = 6.283185307179586476925286766559;
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace hpl
