#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace onn {

// Counter-based generator: draw i of stream s under seed k is
// splitmix64(k, s, i), so streams are independent and any draw can be
// reproduced without replaying the others. Output is identical on every
// platform (no std:: distributions involved).
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream = 0) noexcept
      : key_(mix(seed ^ (0x9E3779B97F4A7C15ULL * (stream + 1)))) {}

  std::uint64_t next_u64() noexcept { return mix(key_ + 0xD1B54A32D192ED03ULL * ++counter_); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) noexcept { return a + (b - a) * uniform(); }

  // Uniform integer in [0, bound); bound > 0.
  std::uint64_t below(std::uint64_t bound) noexcept {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(next_u64()) * bound) >> 64);
  }

  bool bernoulli(double p) noexcept { return uniform() < p; }

  // Standard normal via Box-Muller; consumes two draws.
  double normal() noexcept {
    double u1 = uniform();
    double u2 = uniform();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  std::uint64_t counter() const noexcept { return counter_; }

 private:
  static std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

// Named streams used across the library.
namespace streams {
inline constexpr std::uint64_t kGraph = 1;
inline constexpr std::uint64_t kState = 2;
inline constexpr std::uint64_t kSurgeryCoin = 3;
inline constexpr std::uint64_t kCertificate = 4;
inline constexpr std::uint64_t kDisturbance = 5;
inline constexpr std::uint64_t kWeights = 6;
}  // namespace streams

}  // namespace onn
