#pragma once

#include <cmath>
#include <cstdint>

namespace cyclephase {

// splitmix64 finalizer; full avalanche on 64 bits.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Counter-based generator: every draw is a pure function of
// (seed, stream, counter), so draws are addressable, order-independent and
// reproducible when split across workers.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream)
      : base_(mix64(mix64(seed) ^ stream)) {}

  std::uint64_t bits(std::uint64_t counter) const { return mix64(base_ ^ counter); }

  // Uniform on the open interval (0, 1); never returns 0 or 1.
  double uniform01(std::uint64_t counter) const {
    return (static_cast<double>(bits(counter) >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(std::uint64_t counter, double lo, double hi) const {
    return lo + (hi - lo) * uniform01(counter);
  }

  // Standard normal via Box-Muller; consumes counters 2c and 2c+1.
  double normal(std::uint64_t counter) const {
    const double u1 = uniform01(2 * counter);
    const double u2 = uniform01(2 * counter + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
  }

 private:
  static constexpr double kPi = 3.14159265358979323846;
  std::uint64_t base_;
};

}  // namespace cyclephase
