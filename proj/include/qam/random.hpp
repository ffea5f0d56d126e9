#pragma once

// Counter-based normal deviates: the value for (seed, stream, counter) does
// not depend on evaluation order, so threaded and serial runs agree bitwise.

#include <cmath>
#include <cstdint>

#include "qam/params.hpp"

namespace qam {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t bits(std::uint64_t stream, std::uint64_t counter) const {
    return splitmix64(splitmix64(splitmix64(seed_) ^ stream) ^ counter);
  }

  /// Uniform in the open interval (0, 1).
  double uniform(std::uint64_t stream, std::uint64_t counter) const {
    return (static_cast<double>(bits(stream, counter) >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller on counters 2c and 2c+1.
  double normal(std::uint64_t stream, std::uint64_t counter) const {
    const double u1 = uniform(stream, 2 * counter);
    const double u2 = uniform(stream, 2 * counter + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
  }

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
};

}  // namespace qam
