#pragma once

#include <cstdint>
#include <cmath>

namespace texsynth {

// Counter-based generator (splitmix64 finalizer, "sm64-v1").  Every draw is a
// pure function of (seed, stream, counter), so banks and noise buffers are
// reproducible across platforms and independent of call order.
class CounterRng {
public:
  CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(mix(seed ^ mix(stream ^ 0x9e3779b97f4a7c15ull))) {}

  // 64 random bits for counter i.
  std::uint64_t bits(std::uint64_t i) const { return mix(key_ + i * 0x9e3779b97f4a7c15ull); }

  // uniform in [0, 1)
  double uniform(std::uint64_t i) const {
    return static_cast<double>(bits(i) >> 11) * 0x1.0p-53;
  }

  // uniform in [-a, a)
  double uniform_sym(std::uint64_t i, double a) const {
    return (2.0 * uniform(i) - 1.0) * a;
  }

  // standard normal, Box-Muller on counters (2i, 2i+1)
  double gaussian(std::uint64_t i) const {
    double u1 = 1.0 - uniform(2 * i);      // (0, 1]
    double u2 = uniform(2 * i + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }

private:
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  std::uint64_t key_;
};

} // namespace texsynth
