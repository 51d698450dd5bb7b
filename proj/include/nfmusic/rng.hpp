#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>

#include "nfmusic/types.hpp"

namespace nfmusic {

// Stream tags keep the random draws of one trial independent of each other.
enum class Stream : std::uint64_t {
  Targets = 1,
  Combiner = 2,
  Probe = 3,
  Reflection = 4,
  Noise = 5,
  Trial = 6,
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Deterministic child seed of `seed` for the given path of indices.
inline std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = splitmix64(seed);
  for (const std::uint64_t p : path) {
    h = splitmix64(h ^ splitmix64(p + 0x632BE59BD9B4E019ULL));
  }
  return h;
}

using Engine = std::mt19937_64;

// Circular complex Gaussian with E|z|^2 = variance.
class ComplexNormal {
 public:
  explicit ComplexNormal(double variance) : normal_(0.0, std::sqrt(0.5 * variance)) {}

  Complex operator()(Engine& eng) {
    const double re = normal_(eng);
    const double im = normal_(eng);
    return {re, im};
  }

 private:
  std::normal_distribution<double> normal_;
};

}  // namespace nfmusic
