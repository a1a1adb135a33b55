#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "pitchstats/types.hpp"

namespace pitchstats {

// Deterministic random source. Draw algorithms are implemented here rather
// than taken from <random>'s distributions, whose output is
// implementation-defined; this keeps streams reproducible across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t bits() { return engine_(); }

  // Uniform on [0, 1) with 53-bit resolution.
  Scalar uniform() {
    return static_cast<Scalar>(engine_() >> 11) * 0x1.0p-53;
  }

  Scalar uniform(Scalar lo, Scalar hi) { return lo + (hi - lo) * uniform(); }

  // Unbiased integer on [0, n).
  std::uint64_t uniform_int(std::uint64_t n) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n + 1) % n;
    std::uint64_t draw;
    do {
      draw = engine_();
    } while (draw > limit);
    return draw % n;
  }

  // Standard normal via Box-Muller; the paired draw is cached.
  Scalar normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    Scalar u1;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    const Scalar u2 = uniform();
    const Scalar radius = std::sqrt(-2.0 * std::log(u1));
    const Scalar angle = 2.0 * M_PI * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  Scalar normal(Scalar mean, Scalar stddev) { return mean + stddev * normal(); }

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[uniform_int(i)]);
    }
  }

  // Independent child stream; splitmix64-style mixing keeps children
  // decorrelated from the parent and from each other.
  Rng derive(std::uint64_t stream) const {
    std::uint64_t z = seed_ + (stream + 1) * 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return Rng(z ^ (z >> 31));
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  Scalar spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace pitchstats
