#pragma once

#include <cstdint>
#include <vector>

#include "vstain/img/image.hpp"

namespace vstain::testing {

// Independent SplitMix64 replay used to check the library generator.
inline std::uint64_t splitmix_draw(std::uint64_t key, std::uint64_t counter) {
  std::uint64_t z = key + counter * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline double splitmix_uniform(std::uint64_t key, std::uint64_t counter) {
  return static_cast<double>(splitmix_draw(key, counter) >> 11) / 9007199254740992.0;
}

// Small deterministic LCG for test fixtures, unrelated to the library RNG.
class Lcg {
 public:
  explicit Lcg(std::uint64_t seed) : state_(seed * 2862933555777941757ULL + 3037000493ULL) {}
  std::uint64_t next() {
    state_ = state_ * 6364136223846793005ULL + 1442695040888963407ULL;
    return state_ >> 17;
  }
  double uniform() { return static_cast<double>(next() % 1000003) / 1000003.0; }
  int below(int n) { return static_cast<int>(next() % static_cast<std::uint64_t>(n)); }

 private:
  std::uint64_t state_;
};

inline img::ImageGrid random_image(Lcg& rng, int w, int h) {
  std::vector<double> v(static_cast<std::size_t>(w) * h);
  for (auto& x : v) x = rng.uniform();
  return img::ImageGrid(w, h, std::move(v));
}

inline img::ImageGrid constant_image(int w, int h, double c) {
  return img::ImageGrid(w, h, std::vector<double>(static_cast<std::size_t>(w) * h, c));
}

}  // namespace vstain::testing
