#include "vstain/rng.hpp"

#include <cmath>
#include <numbers>

namespace vstain {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t CounterRng::mix(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t CounterRng::next_u64() noexcept {
  ++counter_;
  return mix(key_ + counter_ * kGolden);
}

double CounterRng::uniform() noexcept {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t CounterRng::below(std::uint64_t n) noexcept {
  if (n == 0) return 0;
  auto v = static_cast<std::uint64_t>(uniform() * static_cast<double>(n));
  return v < n ? v : n - 1;
}

int CounterRng::between(int lo, int hi) noexcept {
  if (hi <= lo) return lo;
  return lo + static_cast<int>(below(static_cast<std::uint64_t>(hi - lo) + 1));
}

double CounterRng::normal() noexcept {
  const double u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(1.0 - u1));
  return r * std::cos(2.0 * std::numbers::pi * u2);
}

CounterRng CounterRng::split(std::string_view label) const noexcept {
  return CounterRng(mix(key_ ^ fnv1a64(label)));
}

CounterRng CounterRng::split(std::uint64_t index) const noexcept {
  return CounterRng(mix(key_ ^ mix(index + kGolden)));
}

std::uint64_t fnv1a64(std::string_view text) noexcept {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

}  // namespace vstain
