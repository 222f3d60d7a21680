#pragma once

#include <cstdint>
#include <string_view>

namespace vstain {

// Counter-based generator. Draw n of a stream with key k is
// splitmix64_mix(k + (n + 1) * 0x9E3779B97F4A7C15), so any draw can be
// replayed from (key, counter) alone. Child streams are derived from a
// label or an index and never disturb the parent's counter.
//
// Derived draws:
//   uniform()  = (next_u64() >> 11) * 2^-53           in [0, 1)
//   below(n)   = floor(uniform() * n)                 in [0, n)
//   normal()   = Box-Muller on two uniforms, cosine branch
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) noexcept : key_(key) {}

  std::uint64_t key() const noexcept { return key_; }
  std::uint64_t counter() const noexcept { return counter_; }

  std::uint64_t next_u64() noexcept;
  double uniform() noexcept;
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
  std::uint64_t below(std::uint64_t n) noexcept;
  // Inclusive integer range [lo, hi].
  int between(int lo, int hi) noexcept;
  double normal() noexcept;

  CounterRng split(std::string_view label) const noexcept;
  CounterRng split(std::uint64_t index) const noexcept;

  static std::uint64_t mix(std::uint64_t z) noexcept;

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

std::uint64_t fnv1a64(std::string_view text) noexcept;

}  // namespace vstain
