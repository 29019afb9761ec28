#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <utility>

namespace glyphocr {

/// splitmix64 finalizer; the mixing step behind all keyed streams.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t mix_keys(std::initializer_list<std::uint64_t> keys) noexcept {
  std::uint64_t h = 0x6A09E667F3BCC908ULL;
  for (std::uint64_t k : keys) h = mix64(h ^ mix64(k));
  return h;
}

/// Counter-based generator: the n-th draw is mix64(key + n), so a stream is a
/// pure function of its key and can be recreated anywhere.
class KeyedStream {
 public:
  explicit KeyedStream(std::uint64_t key) noexcept : key_(key) {}

  std::uint64_t next() noexcept { return mix64(key_ + 0x9E3779B97F4A7C15ULL * ++counter_); }

  /// Uniform in [0, 1) with 53 bits of mantissa.
  double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Portable helpers over std::mt19937_64: the standard fixes the engine's
/// output sequence but not the distributions, so these are spelled out.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) {
  // Rejection sampling keeps the index unbiased.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x = rng();
  while (x >= limit) x = rng();
  return static_cast<std::size_t>(x % n);
}

template <typename T>
void shuffle_in_place(std::span<T> items, std::mt19937_64& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::swap(items[i - 1], items[uniform_index(rng, i)]);
  }
}

}  // namespace glyphocr
