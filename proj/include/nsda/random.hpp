#pragma once

#include <cstdint>

namespace nsda {

/// SplitMix64 (Steele, Lea & Flood). Fixed 64-bit integer arithmetic, so the
/// stream is identical on every platform; the random-field contract depends
/// on this.
class SplitMix64 {
 public:
  explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  constexpr std::uint64_t next() noexcept {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  constexpr double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

/// Derives an independent stream key from a seed and two labels.
constexpr std::uint64_t mix_seed(std::uint64_t seed, std::int64_t a, std::int64_t b) noexcept {
  SplitMix64 g(seed ^ (static_cast<std::uint64_t>(a) * 0xd1b54a32d192ed03ULL));
  g.next();
  SplitMix64 h(g.next() ^ (static_cast<std::uint64_t>(b) * 0xabc98388fb8fac03ULL));
  return h.next();
}

}  // namespace nsda
