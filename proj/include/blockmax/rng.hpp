#pragma once

#include <cstdint>

namespace blockmax {

// Counter-based splittable generator (SplitMix64 output function).  The i-th
// draw of a stream is mix(key + i*GAMMA), so a stream is a pure function of
// (key, counter).  Child streams are derived by hashing an index into the
// key, which keeps results byte-identical no matter how work is scheduled
// across threads.  We do not use <random> distributions on top of this:
// their output is not reproducible across standard library implementations.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit constexpr Rng(std::uint64_t key) noexcept : key_(key) {}

  static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ull;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Key of a child stream.  Fold indices left to right for multi-level
  // derivations, e.g. derive(derive(seed, cell), replicate).
  static constexpr std::uint64_t derive(std::uint64_t key,
                                        std::uint64_t index) noexcept {
    return mix(key ^ mix(index + kGamma));
  }

  static constexpr std::uint64_t(min)() noexcept { return 0; }
  static constexpr std::uint64_t(max)() noexcept { return ~0ull; }

  std::uint64_t operator()() noexcept {
    counter_ += kGamma;
    return mix(key_ + counter_);
  }

  // Uniform on [0,1), 53 random bits.
  double uniform() noexcept { return double((*this)() >> 11) * 0x1.0p-53; }

  // Uniform on (0,1); safe under log().
  double uniform_pos() noexcept {
    return (double((*this)() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Unbiased integer in [0,n), n >= 1, by rejection on the top of the range.
  std::uint64_t below(std::uint64_t n) noexcept {
    const std::uint64_t threshold = (~n + 1) % n;  // 2^64 mod n
    for (;;) {
      const std::uint64_t x = (*this)();
      if (x >= threshold) return x % n;
    }
  }

 private:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ull;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace blockmax
