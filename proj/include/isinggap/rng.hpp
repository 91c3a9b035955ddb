// Deterministic random number plumbing shared by every sampler.
//
// The engine is std::mt19937_64, whose output sequence is pinned by the C++
// standard.  We deliberately avoid std::uniform_*_distribution (their mappings
// are implementation-defined) and use the fixed mappings below, so identical
// seeds give identical streams on any conforming platform.

#pragma once

#include <cstdint>
#include <random>

namespace isinggap {

// SplitMix64 finalizer with the published constants.  Bijective on 64-bit
// words, so (master, ordinal) -> seed is injective in the ordinal for any
// fixed master (ordinal * gamma is injective mod 2^64, gamma odd).
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t ordinal) {
  std::uint64_t z = master + ordinal * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t bits() { return eng_(); }

  // Uniform in [0,1) with 53 random bits.
  double uniform() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0,n).  Multiply-shift mapping; the O(n / 2^64) bias
  // is irrelevant at simulation scale and the mapping is fully portable.
  int below(int n) {
    return static_cast<int>(
        (static_cast<unsigned __int128>(eng_()) * static_cast<unsigned>(n)) >> 64);
  }

  // Fair +1/-1.
  int pm_one() { return (eng_() >> 63) ? 1 : -1; }

 private:
  std::mt19937_64 eng_;
};

}  // namespace isinggap
