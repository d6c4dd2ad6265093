#pragma once

#include <cstdint>

namespace qdem {

inline constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ULL;

// SplitMix64 output function.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

enum class CoinTag : std::uint64_t { keep = 0, qflip = 1 };

// Counter-based uniforms: the value at (address, tag) is draw number
// 2*address + tag of the SplitMix64 sequence started from mix64(seed).
// Nothing is consumed, so evaluating a coin or skipping it never shifts any
// other coin.
class CoinStream {
 public:
  explicit constexpr CoinStream(std::uint64_t seed) : seed_(seed), base_(mix64(seed + kGoldenGamma)) {}

  constexpr std::uint64_t seed() const { return seed_; }

  double uniform(std::uint64_t address, CoinTag tag) const {
    const std::uint64_t counter = 2 * address + static_cast<std::uint64_t>(tag) + 1;
    return static_cast<double>(mix64(base_ + counter * kGoldenGamma) >> 11) * 0x1.0p-53;
  }

 private:
  std::uint64_t seed_;
  std::uint64_t base_;
};

// Seed of the index-th sample of a batch.
constexpr std::uint64_t sample_seed(std::uint64_t base, std::uint64_t index) {
  return mix64(mix64(base) + (index + 1) * kGoldenGamma);
}

// Address layout. Letters of the staircase word (equivalently boxes of the
// triangle, in sampling order) use their zero-based index directly. Other
// lattice sites live above bit 60.
namespace address {

inline constexpr std::uint64_t kSiteSpace = 1ULL << 60;
inline constexpr std::uint64_t kResampleSpace = 2ULL << 60;

constexpr std::uint64_t site(std::uint64_t level, std::uint64_t position) {
  return kSiteSpace | (level << 30) | position;
}

constexpr std::uint64_t resample(std::uint64_t attempt, std::uint64_t level, std::uint64_t position) {
  return kResampleSpace | (attempt << 56) | (level << 28) | position;
}

}  // namespace address

}  // namespace qdem
