#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace asym {

// All randomness in the library flows through std::mt19937_64, whose output
// sequence is fixed by the standard. The standard <random> distributions are
// implementation-defined, so the draws below are done by hand to keep datasets
// bit-identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Uniform integer in [0, bound). bound must be positive.
  std::uint64_t uniform_index(std::uint64_t bound) {
    // Rejection from the largest multiple of bound below 2^64.
    const std::uint64_t limit = (~std::uint64_t{0} / bound) * bound;
    std::uint64_t x = engine_();
    while (x >= limit) x = engine_();
    return x % bound;
  }

  bool bernoulli(double p) { return uniform01() < p; }

  template <typename It>
  void shuffle(It first, It last) {
    const auto count = static_cast<std::uint64_t>(last - first);
    for (std::uint64_t i = count; i > 1; --i) {
      const std::uint64_t j = uniform_index(i);
      std::swap(first[i - 1], first[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Role tags for sub-seed derivation. Values are part of the dataset format;
// never renumber.
enum class SeedRole : std::uint64_t {
  kInstance = 1,
  kGraph = 2,
  kSource = 3,
  kBeta = 4,
  kEpidemic = 5,
  kObservation = 6,
  kInit = 7,
  kSplit = 8,
  kShuffle = 9,
};

/// Derives an independent stream seed from a master seed, a role and an index.
constexpr std::uint64_t derive_seed(std::uint64_t master, SeedRole role,
                                    std::uint64_t index = 0) {
  std::uint64_t h = splitmix64(master);
  h = splitmix64(h ^ static_cast<std::uint64_t>(role));
  return splitmix64(h ^ splitmix64(index + 0x5851f42d4c957f2dULL));
}

}  // namespace asym
