#pragma once

#include <cstdint>
#include <utility>

namespace rsens {

// SplitMix64 finalizer. All randomness in the library is a pure function of an
// explicit 64-bit seed passed through this mixer; there is no global RNG.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Seed for trial `index` of an experiment seeded with `seed`.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept {
  return mix64(mix64(seed) ^ mix64(index + 0x632BE59BD9B4E019ULL));
}

// Product sampling: the two component seeds are mix64(seed ^ L) and
// mix64(seed ^ R) with the fixed constants below.
constexpr std::uint64_t kLeftSeedTag = 0xA0761D6478BD642FULL;
constexpr std::uint64_t kRightSeedTag = 0xE7037ED1A0B428DBULL;

constexpr std::pair<std::uint64_t, std::uint64_t> split_seed(std::uint64_t seed) noexcept {
  return {mix64(seed ^ kLeftSeedTag), mix64(seed ^ kRightSeedTag)};
}

// Small sequential generator for loops that need many draws from one seed.
class SplitMix {
 public:
  explicit SplitMix(std::uint64_t seed) noexcept : state_(seed) {}

  std::uint64_t next() noexcept {
    const std::uint64_t out = mix64(state_);
    state_ += 0x9E3779B97F4A7C15ULL;
    return out;
  }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) noexcept {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(next()) * n) >> 64);
  }

 private:
  std::uint64_t state_;
};

}  // namespace rsens
