#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>
#include <utility>
#include <vector>

namespace polarsim {

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

// SplitMix64 finalizer.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += kGoldenGamma;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Element `index` of the SplitMix64 stream started at `base`. Used for
/// per-run seeds and per-run shuffles.
constexpr std::uint64_t mix_seed(std::uint64_t base, std::uint64_t index) {
  return splitmix64(base + index * kGoldenGamma);
}

inline constexpr std::string_view kSeedDerivation = "splitmix64(master_seed + run_index * 0x9E3779B97F4A7C15)";

/// Unbiased draw in [0, bound). std::uniform_int_distribution is not
/// specified bit-for-bit across standard libraries; this is.
inline std::uint64_t bounded_draw(std::mt19937_64& engine, std::uint64_t bound) {
  const std::uint64_t limit = std::mt19937_64::max() - (std::mt19937_64::max() % bound + 1) % bound;
  std::uint64_t x = engine();
  while (x > limit) x = engine();
  return x % bound;
}

/// Uniform double in [0, 1) from the top 53 bits.
inline double unit_draw(std::mt19937_64& engine) { return static_cast<double>(engine() >> 11) * 0x1.0p-53; }

template <class T>
void seeded_shuffle(std::vector<T>& items, std::uint64_t seed) {
  std::mt19937_64 engine(seed);
  for (std::size_t i = items.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(bounded_draw(engine, i));
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace polarsim
