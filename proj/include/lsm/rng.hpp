#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace lsm {

// Stream derivation: every construction task gets a child seed computed from
// its parent seed and a small integer tag through the SplitMix64 finalizer.
// Child streams are therefore independent of the order in which tasks run.
namespace stream {
inline constexpr std::uint64_t kReservoirLabels = 1;
inline constexpr std::uint64_t kReservoirEdges = 2;
inline constexpr std::uint64_t kInputWiring = 3;
inline constexpr std::uint64_t kDataset = 4;
inline constexpr std::uint64_t kTemplates = 5;
inline constexpr std::uint64_t kFolds = 6;
inline constexpr std::uint64_t kReservoir = 7;
inline constexpr std::uint64_t kGridPoint = 8;
}  // namespace stream

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t tag) noexcept {
  return splitmix64(parent ^ splitmix64(tag + 0x632BE59BD9B4E019ULL));
}

template <typename... Tags>
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t tag, Tags... rest) noexcept {
  return derive_seed(derive_seed(parent, tag), static_cast<std::uint64_t>(rest)...);
}

/// Portable random source. The engine output is fixed by the C++ standard;
/// all distributions are implemented here so results do not depend on the
/// standard library vendor.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Unbiased integer in [0, n).
  std::uint64_t uniform_index(std::uint64_t n) {
    const std::uint64_t limit = (~std::uint64_t{0}) - (~std::uint64_t{0}) % n;
    std::uint64_t x = engine_();
    while (x >= limit) x = engine_();
    return x % n;
  }

  double exponential(double rate) { return -std::log1p(-uniform()) / rate; }

  template <typename T>
  void shuffle(std::span<T> values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(uniform_index(i));
      std::swap(values[i - 1], values[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace lsm
