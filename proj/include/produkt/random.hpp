#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace produkt {

/// splitmix64 finalizer; used both as a stream generator and as a mixer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : text) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Per-task stream seed: (top-level seed, task label, task index) hashed
/// together. Every randomized routine draws from a stream derived this way.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::string_view label,
                                    std::uint64_t index = 0) {
  return mix64(mix64(seed ^ fnv1a(label)) + mix64(index + 0x632be59bd9b4e019ULL));
}

/// Small portable generator (splitmix64). The standard distributions are
/// implementation-defined, so bounded draws use `below` instead.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform integer in [0, bound) by rejection; bound must be positive.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = -bound % bound;  // 2^64 mod bound
    for (;;) {
      const std::uint64_t r = next();
      if (r >= limit) return r % bound;
    }
  }

  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

/// `count` distinct values from [0, universe), in draw order (partial
/// Fisher-Yates over a lazily materialized identity map).
inline std::vector<std::uint32_t> sample_without_replacement(
    Rng& rng, std::uint32_t universe, std::uint32_t count) {
  std::vector<std::uint32_t> pool(universe);
  for (std::uint32_t i = 0; i < universe; ++i) pool[i] = i;
  if (count > universe) count = universe;
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto j = i + static_cast<std::uint32_t>(rng.below(universe - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(count);
  return pool;
}

}  // namespace produkt
