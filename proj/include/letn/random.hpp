#pragma once

// Seeded randomness. Every stochastic component owns an Rng derived from a
// single master seed through child_seed().

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace letn {

using Rng = std::mt19937_64;

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline constexpr std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// child = splitmix64(master ^ splitmix64(fnv1a64(component) + index)).
inline constexpr std::uint64_t child_seed(std::uint64_t master, std::string_view component, std::uint64_t index = 0) {
  return splitmix64(master ^ splitmix64(fnv1a64(component) + index));
}

inline Rng make_rng(std::uint64_t master, std::string_view component, std::uint64_t index = 0) {
  return Rng(child_seed(master, component, index));
}

/// Uniform integer in [0, n) by rejection; n must be > 0. Independent of
/// the standard library's distribution implementations.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t n) {
  const std::uint64_t threshold = (0 - n) % n;
  for (;;) {
    std::uint64_t x = rng();
    if (x >= threshold) return x % n;
  }
}

inline double uniform_unit(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

template <class T>
void shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(uniform_below(rng, i));
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace letn
