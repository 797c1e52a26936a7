#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <string_view>
#include <vector>

namespace flavornet {

using Rng = std::mt19937_64;

namespace detail {

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t fnv1a(std::string_view s) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace detail

/// Child seed for a named pipeline stage. Every random choice in the library
/// takes its seed from this derivation so that runs are reproducible from one
/// 64-bit root seed: child = mix(mix(parent ^ hash(stage)) + index).
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::string_view stage,
                                    std::uint64_t index = 0) noexcept {
  return detail::splitmix64(detail::splitmix64(parent ^ detail::fnv1a(stage)) + index);
}

/// Indices of `count` elements drawn uniformly without replacement from
/// [0, population), returned in ascending order.
inline std::vector<std::size_t> sample_indices(std::size_t population, std::size_t count,
                                               std::uint64_t seed) {
  std::vector<std::size_t> idx(population);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  Rng rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);
  idx.resize(std::min(count, population));
  std::sort(idx.begin(), idx.end());
  return idx;
}

}  // namespace flavornet
