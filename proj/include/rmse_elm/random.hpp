#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace rmse_elm {

using Seed = std::uint64_t;
using Rng = std::mt19937_64;

// Fixed default master seed so that default invocations are reproducible.
inline constexpr Seed kDefaultSeed = 20140617;

// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Derives a child seed from a parent seed and a path of integer tags,
/// e.g. derive_seed(master, {group, index}). Distinct paths give
/// statistically independent streams.
constexpr Seed derive_seed(Seed parent, std::initializer_list<std::uint64_t> path) noexcept {
  std::uint64_t h = mix64(parent);
  for (std::uint64_t tag : path) h = mix64(h ^ mix64(tag + 0x632be59bd9b4e019ULL));
  return h;
}

inline Rng make_rng(Seed seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  return Rng(seq);
}

}  // namespace rmse_elm
