#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace graphtest {

using Engine = std::mt19937_64;

// SplitMix64 finaliser; used to derive independent streams from one seed.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Counter-based stream split: the seed of unit `path...` under `seed` does not
// depend on how units are scheduled across workers.
inline std::uint64_t derive_seed(std::uint64_t seed,
                                 std::initializer_list<std::uint64_t> path) {
  std::uint64_t s = mix64(seed);
  for (auto p : path) s = mix64(s ^ mix64(p + 0x632be59bd9b4e019ULL));
  return s;
}

inline Engine make_engine(std::uint64_t seed,
                          std::initializer_list<std::uint64_t> path = {}) {
  return Engine(derive_seed(seed, path));
}

}  // namespace graphtest
