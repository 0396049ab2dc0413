#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace cogecon {

using Rng = std::mt19937_64;

// splitmix64 finalizer; used to derive independent child seeds.
constexpr std::uint64_t mix_seed(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Deterministic seed for a (parent, path...) tuple, so that e.g. every test
// trial of every measurement gets its own stream regardless of how long the
// previous trials ran.
inline std::uint64_t derive_seed(std::uint64_t parent,
                                 std::initializer_list<std::uint64_t> path) {
  std::uint64_t s = mix_seed(parent);
  for (auto p : path) s = mix_seed(s ^ mix_seed(p + 0x632be59bd9b4e019ULL));
  return s;
}

inline double uniform01(Rng& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

inline bool coin(Rng& rng, double p_heads) {
  if (p_heads <= 0.0) return false;
  if (p_heads >= 1.0) return true;
  return uniform01(rng) < p_heads;
}

}  // namespace cogecon
