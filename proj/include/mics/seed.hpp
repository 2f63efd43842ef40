#pragma once

#include <cstdint>

namespace mics {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Independent stream `stream` of a run seeded with `seed`:
///   sub_seed(seed, stream) = splitmix64(seed XOR splitmix64(stream)).
/// Everything random in a run (per-task generators, sweep replicates) draws
/// from one of these, so the same stream number yields the same numbers
/// under every policy being compared.
inline std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(seed ^ splitmix64(stream));
}

}  // namespace mics
