#pragma once

#include <cstdint>
#include <random>

// Deterministic stream splitting: every independent random consumer (restart,
// shot, noise channel, ...) derives its own generator from the master seed and
// a path of stream indices via splitmix64 mixing. Identical seeds and paths
// give identical streams regardless of scheduling.

namespace pulselab {

inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline std::uint64_t mix_stream(std::uint64_t seed) { return splitmix64(seed); }

template <typename... Ids>
std::uint64_t mix_stream(std::uint64_t seed, std::uint64_t id, Ids... rest) {
  return mix_stream(splitmix64(seed ^ splitmix64(id)), rest...);
}

template <typename... Ids>
std::mt19937_64 make_stream(std::uint64_t seed, Ids... ids) {
  return std::mt19937_64(mix_stream(seed, static_cast<std::uint64_t>(ids)...));
}

}  // namespace pulselab
