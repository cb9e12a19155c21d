#pragma once

#include <cstdint>
#include <random>

namespace ncomp {

using Rng = std::mt19937_64;

// splitmix64 finalizer, used to decorrelate per-trial seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seed for trial `i` under master seed `master`. Parallel and serial runs
// that use this rule see identical per-trial random streams.
inline std::uint64_t trial_seed(std::uint64_t master, std::uint64_t i) {
  return splitmix64(master ^ splitmix64(i + 1));
}

}  // namespace ncomp
