#pragma once

#include <cstdint>
#include <random>

namespace spde {

/// Master seed of an experiment.
struct RngSeed {
  std::uint64_t master = 0;
};

/// SplitMix64 finalizer.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  std::uint64_t z = x + 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// derive(parent, counter) = splitmix64(parent ^ splitmix64(counter)).
/// Every stream in the library is a chain of derive() calls from the master
/// seed, so a stream depends only on its counters and never on execution
/// order:
///   replication r      : derive(master, r)
///   mode (k, l) of rep : derive(derive(derive(master, r), k), l)
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t counter) {
  return splitmix64(parent ^ splitmix64(counter));
}

constexpr std::uint64_t replication_seed(RngSeed seed, std::uint64_t rep_index) {
  return derive_seed(seed.master, rep_index);
}

constexpr std::uint64_t mode_seed(std::uint64_t rep_seed, int k, int l) {
  return derive_seed(derive_seed(rep_seed, static_cast<std::uint64_t>(k)),
                     static_cast<std::uint64_t>(l));
}

using Engine = std::mt19937_64;

}  // namespace spde
