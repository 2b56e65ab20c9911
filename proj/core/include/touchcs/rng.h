#pragma once

#include <cstdint>
#include <random>

namespace touchcs {

using Rng = std::mt19937_64;

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Seed for one Monte Carlo trial. Depends only on its arguments, so a trial
// sees the same random stream regardless of which worker runs it.
constexpr std::uint64_t derive_seed(std::uint64_t master_seed,
                                    std::uint64_t experiment_id,
                                    std::uint64_t trial_index) noexcept {
  return mix64(mix64(mix64(master_seed) ^ experiment_id) ^ trial_index);
}

}  // namespace touchcs
