#pragma once

// Seed derivation for reproducible runs.
//
// Every random draw in a simulation comes from a SplitMix64 engine whose
// seed is a path in a tree rooted at the master seed:
//
//   master -> rep -> stream tag -> agent -> round
//
// Each edge applies `derive_seed(parent, index)`, a SplitMix64 finalizer over
// the parent seed and child index. Children never depend on their siblings,
// so adding agents or repetitions never perturbs existing streams, and two
// algorithms run under the same master seed observe the same contexts and
// the same per-(agent, round) noise regardless of which arms they pull.

#include <cstdint>
#include <limits>

namespace hetbandits {

class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index) {
  std::uint64_t z = parent ^ (0x9e3779b97f4a7c15ULL * (index + 1));
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  z ^= z >> 31;
  // Second round so that (parent, index) and (parent', index') collide only
  // by accident of the full 64-bit mix.
  z += 0x632be59bd9b4e019ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t a,
                                    std::uint64_t b) {
  return derive_seed(derive_seed(parent, a), b);
}

enum class Stream : std::uint64_t {
  kPopulation = 1,
  kContexts = 2,
  kNoise = 3,
  kPolicy = 4,
  kBaselinePolicy = 5,
};

// Seeds of one repetition.
struct RunSeeds {
  std::uint64_t rep_seed;

  static RunSeeds for_rep(std::uint64_t master_seed, std::uint64_t rep) {
    return RunSeeds{derive_seed(master_seed, rep)};
  }

  std::uint64_t stream(Stream s) const {
    return derive_seed(rep_seed, static_cast<std::uint64_t>(s));
  }
};

}  // namespace hetbandits
