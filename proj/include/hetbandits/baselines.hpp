#pragma once

#include <cstdint>

#include "hetbandits/env.hpp"
#include "hetbandits/trace.hpp"

namespace hetbandits {

enum class BaselineKind { kIndependentOful, kUniformRandom };

struct BaselineConfig {
  std::int64_t horizon = 1000;
  double delta = 0.4;
  double lambda = 1.0;
  double noise_sigma = 1.0;

  void validate() const;
};

// One OFUL per agent, each learning only from its own rewards (LinUCB-Ind).
RegretTrace independent_oful_run(const BaselineConfig& config, const Environment& env,
                                 std::int64_t first_round = 1);

// Uniformly random arm per (agent, round), drawn from streams keyed by
// policy_seed, agent and round.
RegretTrace uniform_random_run(const BaselineConfig& config, const Environment& env,
                               std::uint64_t policy_seed, std::int64_t first_round = 1);

}  // namespace hetbandits
