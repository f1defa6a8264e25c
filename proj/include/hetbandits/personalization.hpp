#pragma once

#include <cstdint>
#include <vector>

#include "hetbandits/bandit_core.hpp"
#include "hetbandits/env.hpp"
#include "hetbandits/trace.hpp"

namespace hetbandits {

struct PmlbConfig {
  std::int64_t horizon = 1000;
  double delta = 0.4;
  double noise_sigma = 1.0;
  double lambda = 1.0;

  void validate() const;
};

// ceil(sqrt(T)), capped at T.
std::int64_t common_phase_len(std::int64_t horizon);

struct CommonEstimate {
  Vector theta_hat;
  std::int64_t rounds_used = 0;
};

struct PmlbResult {
  RegretTrace trace;
  CommonEstimate common;
  // The shift each agent's personal learner applied; all equal to
  // common.theta_hat.
  std::vector<ShiftVector> shifts;
  // ALB-Norm norm bound b of each agent at the end of the run.
  std::vector<double> final_norm_bounds;
};

// Common phase: one OFUL picks a single arm for everyone for ceil(sqrt(T))
// rounds and learns from the mean reward. Personal phase: every agent runs
// ALB-Norm on rewards shifted by the frozen common estimate and scores arms
// with the shift added back. Regret is always charged against the agent's
// true parameter.
PmlbResult pmlb_run(const PmlbConfig& config, const Environment& env,
                    std::int64_t first_round = 1);

// epsilon_i = |theta_i - mean(theta)|.
std::vector<double> common_rep_factor(const std::vector<Vector>& thetas);

}  // namespace hetbandits
