#include "hetbandits/personalization.hpp"

#include <cmath>

#include "hetbandits/alb_norm.hpp"
#include "hetbandits/errors.hpp"

namespace hetbandits {

void PmlbConfig::validate() const {
  if (horizon < 1) throw ConfigError("horizon must be >= 1");
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("delta must be in (0,1)");
  if (!(noise_sigma >= 0.0)) throw ConfigError("noise sigma must be >= 0");
  if (!(lambda > 0.0)) throw ConfigError("lambda must be positive");
}

std::int64_t common_phase_len(std::int64_t horizon) {
  return std::min(ceil_sqrt(horizon), horizon);
}

PmlbResult pmlb_run(const PmlbConfig& config, const Environment& env,
                    std::int64_t first_round) {
  config.validate();
  const std::size_t n = env.n_agents();
  const std::size_t d = env.dim();
  const std::int64_t common_len = common_phase_len(config.horizon);
  const std::int64_t common_end = first_round + common_len;
  const std::int64_t last_round = first_round + config.horizon;

  PmlbResult result;
  result.trace = RegretTrace(n);

  RidgeState common(d, RidgeParams{config.lambda,
                                   config.noise_sigma / std::sqrt(static_cast<double>(n)),
                                   config.delta, 1.0});
  for (std::int64_t t = first_round; t < common_end; ++t) {
    const ContextBatch batch = env.contexts(t);
    const std::size_t arm = common.select_arm(batch);
    double reward_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      reward_sum += env.reward(i, batch, arm);
      result.trace.record(i, t, Phase::kCommon, arm, env.regret(i, batch, arm));
    }
    common.update(batch.contexts[arm], reward_sum / static_cast<double>(n));
  }
  result.common = CommonEstimate{common.estimate(), common_len};

  const std::int64_t personal_len = config.horizon - common_len;
  result.shifts.assign(n, ShiftVector{result.common.theta_hat});
  if (personal_len == 0) {
    result.final_norm_bounds.assign(n, 1.0);
    return result;
  }

  std::vector<AlbNorm> learners(
      n, AlbNorm(d, personal_len, config.delta, {config.lambda, config.noise_sigma}));
  for (std::int64_t t = common_end; t < last_round; ++t) {
    const ContextBatch batch = env.contexts(t);
    for (std::size_t i = 0; i < n; ++i) {
      // The learner models theta_i - theta_hat*; the shift is added back when
      // scoring arms so the agent optimizes its own reward.
      const std::size_t arm = learners[i].select_arm(batch, result.shifts[i].gamma);
      const auto& played = batch.contexts[arm];
      const double y = env.reward(i, batch, arm);
      learners[i].observe(played, shifted_reward(y, played, result.shifts[i]));
      result.trace.record(i, t, Phase::kPersonal, arm, env.regret(i, batch, arm));
    }
  }
  for (const AlbNorm& l : learners) result.final_norm_bounds.push_back(l.norm_estimate());
  return result;
}

std::vector<double> common_rep_factor(const std::vector<Vector>& thetas) {
  if (thetas.empty()) return {};
  Vector mean(thetas.front().size(), 0.0);
  for (const Vector& t : thetas) mean = add(mean, t);
  mean = scale(mean, 1.0 / static_cast<double>(thetas.size()));
  std::vector<double> eps;
  eps.reserve(thetas.size());
  for (const Vector& t : thetas) eps.push_back(norm(subtract(t, mean)));
  return eps;
}

}  // namespace hetbandits
