#include "hetbandits/baselines.hpp"

#include <random>
#include <vector>

#include "hetbandits/bandit_core.hpp"
#include "hetbandits/errors.hpp"

namespace hetbandits {

void BaselineConfig::validate() const {
  if (horizon < 1) throw ConfigError("horizon must be >= 1");
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("delta must be in (0,1)");
  if (!(lambda > 0.0)) throw ConfigError("lambda must be positive");
  if (!(noise_sigma >= 0.0)) throw ConfigError("noise sigma must be >= 0");
}

RegretTrace independent_oful_run(const BaselineConfig& config, const Environment& env,
                                 std::int64_t first_round) {
  config.validate();
  const std::size_t n = env.n_agents();
  RegretTrace trace(n);
  std::vector<RidgeState> agents(
      n, RidgeState(env.dim(),
                    RidgeParams{config.lambda, config.noise_sigma, config.delta, 1.0}));
  for (std::int64_t t = first_round; t < first_round + config.horizon; ++t) {
    const ContextBatch batch = env.contexts(t);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t arm = agents[i].select_arm(batch);
      agents[i].update(batch.contexts[arm], env.reward(i, batch, arm));
      trace.record(i, t, Phase::kIndependent, arm, env.regret(i, batch, arm));
    }
  }
  return trace;
}

RegretTrace uniform_random_run(const BaselineConfig& config, const Environment& env,
                               std::uint64_t policy_seed, std::int64_t first_round) {
  config.validate();
  const std::size_t n = env.n_agents();
  RegretTrace trace(n);
  for (std::int64_t t = first_round; t < first_round + config.horizon; ++t) {
    const ContextBatch batch = env.contexts(t);
    std::uniform_int_distribution<std::size_t> pick(0, batch.k() - 1);
    for (std::size_t i = 0; i < n; ++i) {
      SplitMix64 rng(derive_seed(policy_seed, i, static_cast<std::uint64_t>(t)));
      const std::size_t arm = pick(rng);
      trace.record(i, t, Phase::kRandom, arm, env.regret(i, batch, arm));
    }
  }
  return trace;
}

}  // namespace hetbandits
