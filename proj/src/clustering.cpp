#include "hetbandits/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include "hetbandits/bandit_core.hpp"
#include "hetbandits/errors.hpp"

namespace hetbandits {
namespace {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

void sort_blocks(Partition& p) {
  std::optional<std::vector<std::size_t>> collapsed;
  if (p.collapsed_block) collapsed = p.blocks[*p.collapsed_block];
  for (auto& b : p.blocks) std::sort(b.begin(), b.end());
  std::sort(p.blocks.begin(), p.blocks.end());
  if (collapsed) {
    std::sort(collapsed->begin(), collapsed->end());
    p.collapsed_block = static_cast<std::size_t>(
        std::find(p.blocks.begin(), p.blocks.end(), *collapsed) - p.blocks.begin());
  }
}

void check_unit_interval(double v, const char* what, bool open) {
  const bool ok = open ? (v > 0.0 && v < 1.0) : (v >= 0.0 && v <= 1.0);
  if (!ok) throw ConfigError(std::string(what) + " is out of range");
}

void validate_common(double alpha, double c_explore, double delta, std::int64_t horizon,
                     double lambda, double noise_sigma, bool allow_half) {
  const bool alpha_ok = alpha > 0.0 && (alpha < 0.5 || (allow_half && alpha == 0.5));
  if (!alpha_ok) throw ConfigError("alpha must be in (0, 1/2)");
  if (!(c_explore > 0.0)) throw ConfigError("exploration constant must be positive");
  check_unit_interval(delta, "delta", true);
  if (horizon < 1) throw ConfigError("horizon must be >= 1");
  if (!(lambda > 0.0)) throw ConfigError("lambda must be positive");
  if (!(noise_sigma >= 0.0)) throw ConfigError("noise sigma must be >= 0");
}

RidgeParams learner_params(double lambda, double noise_scale, double delta) {
  return RidgeParams{lambda, noise_scale, delta, 1.0};
}

}  // namespace

Partition Partition::from_labels(std::span<const std::size_t> labels) {
  std::map<std::size_t, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < labels.size(); ++i) groups[labels[i]].push_back(i);
  Partition p;
  for (auto& [label, members] : groups) p.blocks.push_back(std::move(members));
  sort_blocks(p);
  return p;
}

Partition maximal_cluster(std::span<const Vector> estimates, double gamma, double p_star) {
  if (estimates.empty()) throw std::invalid_argument("no estimates to cluster");
  if (!(gamma >= 0.0)) throw std::invalid_argument("gamma must be >= 0");
  if (!(p_star >= 0.0 && p_star <= 1.0)) throw std::invalid_argument("p_star must be in [0,1]");

  const std::size_t n = estimates.size();
  DisjointSets sets(n);
  const double gamma_sq = gamma * gamma;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto& a = estimates[i];
      const auto& b = estimates[j];
      if (a.size() != b.size()) throw DimensionMismatch(a.size(), b.size());
      double d2 = 0.0;
      for (std::size_t k = 0; k < a.size(); ++k) d2 += (a[k] - b[k]) * (a[k] - b[k]);
      if (d2 <= gamma_sq) sets.unite(i, j);
    }
  }

  std::map<std::size_t, std::vector<std::size_t>> components;
  for (std::size_t i = 0; i < n; ++i) components[sets.find(i)].push_back(i);

  const double min_size = p_star * static_cast<double>(n);
  Partition p;
  std::vector<std::size_t> small;
  bool any_small = false;
  for (auto& [root, members] : components) {
    if (static_cast<double>(members.size()) < min_size) {
      small.insert(small.end(), members.begin(), members.end());
      any_small = true;
    } else {
      p.blocks.push_back(std::move(members));
    }
  }
  if (any_small) {
    p.blocks.push_back(std::move(small));
    p.collapsed_block = p.blocks.size() - 1;
  }
  sort_blocks(p);
  return p;
}

// -- CMLB ---------------------------------------------------------------------

void CmlbConfig::validate(bool allow_half) const {
  validate_common(alpha, c_explore, delta, horizon, lambda, noise_sigma, allow_half);
  if (!(gamma >= 0.0)) throw ConfigError("gamma must be >= 0");
  check_unit_interval(p_star, "p_star", false);
}

double default_gamma(std::size_t n_agents, std::int64_t horizon, double alpha) {
  return 3.0 / std::pow(static_cast<double>(n_agents) * static_cast<double>(horizon), alpha);
}

std::int64_t cmlb_explore_len(const CmlbConfig& config, std::size_t n_agents,
                              std::size_t dim) {
  const double nt = static_cast<double>(n_agents) * static_cast<double>(config.horizon);
  const double raw = config.c_explore * static_cast<double>(dim) *
                     std::pow(nt, 2.0 * config.alpha) * std::log(1.0 / config.delta);
  const double len = std::ceil(raw);
  if (len >= static_cast<double>(config.horizon)) return config.horizon;
  return std::max<std::int64_t>(0, static_cast<std::int64_t>(len));
}

CmlbResult cmlb_run(const CmlbConfig& config, const Environment& env,
                    std::int64_t first_round) {
  config.validate(true);
  const std::size_t n = env.n_agents();
  const std::size_t d = env.dim();

  CmlbResult result;
  result.trace = RegretTrace(n);
  result.explore_len = cmlb_explore_len(config, n, d);
  const std::int64_t last_round = first_round + config.horizon;
  const std::int64_t explore_end = first_round + result.explore_len;

  std::vector<RidgeState> agents(
      n, RidgeState(d, learner_params(config.lambda, config.noise_sigma, config.delta)));
  for (std::int64_t t = first_round; t < explore_end; ++t) {
    const ContextBatch batch = env.contexts(t);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t arm = agents[i].select_arm(batch);
      agents[i].update(batch.contexts[arm], env.reward(i, batch, arm));
      result.trace.record(i, t, Phase::kExplore, arm, env.regret(i, batch, arm));
    }
  }

  std::vector<Vector> estimates;
  estimates.reserve(n);
  for (const RidgeState& s : agents) estimates.push_back(s.estimate());
  result.partition = maximal_cluster(estimates, config.gamma, config.p_star);

  const auto& blocks = result.partition.blocks;
  std::vector<std::size_t> block_of(n);
  std::vector<RidgeState> block_learners;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    for (std::size_t i : blocks[b]) block_of[i] = b;
    const double m = static_cast<double>(blocks[b].size());
    block_learners.emplace_back(
        d, learner_params(config.lambda, config.noise_sigma / std::sqrt(m), config.delta));
  }

  std::vector<std::size_t> block_arm(blocks.size());
  for (std::int64_t t = explore_end; t < last_round; ++t) {
    const ContextBatch batch = env.contexts(t);
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      block_arm[b] = block_learners[b].select_arm(batch);
    }
    std::vector<double> reward_sum(blocks.size(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t arm = block_arm[block_of[i]];
      reward_sum[block_of[i]] += env.reward(i, batch, arm);
      result.trace.record(i, t, Phase::kCollaborate, arm, env.regret(i, batch, arm));
    }
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      const double mean = reward_sum[b] / static_cast<double>(blocks[b].size());
      block_learners[b].update(batch.contexts[block_arm[b]], mean);
    }
  }
  return result;
}

// -- SCLB ---------------------------------------------------------------------

void SclbConfig::validate(bool allow_half) const {
  validate_common(alpha, c_explore, delta, horizon, lambda, noise_sigma, allow_half);
}

std::vector<SclbPhase> sclb_schedule(const SclbConfig& config, std::size_t n_agents) {
  std::vector<SclbPhase> phases;
  std::int64_t start = 1;
  std::int64_t remaining = config.horizon;
  for (int i = 1; remaining > 0; ++i) {
    const double two_i = std::ldexp(1.0, i);
    SclbPhase ph;
    ph.index = i;
    ph.first_round = start;
    ph.length = i >= 62 ? remaining
                        : std::min<std::int64_t>(std::int64_t{1} << i, remaining);
    ph.gamma = 3.0 / std::pow(static_cast<double>(n_agents) * two_i, config.alpha);
    ph.delta = config.delta / two_i;
    ph.p_star = 1.0 / (static_cast<double>(i) * static_cast<double>(i));
    phases.push_back(ph);
    start += ph.length;
    remaining -= ph.length;
  }
  return phases;
}

SclbResult sclb_run(const SclbConfig& config, const Environment& env) {
  config.validate(true);
  SclbResult result;
  result.trace = RegretTrace(env.n_agents());
  result.phases = sclb_schedule(config, env.n_agents());
  for (const SclbPhase& ph : result.phases) {
    CmlbConfig cmlb;
    cmlb.alpha = config.alpha;
    cmlb.c_explore = config.c_explore;
    cmlb.delta = ph.delta;
    cmlb.gamma = ph.gamma;
    cmlb.p_star = ph.p_star;
    cmlb.horizon = ph.length;
    cmlb.lambda = config.lambda;
    cmlb.noise_sigma = config.noise_sigma;
    CmlbResult phase_result = cmlb_run(cmlb, env, ph.first_round);
    result.trace.append(phase_result.trace);
    result.partitions.push_back(std::move(phase_result.partition));
  }
  return result;
}

std::vector<bool> separability(std::span<const double> gaps, std::size_t n_agents,
                               std::int64_t horizon, double alpha) {
  const double threshold =
      5.0 / std::pow(static_cast<double>(n_agents) * static_cast<double>(horizon), alpha);
  std::vector<bool> out;
  out.reserve(gaps.size());
  for (double g : gaps) out.push_back(g >= threshold);
  return out;
}

}  // namespace hetbandits
