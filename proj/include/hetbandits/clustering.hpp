#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "hetbandits/env.hpp"
#include "hetbandits/linalg.hpp"
#include "hetbandits/trace.hpp"

namespace hetbandits {

// Disjoint cover of agent indices. Each block is sorted; blocks are ordered by
// their smallest member.
struct Partition {
  std::vector<std::vector<std::size_t>> blocks;
  // Index into `blocks` of the block formed by merging small components.
  std::optional<std::size_t> collapsed_block;

  // Partition equality that ignores which block was collapsed.
  bool same_blocks(const Partition& other) const { return blocks == other.blocks; }

  static Partition from_labels(std::span<const std::size_t> labels);
};

// Threshold-graph clustering: i ~ j iff |theta_i - theta_j| <= gamma;
// connected components smaller than p_star * N merge into one collapsed
// block. Throws std::invalid_argument on an empty estimate list or out of
// range gamma / p_star.
Partition maximal_cluster(std::span<const Vector> estimates, double gamma, double p_star);

struct CmlbConfig {
  double alpha = 0.2;
  double c_explore = 0.2;
  double delta = 0.4;
  double gamma = 0.0;
  double p_star = 0.0;
  std::int64_t horizon = 1000;
  double lambda = 1.0;
  // Noise level the learners assume for a single agent's reward.
  double noise_sigma = 1.0;

  // Throws ConfigError. `allow_half` admits alpha = 1/2 exactly.
  void validate(bool allow_half = false) const;
};

// gamma = 3 / (N T)^alpha, the threshold under which alpha-separable clusters
// are recovered.
double default_gamma(std::size_t n_agents, std::int64_t horizon, double alpha);

// ceil(c * d * (N T)^(2 alpha) * ln(1/delta)), capped at T.
std::int64_t cmlb_explore_len(const CmlbConfig& config, std::size_t n_agents,
                              std::size_t dim);

struct CmlbResult {
  RegretTrace trace;
  Partition partition;
  std::int64_t explore_len = 0;
};

// Individual OFUL per agent for the exploration rounds, clustering of the
// final estimates, then one OFUL per block fed with the block's mean reward
// for the remaining rounds. Rounds are numbered from first_round.
CmlbResult cmlb_run(const CmlbConfig& config, const Environment& env,
                    std::int64_t first_round = 1);

struct SclbConfig {
  double alpha = 0.2;
  double c_explore = 0.2;
  double delta = 0.4;
  std::int64_t horizon = 1000;
  double lambda = 1.0;
  double noise_sigma = 1.0;

  void validate(bool allow_half = false) const;
};

struct SclbPhase {
  int index = 1;
  std::int64_t first_round = 1;
  std::int64_t length = 0;
  double gamma = 0.0;
  double delta = 0.0;
  double p_star = 0.0;
};

// Phase i (from 1) lasts min(2^i, remaining) rounds with
// gamma = 3 / (N 2^i)^alpha, delta_i = delta / 2^i and p* = 1 / i^2.
std::vector<SclbPhase> sclb_schedule(const SclbConfig& config, std::size_t n_agents);

struct SclbResult {
  RegretTrace trace;
  std::vector<SclbPhase> phases;
  std::vector<Partition> partitions;
};

// Runs an independent CMLB per scheduled phase.
SclbResult sclb_run(const SclbConfig& config, const Environment& env);

// Cluster i is alpha-separable iff gap_i >= 5 / (N T)^alpha.
std::vector<bool> separability(std::span<const double> gaps, std::size_t n_agents,
                               std::int64_t horizon, double alpha);

}  // namespace hetbandits
