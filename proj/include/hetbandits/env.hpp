#pragma once

#include <cstddef>
#include <cstdint>
#include <variant>
#include <vector>

#include "hetbandits/linalg.hpp"
#include "hetbandits/random.hpp"

namespace hetbandits {

// -- populations --------------------------------------------------------------

struct ClusteredSpec {
  std::size_t n_clusters = 1;
  double zipf_z = 0.0;
  // Draw a random orthonormal set of centers instead of independent points on
  // the sphere. Requires n_clusters <= dim.
  bool orthogonal_centers = false;
};

struct PersonalizedSpec {
  double sigma = 0.0;
};

struct ExplicitSpec {
  std::vector<Vector> thetas;
};

struct PopulationSpec {
  std::size_t n_agents = 1;
  std::size_t dim = 1;
  std::variant<ClusteredSpec, PersonalizedSpec, ExplicitSpec> kind;
};

struct Population {
  std::vector<Vector> thetas;
  // Cluster index per agent. Empty for personalized populations.
  std::vector<std::size_t> labels;

  std::size_t n_agents() const { return thetas.size(); }
  std::size_t dim() const { return thetas.empty() ? 0 : thetas.front().size(); }
};

// Zipf cluster sizes: cluster c (0-based) gets a share proportional to
// (c+1)^-z, rounded by largest remainder with every cluster receiving at
// least one agent.
std::vector<std::size_t> zipf_cluster_sizes(std::size_t n_agents,
                                            std::size_t n_clusters, double z);

// Throws InvalidSpec on L > N, sigma < 0, an empty or ragged explicit list,
// or explicit vectors outside the unit ball.
Population build_population(const PopulationSpec& spec, std::uint64_t seed);

// Smallest distance from each cluster's parameter to any other cluster's.
// Infinite for a population with a single cluster.
std::vector<double> cluster_gaps(const Population& population);

// -- contexts and rewards -----------------------------------------------------

enum class ContextMode { kUnitBall, kCube };

struct ContextBatch {
  std::int64_t round = 1;
  std::vector<Vector> contexts;
  // Offline replay only: the dataset item behind each arm.
  std::vector<std::size_t> items;

  std::size_t k() const { return contexts.size(); }
  std::size_t dim() const { return contexts.empty() ? 0 : contexts.front().size(); }
};

ContextBatch sample_contexts(ContextMode mode, std::size_t k, std::size_t dim,
                             SplitMix64& rng);

double reward(std::span<const double> theta, std::span<const double> context,
              double noise_sigma, SplitMix64& rng);

// Ties for the max count as optimal.
std::size_t best_arm(std::span<const double> theta, const ContextBatch& batch);

double instantaneous_regret(std::span<const double> theta, const ContextBatch& batch,
                            std::size_t chosen);

// Warm-up length [16/rho^2 + 8/(3 rho)] log(2 d T / delta) after which the
// empirical context covariance is reliably bounded below by rho_min.
double tau_min(double delta, std::size_t dim, std::int64_t horizon, double rho_min);

// -- environments -------------------------------------------------------------

// What a learner interacts with. All agents see the same batch in a round.
// Implementations are immutable after construction so agents may be stepped
// from several threads.
class Environment {
 public:
  virtual ~Environment() = default;

  virtual std::size_t n_agents() const = 0;
  virtual std::size_t dim() const = 0;
  virtual std::size_t k_arms() const = 0;

  virtual ContextBatch contexts(std::int64_t round) const = 0;
  virtual double reward(std::size_t agent, const ContextBatch& batch,
                        std::size_t arm) const = 0;
  virtual double regret(std::size_t agent, const ContextBatch& batch,
                        std::size_t arm) const = 0;
};

class SyntheticEnvironment : public Environment {
 public:
  SyntheticEnvironment(Population population, ContextMode mode, std::size_t k_arms,
                       double noise_sigma, const RunSeeds& seeds);

  std::size_t n_agents() const override { return population_.n_agents(); }
  std::size_t dim() const override { return population_.dim(); }
  std::size_t k_arms() const override { return k_arms_; }

  ContextBatch contexts(std::int64_t round) const override;
  // Noise is keyed by (agent, round) only, so it does not depend on the arm.
  double reward(std::size_t agent, const ContextBatch& batch,
                std::size_t arm) const override;
  double regret(std::size_t agent, const ContextBatch& batch,
                std::size_t arm) const override;

  const Population& population() const { return population_; }
  double noise_sigma() const { return noise_sigma_; }

 private:
  Population population_;
  ContextMode mode_;
  std::size_t k_arms_;
  double noise_sigma_;
  std::uint64_t context_seed_;
  std::uint64_t noise_seed_;
};

}  // namespace hetbandits
