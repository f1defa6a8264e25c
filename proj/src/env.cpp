#include "hetbandits/env.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "hetbandits/errors.hpp"

namespace hetbandits {
namespace {

Vector gaussian_vector(std::size_t dim, SplitMix64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(dim);
  for (double& x : v) x = normal(rng);
  return v;
}

Vector unit_sphere_point(std::size_t dim, SplitMix64& rng) {
  for (;;) {
    Vector v = gaussian_vector(dim, rng);
    const double n = norm(v);
    if (n > 1e-12) return scale(v, 1.0 / n);
  }
}

void project_to_unit_ball(Vector& v) {
  const double n = norm(v);
  if (n > 1.0) {
    for (double& x : v) x /= n;
  }
}

std::vector<Vector> orthonormal_centers(std::size_t count, std::size_t dim,
                                        SplitMix64& rng) {
  std::vector<Vector> basis;
  while (basis.size() < count) {
    Vector v = gaussian_vector(dim, rng);
    for (const Vector& b : basis) {
      const double p = dot(v, b);
      for (std::size_t i = 0; i < dim; ++i) v[i] -= p * b[i];
    }
    const double n = norm(v);
    if (n < 1e-8) continue;
    basis.push_back(scale(v, 1.0 / n));
  }
  return basis;
}

Population clustered(const PopulationSpec& spec, const ClusteredSpec& c,
                     std::uint64_t seed) {
  if (c.n_clusters == 0 || c.n_clusters > spec.n_agents) {
    throw InvalidSpec("cluster count must be in [1, n_agents]");
  }
  if (!(c.zipf_z >= 0.0)) throw InvalidSpec("zipf exponent must be >= 0");
  if (c.orthogonal_centers && c.n_clusters > spec.dim) {
    throw InvalidSpec("orthogonal centers need n_clusters <= dim");
  }

  std::vector<Vector> centers;
  if (c.orthogonal_centers) {
    SplitMix64 rng(derive_seed(seed, 0));
    centers = orthonormal_centers(c.n_clusters, spec.dim, rng);
  } else {
    for (std::size_t l = 0; l < c.n_clusters; ++l) {
      SplitMix64 rng(derive_seed(seed, l));
      centers.push_back(unit_sphere_point(spec.dim, rng));
    }
  }

  Population pop;
  const auto sizes = zipf_cluster_sizes(spec.n_agents, c.n_clusters, c.zipf_z);
  for (std::size_t l = 0; l < sizes.size(); ++l) {
    for (std::size_t i = 0; i < sizes[l]; ++i) {
      pop.thetas.push_back(centers[l]);
      pop.labels.push_back(l);
    }
  }
  return pop;
}

Population personalized(const PopulationSpec& spec, const PersonalizedSpec& p,
                        std::uint64_t seed) {
  if (!(p.sigma >= 0.0)) throw InvalidSpec("sigma must be >= 0");
  SplitMix64 mean_rng(derive_seed(seed, 0));
  const Vector mu = unit_sphere_point(spec.dim, mean_rng);

  Population pop;
  pop.thetas.reserve(spec.n_agents);
  for (std::size_t i = 0; i < spec.n_agents; ++i) {
    SplitMix64 rng(derive_seed(seed, i + 1));
    Vector g = gaussian_vector(spec.dim, rng);
    Vector theta(spec.dim);
    for (std::size_t j = 0; j < spec.dim; ++j) theta[j] = mu[j] + p.sigma * g[j];
    project_to_unit_ball(theta);
    pop.thetas.push_back(std::move(theta));
  }
  return pop;
}

Population explicit_population(const ExplicitSpec& e) {
  if (e.thetas.empty()) throw InvalidSpec("explicit population is empty");
  const std::size_t dim = e.thetas.front().size();
  if (dim == 0) throw InvalidSpec("explicit vectors must be non-empty");

  Population pop;
  std::vector<Vector> distinct;
  for (const Vector& theta : e.thetas) {
    if (theta.size() != dim) throw InvalidSpec("explicit vectors differ in length");
    if (norm(theta) > 1.0 + 1e-12) throw InvalidSpec("explicit vector outside unit ball");
    auto it = std::find(distinct.begin(), distinct.end(), theta);
    if (it == distinct.end()) {
      distinct.push_back(theta);
      it = distinct.end() - 1;
    }
    pop.thetas.push_back(theta);
    pop.labels.push_back(static_cast<std::size_t>(it - distinct.begin()));
  }
  return pop;
}

}  // namespace

std::vector<std::size_t> zipf_cluster_sizes(std::size_t n_agents,
                                            std::size_t n_clusters, double z) {
  if (n_clusters == 0 || n_clusters > n_agents) {
    throw InvalidSpec("cluster count must be in [1, n_agents]");
  }
  std::vector<double> quota(n_clusters);
  double total = 0.0;
  for (std::size_t c = 0; c < n_clusters; ++c) {
    quota[c] = std::pow(static_cast<double>(c + 1), -z);
    total += quota[c];
  }
  std::vector<std::size_t> sizes(n_clusters);
  std::size_t assigned = 0;
  for (std::size_t c = 0; c < n_clusters; ++c) {
    quota[c] *= static_cast<double>(n_agents) / total;
    sizes[c] = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(quota[c])));
    assigned += sizes[c];
  }

  // Hand out what is left by largest remainder over the assigned size, lower
  // index first. Clusters raised to one agent have a negative remainder.
  std::vector<std::size_t> order(n_clusters);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return quota[a] - static_cast<double>(sizes[a]) > quota[b] - static_cast<double>(sizes[b]);
  });
  for (std::size_t i = 0; assigned < n_agents; i = (i + 1) % n_clusters) {
    ++sizes[order[i]];
    ++assigned;
  }
  // The floor of one agent can overshoot; take back from the largest cluster
  // with the highest index so sizes stay non-increasing.
  while (assigned > n_agents) {
    std::size_t victim = 0;
    for (std::size_t c = 0; c < n_clusters; ++c) {
      if (sizes[c] >= sizes[victim]) victim = c;
    }
    --sizes[victim];
    --assigned;
  }
  return sizes;
}

Population build_population(const PopulationSpec& spec, std::uint64_t seed) {
  if (std::holds_alternative<ExplicitSpec>(spec.kind)) {
    return explicit_population(std::get<ExplicitSpec>(spec.kind));
  }
  if (spec.n_agents == 0 || spec.dim == 0) {
    throw InvalidSpec("n_agents and dim must be positive");
  }
  if (const auto* c = std::get_if<ClusteredSpec>(&spec.kind)) {
    return clustered(spec, *c, seed);
  }
  return personalized(spec, std::get<PersonalizedSpec>(spec.kind), seed);
}

std::vector<double> cluster_gaps(const Population& population) {
  std::size_t n_clusters = 0;
  for (std::size_t l : population.labels) n_clusters = std::max(n_clusters, l + 1);
  std::vector<Vector> centers(n_clusters);
  for (std::size_t i = 0; i < population.labels.size(); ++i) {
    centers[population.labels[i]] = population.thetas[i];
  }
  std::vector<double> gaps(n_clusters, std::numeric_limits<double>::infinity());
  for (std::size_t a = 0; a < n_clusters; ++a) {
    for (std::size_t b = 0; b < n_clusters; ++b) {
      if (a == b) continue;
      gaps[a] = std::min(gaps[a], norm(subtract(centers[a], centers[b])));
    }
  }
  return gaps;
}

ContextBatch sample_contexts(ContextMode mode, std::size_t k, std::size_t dim,
                             SplitMix64& rng) {
  ContextBatch batch;
  batch.contexts.reserve(k);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  if (mode == ContextMode::kCube) {
    const double half_width = 1.0 / std::sqrt(static_cast<double>(dim));
    std::uniform_real_distribution<double> coord(-half_width, half_width);
    for (std::size_t j = 0; j < k; ++j) {
      Vector v(dim);
      for (double& x : v) x = coord(rng);
      batch.contexts.push_back(std::move(v));
    }
  } else {
    for (std::size_t j = 0; j < k; ++j) {
      Vector v = unit_sphere_point(dim, rng);
      const double radius = std::pow(unit(rng), 1.0 / static_cast<double>(dim));
      for (double& x : v) x *= radius;
      batch.contexts.push_back(std::move(v));
    }
  }
  return batch;
}

double reward(std::span<const double> theta, std::span<const double> context,
              double noise_sigma, SplitMix64& rng) {
  const double mean = dot(context, theta);
  if (noise_sigma == 0.0) return mean;
  std::normal_distribution<double> noise(0.0, noise_sigma);
  return mean + noise(rng);
}

std::size_t best_arm(std::span<const double> theta, const ContextBatch& batch) {
  std::size_t best = 0;
  double best_value = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < batch.k(); ++j) {
    const double v = dot(batch.contexts[j], theta);
    if (v > best_value) {
      best_value = v;
      best = j;
    }
  }
  return best;
}

double instantaneous_regret(std::span<const double> theta, const ContextBatch& batch,
                            std::size_t chosen) {
  if (chosen >= batch.k()) throw std::out_of_range("arm index out of range");
  double best = -std::numeric_limits<double>::infinity();
  for (const Vector& beta : batch.contexts) best = std::max(best, dot(beta, theta));
  return std::max(0.0, best - dot(batch.contexts[chosen], theta));
}

double tau_min(double delta, std::size_t dim, std::int64_t horizon, double rho_min) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::domain_error("delta must be in (0,1)");
  if (!(rho_min > 0.0)) throw std::domain_error("rho_min must be positive");
  if (dim == 0 || horizon <= 0) throw std::domain_error("dim and horizon must be positive");
  const double factor = 16.0 / (rho_min * rho_min) + 8.0 / (3.0 * rho_min);
  return factor * std::log(2.0 * static_cast<double>(dim) *
                           static_cast<double>(horizon) / delta);
}

// -- SyntheticEnvironment -----------------------------------------------------

SyntheticEnvironment::SyntheticEnvironment(Population population, ContextMode mode,
                                           std::size_t k_arms, double noise_sigma,
                                           const RunSeeds& seeds)
    : population_(std::move(population)),
      mode_(mode),
      k_arms_(k_arms),
      noise_sigma_(noise_sigma),
      context_seed_(seeds.stream(Stream::kContexts)),
      noise_seed_(seeds.stream(Stream::kNoise)) {
  if (k_arms_ == 0) throw InvalidSpec("need at least one arm");
  if (!(noise_sigma_ >= 0.0)) throw InvalidSpec("noise sigma must be >= 0");
}

ContextBatch SyntheticEnvironment::contexts(std::int64_t round) const {
  SplitMix64 rng(derive_seed(context_seed_, static_cast<std::uint64_t>(round)));
  ContextBatch batch = sample_contexts(mode_, k_arms_, dim(), rng);
  batch.round = round;
  return batch;
}

double SyntheticEnvironment::reward(std::size_t agent, const ContextBatch& batch,
                                    std::size_t arm) const {
  SplitMix64 rng(derive_seed(noise_seed_, agent, static_cast<std::uint64_t>(batch.round)));
  return hetbandits::reward(population_.thetas.at(agent), batch.contexts.at(arm),
                            noise_sigma_, rng);
}

double SyntheticEnvironment::regret(std::size_t agent, const ContextBatch& batch,
                                    std::size_t arm) const {
  return instantaneous_regret(population_.thetas.at(agent), batch, arm);
}

}  // namespace hetbandits
