#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hetbandits/env.hpp"
#include "hetbandits/linalg.hpp"

namespace hetbandits {

struct RidgeParams {
  double lambda = 1.0;
  // Effective noise standard deviation of the rewards this learner sees;
  // sigma / sqrt(m) for rewards averaged over m agents.
  double noise_scale = 1.0;
  double delta = 0.1;
  // Upper bound S on |theta*|.
  double norm_bound = 1.0;
};

// Ridge-regression sufficient statistics behind an OFUL learner:
// v = lambda I + sum x x^T and xty = sum y x.
class RidgeState {
 public:
  RidgeState(std::size_t dim, const RidgeParams& params);

  std::size_t dim() const { return xty_.size(); }
  const RidgeParams& params() const { return params_; }
  const SpdMatrix& design() const { return v_; }
  const Vector& xty() const { return xty_; }
  long rounds() const { return t_; }

  void set_norm_bound(double s) { params_.norm_bound = s; }

  // Throws std::invalid_argument on a non-finite reward.
  void update(std::span<const double> context, double reward);

  Vector estimate() const;

  // noise_scale * sqrt(2 (log(1/delta) + (log det v - d log lambda) / 2))
  //   + sqrt(lambda) * norm_bound
  double radius() const;

  // Optimistic arm: argmax_j <b_j, offset + theta_hat> + radius * |b_j|_{v^-1}.
  // An empty offset means zero. Ties go to the lowest index. Throws
  // std::invalid_argument on an empty batch.
  std::size_t select_arm(const ContextBatch& batch, std::span<const double> offset = {}) const;

 private:
  RidgeParams params_;
  SpdMatrix v_;
  Vector xty_;
  long t_ = 0;
};

double confidence_radius(const RidgeParams& params, std::size_t dim, double log_det_v);

// -- shifted rewards ----------------------------------------------------------

// A fixed offset subtracted from every reward a learner sees.
struct ShiftVector {
  Vector gamma;
};

// y - <context, gamma>
double shifted_reward(double y, std::span<const double> context, const ShiftVector& shift);

struct ShiftedRegret {
  double r_true = 0.0;
  double r_shifted = 0.0;
  double cross_term = 0.0;
};

// Evaluates, for a fixed action sequence,
//   r_true     = sum_t max_j <b_j - X_t, theta>
//   r_shifted  = sum_t max_j <b_j - X_t, theta - gamma>
//   cross_term = sum_t <b*_t - X_t, gamma>, b*_t the theta-optimal context.
// r_true <= r_shifted + cross_term holds for every input.
ShiftedRegret shifted_regret_decomposition(std::span<const double> theta,
                                           std::span<const double> gamma,
                                           std::span<const ContextBatch> batches,
                                           std::span<const std::size_t> actions);

// Whether theta and gamma pick the same arm (lowest index on ties).
bool argmax_invariant(std::span<const double> theta, std::span<const double> gamma,
                      const ContextBatch& batch);

// The sufficient condition under which argmax_invariant must hold: every
// |b_j| <= 2 and every pairwise |<b_i - b_j, theta>| >= 4 |theta - gamma|.
bool argmax_gap_hypothesis(std::span<const double> theta, std::span<const double> gamma,
                           const ContextBatch& batch);

}  // namespace hetbandits
