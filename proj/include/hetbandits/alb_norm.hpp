#pragma once

#include <cstdint>

#include "hetbandits/bandit_core.hpp"

namespace hetbandits {

// Adaptive-norm linear bandit. Runs norm-bounded OFUL in doubling epochs;
// at each epoch boundary the norm bound b is replaced by an upper bound on
// the largest parameter norm inside the current confidence ellipsoid,
//
//   b' = |theta_hat| + radius / sqrt(lambda_min(v)),
//
// the epoch length doubles, delta halves, and the inner learner restarts.
class AlbNorm {
 public:
  struct Params {
    double lambda = 1.0;
    double noise_scale = 1.0;
  };

  // Epoch 1 has length ceil(sqrt(horizon)), b_1 = 1 and delta_1.
  AlbNorm(std::size_t dim, std::int64_t horizon, double delta1, const Params& params);
  AlbNorm(std::size_t dim, std::int64_t horizon, double delta1)
      : AlbNorm(dim, horizon, delta1, Params{}) {}

  int epoch() const { return epoch_; }
  double norm_estimate() const { return b_; }
  std::int64_t epoch_len() const { return epoch_len_; }
  std::int64_t rounds_in_epoch() const { return rounds_in_epoch_; }
  double delta() const { return delta_; }
  const RidgeState& inner() const { return inner_; }

  std::size_t select_arm(const ContextBatch& batch, std::span<const double> offset = {}) const {
    return inner_.select_arm(batch, offset);
  }

  // Feeds one observation; crosses into the next epoch once the current one
  // is exhausted.
  void observe(std::span<const double> context, double reward);

  // Norm refinement, schedule doubling and inner reset.
  void epoch_boundary();

 private:
  RidgeParams inner_params() const;

  Params params_;
  int epoch_ = 1;
  double b_ = 1.0;
  std::int64_t epoch_len_;
  std::int64_t rounds_in_epoch_ = 0;
  double delta_;
  RidgeState inner_;
};

std::int64_t ceil_sqrt(std::int64_t n);

}  // namespace hetbandits
