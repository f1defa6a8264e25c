#include "hetbandits/bandit_core.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "hetbandits/errors.hpp"

namespace hetbandits {

RidgeState::RidgeState(std::size_t dim, const RidgeParams& params)
    : params_(params), v_(SpdMatrix::identity(dim, params.lambda)), xty_(dim, 0.0) {
  if (dim == 0) throw std::invalid_argument("ridge dimension must be positive");
  if (!(params.lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
  if (!(params.delta > 0.0 && params.delta < 1.0)) {
    throw std::invalid_argument("delta must be in (0,1)");
  }
}

void RidgeState::update(std::span<const double> context, double reward) {
  if (context.size() != dim()) throw DimensionMismatch(dim(), context.size());
  if (!std::isfinite(reward)) throw std::invalid_argument("reward is not finite");
  v_.add_outer(context);
  for (std::size_t i = 0; i < xty_.size(); ++i) xty_[i] += reward * context[i];
  ++t_;
}

Vector RidgeState::estimate() const { return solve(v_, xty_); }

double confidence_radius(const RidgeParams& params, std::size_t dim, double log_det_v) {
  const double info =
      0.5 * (log_det_v - static_cast<double>(dim) * std::log(params.lambda));
  const double inner = std::log(1.0 / params.delta) + std::max(0.0, info);
  return params.noise_scale * std::sqrt(2.0 * inner) +
         std::sqrt(params.lambda) * params.norm_bound;
}

double RidgeState::radius() const {
  return confidence_radius(params_, dim(), log_det(v_));
}

std::size_t RidgeState::select_arm(const ContextBatch& batch,
                                   std::span<const double> offset) const {
  if (batch.k() == 0) throw std::invalid_argument("empty context batch");
  if (batch.dim() != dim()) throw DimensionMismatch(dim(), batch.dim());
  if (!offset.empty() && offset.size() != dim()) throw DimensionMismatch(dim(), offset.size());

  const Cholesky chol(v_);
  Vector theta_hat = chol.solve(xty_);
  if (!offset.empty()) theta_hat = add(theta_hat, offset);
  const double r = confidence_radius(params_, dim(), chol.log_det());

  std::size_t best = 0;
  double best_ucb = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < batch.k(); ++j) {
    const auto& beta = batch.contexts[j];
    const double ucb = dot(beta, theta_hat) + r * std::sqrt(chol.inverse_quadratic(beta));
    if (ucb > best_ucb) {
      best_ucb = ucb;
      best = j;
    }
  }
  return best;
}

// -- shifted rewards ----------------------------------------------------------

double shifted_reward(double y, std::span<const double> context, const ShiftVector& shift) {
  return y - dot(context, shift.gamma);
}

namespace {

double max_gap(std::span<const double> direction, const ContextBatch& batch,
               std::span<const double> played) {
  const double base = dot(played, direction);
  double best = -std::numeric_limits<double>::infinity();
  for (const Vector& beta : batch.contexts) best = std::max(best, dot(beta, direction) - base);
  return best;
}

}  // namespace

ShiftedRegret shifted_regret_decomposition(std::span<const double> theta,
                                           std::span<const double> gamma,
                                           std::span<const ContextBatch> batches,
                                           std::span<const std::size_t> actions) {
  if (batches.size() != actions.size()) {
    throw std::invalid_argument("batches and actions differ in length");
  }
  const Vector residual = subtract(theta, gamma);
  ShiftedRegret out;
  for (std::size_t t = 0; t < batches.size(); ++t) {
    const ContextBatch& batch = batches[t];
    if (actions[t] >= batch.k()) throw std::out_of_range("action index out of range");
    const Vector& played = batch.contexts[actions[t]];
    out.r_true += max_gap(theta, batch, played);
    out.r_shifted += max_gap(residual, batch, played);
    const Vector& optimal = batch.contexts[best_arm(theta, batch)];
    out.cross_term += dot(optimal, gamma) - dot(played, gamma);
  }
  return out;
}

bool argmax_invariant(std::span<const double> theta, std::span<const double> gamma,
                      const ContextBatch& batch) {
  return best_arm(theta, batch) == best_arm(gamma, batch);
}

bool argmax_gap_hypothesis(std::span<const double> theta, std::span<const double> gamma,
                           const ContextBatch& batch) {
  const double bound = 4.0 * norm(subtract(theta, gamma));
  for (std::size_t i = 0; i < batch.k(); ++i) {
    if (norm(batch.contexts[i]) > 2.0) return false;
    for (std::size_t j = i + 1; j < batch.k(); ++j) {
      const double gap = dot(subtract(batch.contexts[i], batch.contexts[j]), theta);
      if (std::abs(gap) < bound) return false;
    }
  }
  return true;
}

}  // namespace hetbandits
