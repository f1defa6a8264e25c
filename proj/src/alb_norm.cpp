#include "hetbandits/alb_norm.hpp"

#include <cmath>
#include <stdexcept>

namespace hetbandits {

std::int64_t ceil_sqrt(std::int64_t n) {
  if (n <= 0) return 0;
  auto r = static_cast<std::int64_t>(std::sqrt(static_cast<double>(n)));
  while (r * r > n) --r;
  while (r * r < n) ++r;
  return r;
}

AlbNorm::AlbNorm(std::size_t dim, std::int64_t horizon, double delta1,
                 const Params& params)
    : params_(params),
      epoch_len_(ceil_sqrt(horizon)),
      delta_(delta1),
      inner_(dim, inner_params()) {
  if (horizon < 1) throw std::invalid_argument("ALB-Norm horizon must be >= 1");
  if (!(delta1 > 0.0 && delta1 < 1.0)) throw std::invalid_argument("delta must be in (0,1)");
}

RidgeParams AlbNorm::inner_params() const {
  return RidgeParams{params_.lambda, params_.noise_scale, delta_, b_};
}

void AlbNorm::observe(std::span<const double> context, double reward) {
  inner_.update(context, reward);
  if (++rounds_in_epoch_ >= epoch_len_) epoch_boundary();
}

void AlbNorm::epoch_boundary() {
  const double theta_norm = norm(inner_.estimate());
  b_ = theta_norm + inner_.radius() / std::sqrt(min_eigenvalue(inner_.design()));
  epoch_len_ *= 2;
  delta_ /= 2.0;
  ++epoch_;
  rounds_in_epoch_ = 0;
  inner_ = RidgeState(inner_.dim(), inner_params());
}

}  // namespace hetbandits
