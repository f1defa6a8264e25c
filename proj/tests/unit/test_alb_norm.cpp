#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "hetbandits/alb_norm.hpp"

using namespace hetbandits;

namespace {

ContextBatch batch_of(std::vector<Vector> contexts) {
  ContextBatch b;
  b.contexts = std::move(contexts);
  return b;
}

}  // namespace

TEST_CASE("initial state") {
  CHECK(AlbNorm(2, 100, 0.1).epoch_len() == 10);
  CHECK(AlbNorm(2, 1, 0.1).epoch_len() == 1);
  CHECK(AlbNorm(2, 50, 0.1).epoch_len() == 8);
  const AlbNorm a(3, 100, 0.2);
  CHECK(a.epoch() == 1);
  CHECK(a.norm_estimate() == 1.0);
  CHECK(a.delta() == 0.2);
  CHECK(a.inner().params().norm_bound == 1.0);
  CHECK(a.inner().rounds() == 0);
  CHECK_THROWS_AS(AlbNorm(2, 0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(AlbNorm(2, 10, 1.0), std::invalid_argument);
}

TEST_CASE("ceil_sqrt") {
  for (std::int64_t n = 1; n <= 5000; ++n) {
    const std::int64_t r = ceil_sqrt(n);
    CHECK(r * r >= n);
    CHECK((r - 1) * (r - 1) < n);
  }
}

TEST_CASE("first step equals plain norm-bounded OFUL") {
  SplitMix64 rng(1);
  const AlbNorm a(4, 400, 0.1);
  const RidgeState plain(4, RidgeParams{1.0, 1.0, 0.1, 1.0});
  for (int i = 0; i < 50; ++i) {
    const auto b = sample_contexts(ContextMode::kCube, 6, 4, rng);
    CHECK(a.select_arm(b) == plain.select_arm(b));
  }
  CHECK(a.select_arm(batch_of({{0.1, 0.2, 0.3, 0.4}})) == 0);
}

TEST_CASE("scaling b does not change the choice among equal-norm arms with zero estimate") {
  const auto b = batch_of({{0.6, 0.0}, {0.0, 0.6}, {-0.6, 0.0}});
  for (double s : {0.1, 1.0, 10.0}) {
    RidgeState r(2, RidgeParams{1.0, 1.0, 0.1, s});
    CHECK(r.select_arm(b) == 0);
  }
}

TEST_CASE("epoch boundary: norm refinement formula") {
  SplitMix64 rng(2);
  AlbNorm a(3, 100, 0.1);
  for (int t = 0; t < 9; ++t) {
    const auto b = sample_contexts(ContextMode::kUnitBall, 1, 3, rng);
    a.observe(b.contexts[0], 0.5 * b.contexts[0][0]);
  }
  CHECK(a.epoch() == 1);
  const RidgeState before = a.inner();
  const double expected = norm(before.estimate()) +
                          before.radius() / std::sqrt(min_eigenvalue(before.design()));
  a.epoch_boundary();
  CHECK(a.norm_estimate() == doctest::Approx(expected).epsilon(1e-12));
  CHECK(a.norm_estimate() >= norm(before.estimate()));
  CHECK(a.inner().rounds() == 0);
  CHECK(a.inner().params().norm_bound == a.norm_estimate());
  CHECK(a.inner().params().delta == 0.05);

  // Fresh inner learner: theta_hat = 0, v = lambda I, so b' = radius / sqrt(lambda).
  AlbNorm fresh(3, 100, 0.1, {4.0, 1.0});
  const double r = fresh.inner().radius();
  fresh.epoch_boundary();
  CHECK(fresh.norm_estimate() == doctest::Approx(r / 2.0));
}

TEST_CASE("epoch schedule doubles") {
  AlbNorm a(2, 100, 0.4);
  CHECK(a.epoch_len() == 10);
  a.epoch_boundary();
  CHECK(a.epoch_len() == 20);
  a.epoch_boundary();
  CHECK(a.epoch_len() == 40);
  CHECK(a.delta() == doctest::Approx(0.1));

  // Boundaries are crossed by observe() when an epoch is exhausted.
  AlbNorm b(2, 16, 0.4);
  std::int64_t seen = 0;
  for (int k = 0; k < 4; ++k) {
    const std::int64_t len = b.epoch_len();
    CHECK(len == (std::int64_t{4} << k));
    CHECK(b.delta() == doctest::Approx(0.4 / (1 << k)));
    for (std::int64_t t = 0; t < len; ++t) b.observe(Vector{0.1, 0.2}, 0.0);
    seen += len;
    CHECK(b.epoch() == k + 2);
  }
  CHECK(seen == 4 + 8 + 16 + 32);
}

TEST_CASE("refined bound never drops below the estimate norm") {
  SplitMix64 rng(3);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 30; ++trial) {
    AlbNorm a(5, 400, 0.3);
    const Vector theta{g(rng) * 0.3, g(rng) * 0.3, 0.0, 0.1, -0.2};
    for (int t = 0; t < 60; ++t) {
      const auto b = sample_contexts(ContextMode::kCube, 8, 5, rng);
      const std::size_t arm = a.select_arm(b);
      const double y = dot(b.contexts[arm], theta) + g(rng);
      RidgeState last = a.inner();
      last.update(b.contexts[arm], y);
      const int epoch = a.epoch();
      a.observe(b.contexts[arm], y);
      if (a.epoch() != epoch) {
        CHECK(a.norm_estimate() >= norm(last.estimate()));
        CHECK(a.norm_estimate() ==
              doctest::Approx(norm(last.estimate()) +
                              last.radius() / std::sqrt(min_eigenvalue(last.design()))));
      }
    }
    CHECK(a.norm_estimate() > 0.0);
  }
}
