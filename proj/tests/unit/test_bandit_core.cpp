#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "hetbandits/bandit_core.hpp"
#include "hetbandits/errors.hpp"

using namespace hetbandits;

namespace {

ContextBatch batch_of(std::vector<Vector> contexts) {
  ContextBatch b;
  b.contexts = std::move(contexts);
  return b;
}

Vector random_unit(std::size_t d, SplitMix64& rng) {
  std::normal_distribution<double> g;
  Vector v(d);
  for (double& x : v) x = g(rng);
  return scale(v, 1.0 / norm(v));
}

}  // namespace

TEST_CASE("update and estimate examples") {
  RidgeState s(2, RidgeParams{});
  s.update(Vector{0, 0}, 5.0);
  CHECK(s.estimate() == Vector{0, 0});

  RidgeState one(2, RidgeParams{});
  one.update(Vector{1, 0}, 2.0);
  CHECK(one.estimate()[0] == doctest::Approx(1.0));
  CHECK(one.estimate()[1] == doctest::Approx(0.0));

  RidgeState two(2, RidgeParams{});
  two.update(Vector{1, 0}, 1.0);
  two.update(Vector{1, 0}, 1.0);
  CHECK(two.estimate()[0] == doctest::Approx(2.0 / 3.0));
  CHECK(two.rounds() == 2);

  CHECK_THROWS_AS(two.update(Vector{1, 0}, std::numeric_limits<double>::quiet_NaN()),
                  std::invalid_argument);
  CHECK_THROWS_AS(two.update(Vector{1, 0, 0}, 1.0), DimensionMismatch);
}

TEST_CASE("design matrix reconstructs from the observations") {
  SplitMix64 rng(1);
  std::normal_distribution<double> g;
  RidgeState s(3, RidgeParams{0.5, 1.0, 0.1, 1.0});
  std::vector<double> v(9, 0.0);
  for (int i = 0; i < 3; ++i) v[i * 4] = 0.5;
  Vector xty(3, 0.0);
  for (int t = 0; t < 10; ++t) {
    const Vector x{g(rng), g(rng), g(rng)};
    const double y = g(rng);
    s.update(x, y);
    for (int i = 0; i < 3; ++i) {
      xty[i] += y * x[i];
      for (int j = 0; j < 3; ++j) v[i * 3 + j] += x[i] * x[j];
    }
  }
  for (int i = 0; i < 3; ++i) {
    CHECK(s.xty()[i] == doctest::Approx(xty[i]).epsilon(1e-12));
    for (int j = 0; j < 3; ++j) {
      CHECK(s.design()(i, j) == doctest::Approx(v[i * 3 + j]).epsilon(1e-12));
    }
  }
}

TEST_CASE("select_arm examples") {
  RidgeState fresh(2, RidgeParams{});
  CHECK(fresh.select_arm(batch_of({{0.9, 0}, {0.1, 0}})) == 0);
  CHECK(fresh.select_arm(batch_of({{0.1, 0}, {0.9, 0}})) == 1);
  CHECK(fresh.select_arm(batch_of({{0.3, 0}})) == 0);
  CHECK_THROWS_AS(fresh.select_arm(ContextBatch{}), std::invalid_argument);

  // Ties go to the lowest index.
  CHECK(fresh.select_arm(batch_of({{0, 0.5}, {0.5, 0}})) == 0);

  RidgeState s(2, RidgeParams{1.0, 1.0, 0.1, 1.0});
  s.update(Vector{1, 0}, 1.0);
  s.update(Vector{0, 1}, 0.0);
  CHECK(s.estimate()[0] == doctest::Approx(0.5));
  CHECK(s.estimate()[1] == doctest::Approx(0.0));
  CHECK(s.select_arm(batch_of({{1, 0}, {0, 1}})) == 0);
  CHECK(s.select_arm(batch_of({{0, 1}, {1, 0}})) == 1);
}

TEST_CASE("select_arm greedy limit") {
  // Zero noise and zero norm bound give radius 0, so the learner is greedy on
  // its estimate; after d independent noiseless observations with a tiny
  // lambda the estimate is theta.
  const Vector theta{0.3, -0.7, 0.2};
  RidgeState s(3, RidgeParams{1e-9, 0.0, 0.1, 0.0});
  s.update(Vector{1, 0, 0}, 0.3);
  s.update(Vector{0, 1, 0}, -0.7);
  s.update(Vector{0, 0, 1}, 0.2);
  CHECK(s.radius() == doctest::Approx(0.0));
  SplitMix64 rng(2);
  for (int i = 0; i < 100; ++i) {
    const auto b = sample_contexts(ContextMode::kUnitBall, 7, 3, rng);
    CHECK(s.select_arm(b) == best_arm(theta, b));
  }
}

TEST_CASE("select_arm with offset scores the shifted estimate") {
  RidgeState s(2, RidgeParams{1.0, 0.0, 0.1, 0.0});
  const auto b = batch_of({{1, 0}, {0, 1}});
  CHECK(s.select_arm(b, Vector{0.0, 1.0}) == 1);
  CHECK(s.select_arm(b, Vector{1.0, 0.0}) == 0);
  CHECK_THROWS_AS(s.select_arm(b, Vector{1.0}), DimensionMismatch);
}

TEST_CASE("confidence radius") {
  const RidgeParams p{1.0, 1.0, 0.1, 1.0};
  CHECK(confidence_radius(p, 2, 0.0) ==
        doctest::Approx(std::sqrt(2.0 * std::log(10.0)) + 1.0));
  CHECK(confidence_radius(p, 2, 2.0) ==
        doctest::Approx(std::sqrt(2.0 * (std::log(10.0) + 1.0)) + 1.0));

  // Averaged rewards: sigma / sqrt(m) strictly shrinks the radius.
  for (double logdet : {0.0, 1.0, 10.0}) {
    for (int m : {2, 4, 64}) {
      RidgeParams avg = p;
      avg.noise_scale = 1.0 / std::sqrt(static_cast<double>(m));
      CHECK(confidence_radius(avg, 5, logdet) < confidence_radius(p, 5, logdet));
    }
  }
}

TEST_CASE("estimation error shrinks with rounds") {
  int shrinks = 0;
  for (int seed = 0; seed < 20; ++seed) {
    SplitMix64 rng(derive_seed(77, seed));
    const Vector theta = random_unit(5, rng);
    RidgeState s(5, RidgeParams{1.0, 1.0, 0.1, 1.0});
    std::normal_distribution<double> noise;
    double err200 = 0.0;
    for (int t = 1; t <= 2000; ++t) {
      const auto b = sample_contexts(ContextMode::kUnitBall, 10, 5, rng);
      const std::size_t arm = s.select_arm(b);
      s.update(b.contexts[arm], dot(b.contexts[arm], theta) + noise(rng));
      if (t == 200) err200 = norm(subtract(s.estimate(), theta));
    }
    if (norm(subtract(s.estimate(), theta)) < err200) ++shrinks;
  }
  CHECK(shrinks >= 18);
}

TEST_CASE("shifted_reward") {
  const Vector beta{0.5, 0.5};
  CHECK(shifted_reward(0.7, beta, ShiftVector{{0, 0}}) == 0.7);
  CHECK(shifted_reward(0.7, beta, ShiftVector{{0.4, 0}}) == doctest::Approx(0.5));
  SplitMix64 rng(3);
  std::normal_distribution<double> g;
  for (int i = 0; i < 1000; ++i) {
    const Vector x{g(rng), g(rng)};
    const ShiftVector shift{{g(rng), g(rng)}};
    const double y = g(rng);
    CHECK(shifted_reward(y, x, shift) + dot(x, shift.gamma) == doctest::Approx(y).epsilon(1e-12));
  }
}

TEST_CASE("shifted regret decomposition examples") {
  SplitMix64 rng(4);
  std::vector<ContextBatch> batches;
  std::vector<std::size_t> actions;
  std::uniform_int_distribution<std::size_t> arm(0, 1);
  for (int t = 0; t < 5; ++t) {
    batches.push_back(sample_contexts(ContextMode::kUnitBall, 2, 3, rng));
    actions.push_back(arm(rng));
  }
  const Vector theta{0.2, -0.5, 0.8};

  const auto zero = shifted_regret_decomposition(theta, Vector{0, 0, 0}, batches, actions);
  CHECK(zero.r_true == doctest::Approx(zero.r_shifted));
  CHECK(zero.cross_term == 0.0);

  const auto same = shifted_regret_decomposition(theta, theta, batches, actions);
  CHECK(same.r_shifted == 0.0);
  CHECK(same.r_true <= same.cross_term + 1e-12);

  // Brute force on the 2-arm, T=5 instance.
  const Vector gamma{1.0, 0.3, -0.4};
  const auto r = shifted_regret_decomposition(theta, gamma, batches, actions);
  double rt = 0, rs = 0, ct = 0;
  for (int t = 0; t < 5; ++t) {
    const auto& c = batches[t].contexts;
    const auto& x = c[actions[t]];
    const double v0 = dot(c[0], theta), v1 = dot(c[1], theta);
    rt += std::max(v0, v1) - dot(x, theta);
    const Vector res = subtract(theta, gamma);
    rs += std::max(dot(c[0], res), dot(c[1], res)) - dot(x, res);
    ct += dot(v0 >= v1 ? c[0] : c[1], gamma) - dot(x, gamma);
  }
  CHECK(r.r_true == doctest::Approx(rt));
  CHECK(r.r_shifted == doctest::Approx(rs));
  CHECK(r.cross_term == doctest::Approx(ct));
  CHECK(r.r_true <= r.r_shifted + r.cross_term + 1e-12);

  CHECK_THROWS_AS(
      shifted_regret_decomposition(theta, gamma, batches, std::vector<std::size_t>{0}),
      std::invalid_argument);
  actions[2] = 5;
  CHECK_THROWS_AS(shifted_regret_decomposition(theta, gamma, batches, actions),
                  std::out_of_range);
}

TEST_CASE("shifted regret inequality, fuzzed") {
  SplitMix64 rng(5);
  std::normal_distribution<double> g;
  std::uniform_int_distribution<int> k_d(1, 5), t_d(1, 20), d_d(1, 5);
  for (int inst = 0; inst < 1000; ++inst) {
    const std::size_t d = d_d(rng), k = k_d(rng), t = t_d(rng);
    Vector theta(d), gamma(d);
    for (auto& v : theta) v = g(rng);
    for (auto& v : gamma) v = g(rng);
    std::vector<ContextBatch> batches;
    std::vector<std::size_t> actions;
    std::uniform_int_distribution<std::size_t> arm(0, k - 1);
    for (std::size_t s = 0; s < t; ++s) {
      batches.push_back(sample_contexts(ContextMode::kCube, k, d, rng));
      actions.push_back(arm(rng));
    }
    const auto r = shifted_regret_decomposition(theta, gamma, batches, actions);
    CHECK(r.r_true <= r.r_shifted + r.cross_term + 1e-9);
  }
}

TEST_CASE("cross term has zero mean for a shift orthogonal to theta") {
  const Vector theta{1, 0};
  const Vector gamma{0, 1};
  SplitMix64 rng(6);
  const int m = 100000;
  double sum = 0.0, sq = 0.0;
  std::vector<ContextBatch> one(1);
  const std::vector<std::size_t> action{2};
  for (int i = 0; i < m; ++i) {
    one[0] = sample_contexts(ContextMode::kCube, 5, 2, rng);
    const double c = shifted_regret_decomposition(theta, gamma, one, action).cross_term;
    sum += c;
    sq += c * c;
  }
  const double mean = sum / m;
  const double sd = std::sqrt(sq / m - mean * mean);
  CHECK(std::abs(mean) <= 3.0 * sd / std::sqrt(static_cast<double>(m)));
}

TEST_CASE("argmax invariance examples") {
  const auto b = batch_of({{1, 0}, {-1, 0}});
  CHECK(argmax_invariant(Vector{1, 0}, Vector{1, 0}, b));
  CHECK(argmax_gap_hypothesis(Vector{1, 0}, Vector{0.9, 0}, b));
  CHECK(argmax_invariant(Vector{1, 0}, Vector{0.9, 0}, b));

  const auto c = batch_of({{1, 0}, {0, 1}});
  CHECK_FALSE(argmax_gap_hypothesis(Vector{1, 0}, Vector{0, 1}, c));
  CHECK_FALSE(argmax_invariant(Vector{1, 0}, Vector{0, 1}, c));
}

TEST_CASE("argmax invariance holds under the gap hypothesis") {
  SplitMix64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int accepted = 0;
  while (accepted < 1000) {
    const std::size_t d = 3;
    const Vector theta = random_unit(d, rng);
    const Vector gamma = add(theta, scale(random_unit(d, rng), 0.02 * std::abs(u(rng))));
    const auto b = sample_contexts(ContextMode::kUnitBall, 4, d, rng);
    if (!argmax_gap_hypothesis(theta, gamma, b)) continue;
    ++accepted;
    CHECK(argmax_invariant(theta, gamma, b));
  }
}
