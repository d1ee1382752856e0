#include <gtest/gtest.h>

#include <cmath>

#include "bubblesim/shapley.hpp"
#include "support/shapley_checks.hpp"

using namespace bubblesim;
using namespace bubblesim::testing;

namespace {

double interact(std::span<const double> z) { return z[0] * z[1] + std::sin(z[2]) + z[3] * z[3] - 0.5 * z[0] * z[3]; }

PolicyNet random_net(std::uint64_t seed) {
  PpoConfig cfg;
  cfg.hidden = 16;
  RandomStream rng(seed);
  PolicyNet net = make_policy(cfg, rng);
  RandomStream extra(seed + 1);
  for (Eigen::Index i = 0; i < net.size(); ++i) net.params()(i) += 0.5 * extra.normal();
  return net;
}

}  // namespace

TEST(ActionScore, UniformPolicyScoresZero) {
  PolicyNet net(static_cast<int>(kFeatureCount), 4, kActionCount);
  const Observation x{};
  EXPECT_DOUBLE_EQ(action_score(net, x), 0.0);
}

TEST(ActionScore, CertainBuyScoresMinusOne) {
  PolicyNet net(static_cast<int>(kFeatureCount), 4, kActionCount);
  net.bp()(static_cast<int>(Action::buy)) = 60.0;
  const Observation x{};
  EXPECT_NEAR(action_score(net, x), -1.0, 1e-12);
  net.bp().setZero();
  net.bp()(static_cast<int>(Action::sell)) = 60.0;
  EXPECT_NEAR(action_score(net, x), 1.0, 1e-12);
}

TEST(ActionScore, EqualsProbabilityWeightedCodes) {
  const PolicyNet net = random_net(4);
  RandomStream rng(5);
  for (int k = 0; k < 20; ++k) {
    Observation x;
    for (double& v : x) v = rng.normal();
    const ActResult r = act(net, x, ActMode::greedy, nullptr);
    EXPECT_NEAR(action_score(net, x), -1.0 * r.probs[0] + 0.0 * r.probs[1] + 1.0 * r.probs[2], 1e-12);
  }
}

TEST(Shapley, ExactSatisfiesEfficiencyAndSymmetry) {
  const std::vector<double> x{1.0, 2.0, 0.5, -1.0};
  const std::vector<double> b{0.0, 0.0, 0.0, 0.0};
  const auto phi = shapley_exact(interact, x, b);
  double s = 0;
  for (double v : phi) s += v;
  EXPECT_NEAR(s, interact(x) - interact(b), 1e-12);

  // f = x0 * x1 at x = (1, 1) from 0: each player gets 1/2.
  const ScalarModel prod = [](std::span<const double> z) { return z[0] * z[1]; };
  const std::vector<double> one{1.0, 1.0};
  const std::vector<double> zero{0.0, 0.0};
  const auto p = shapley_exact(prod, one, zero);
  EXPECT_DOUBLE_EQ(p[0], 0.5);
  EXPECT_DOUBLE_EQ(p[1], 0.5);
}

TEST(Shapley, PermutationConvergesToExact) {
  const std::vector<double> x{1.0, 2.0, 0.5, -1.0};
  const std::vector<double> b{0.2, -0.3, 0.0, 0.4};
  const auto exact = shapley_exact(interact, x, b);
  RandomStream rng(7);
  const ShapleyResult r = shapley_permutation(interact, x, b, 20'000, rng);
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(r.values[i], exact[i], 4.0 * r.std_error[i] + 1e-12);
}

TEST(Shapley, LinearModelRecoveredExactly) {
  const std::vector<double> w{0.5, -2.0, 3.0, 0.0, 1.25};
  const ScalarModel f = [&](std::span<const double> z) {
    double s = 0;
    for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * z[i];
    return s;
  };
  const std::vector<double> x{1.0, 2.0, -1.0, 5.0, 0.4};
  const std::vector<double> b{0.5, 0.5, 0.5, 0.5, 0.5};
  RandomStream rng(1);
  const ShapleyResult r = shapley_permutation(f, x, b, 2'000, rng);
  for (std::size_t i = 0; i < w.size(); ++i) EXPECT_NEAR(r.values[i], w[i] * (x[i] - b[i]), 1e-12);
  EXPECT_EQ(r.values[3], 0.0);
}

TEST(Shapley, DummyFeatureGetsExactlyZero) {
  PolicyNet net = random_net(9);
  // Zero every weight leaving input 4.
  net.w1().col(4).setZero();
  const ScalarModel f = [&](std::span<const double> z) { return action_score(net, z); };
  RandomStream rng(10);
  std::vector<double> x(kFeatureCount), b(kFeatureCount);
  for (std::size_t i = 0; i < kFeatureCount; ++i) {
    x[i] = rng.normal();
    b[i] = rng.normal();
  }
  const ShapleyResult r = shapley_permutation(f, x, b, 300, rng);
  EXPECT_EQ(r.values[4], 0.0);
  EXPECT_EQ(r.std_error[4], 0.0);
  EXPECT_EQ(shapley_exact(f, x, b)[4], 0.0);
}

TEST(Shapley, BaselineEqualsInputGivesZeros) {
  const PolicyNet net = random_net(2);
  const ScalarModel f = [&](std::span<const double> z) { return action_score(net, z); };
  const std::vector<double> x(kFeatureCount, 0.3);
  RandomStream rng(3);
  const ShapleyResult r = shapley_permutation(f, x, x, 50, rng);
  for (double v : r.values) EXPECT_EQ(v, 0.0);
}

TEST(Shapley, EfficiencyOnPolicyNet) {
  const PolicyNet net = random_net(12);
  const ScalarModel f = [&](std::span<const double> z) { return action_score(net, z); };
  RandomStream rng(13);
  for (int k = 0; k < 20; ++k) {
    std::vector<double> x(kFeatureCount), b(kFeatureCount);
    for (std::size_t i = 0; i < kFeatureCount; ++i) {
      x[i] = rng.normal();
      b[i] = rng.normal();
    }
    const ShapleyResult r = shapley_permutation(f, x, b, 200, rng);
    EXPECT_LE(efficiency_gap(r), 3.0 * attribution_sum_se(r));
  }
}

TEST(Shapley, SymmetricFeaturesGetEqualValues) {
  const ScalarModel f = [](std::span<const double> z) { return std::tanh(z[0] + z[1]) + 0.3 * z[2]; };
  const std::vector<double> x{1.0, 1.0, 2.0};
  const std::vector<double> b{0.0, 0.0, 0.0};
  RandomStream rng(5);
  const ShapleyResult r = shapley_permutation(f, x, b, 4'000, rng);
  EXPECT_NEAR(r.values[0], r.values[1], 4.0 * std::hypot(r.std_error[0], r.std_error[1]));
  const auto e = shapley_exact(f, x, b);
  EXPECT_NEAR(e[0], e[1], 1e-12);
}

TEST(Shapley, RejectsBadArguments) {
  const std::vector<double> x{1.0, 2.0};
  const std::vector<double> b{0.0};
  RandomStream rng(1);
  EXPECT_THROW(shapley_permutation(interact, x, b, 10, rng), std::invalid_argument);
  EXPECT_THROW(shapley_permutation(interact, x, x, 0, rng), std::invalid_argument);
}

TEST(Attribution, OneRecordPerDecisionAndDeterministic) {
  ScenarioConfig cfg;
  const PolicyNet net = random_net(21);
  const auto a = episode_attribution(cfg, net, ScenarioKind::bubble, 3, 4);
  const auto b = episode_attribution(cfg, net, ScenarioKind::bubble, 3, 4);
  ASSERT_EQ(a.size(), 390u);
  for (std::size_t k = 0; k < a.size(); ++k) {
    EXPECT_EQ(a[k].shapley, b[k].shapley);
    EXPECT_EQ(a[k].t_s, static_cast<std::int64_t>(60 * k));
  }
}

TEST(Attribution, LogitTargetExplainsOneLogit) {
  ScenarioConfig cfg;
  cfg.experiment.attribution_target = AttributionTarget::sell_logit;
  const PolicyNet net = random_net(22);
  const auto recs = episode_attribution(cfg, net, ScenarioKind::nonbubble, 5, 2);
  ASSERT_FALSE(recs.empty());
  const Observation x = normalize(recs[10].features, cfg.env.scaling);
  EXPECT_NEAR(recs[10].model_output, action_logit(net, x, Action::sell), 1e-12);
}
