#include <gtest/gtest.h>

#include <cmath>

#include "bubblesim/fundamental.hpp"

using namespace bubblesim;

TEST(Fundamental, ZeroSigmaDecaysGeometrically) {
  OUParams p;
  p.sigma = 0.0;
  p.kappa = 0.01;
  p.r0 = p.mu + 1000.0;
  const auto path = simulate_ou(p, RandomStream(1), 200);
  for (std::size_t i = 1; i < path.size(); ++i) {
    const double gap_prev = path[i - 1] - p.mu;
    const double gap = path[i] - p.mu;
    EXPECT_NEAR(gap, gap_prev * (1.0 - p.kappa), 1e-9);
    EXPECT_LT(gap, gap_prev);
  }
}

TEST(Fundamental, LongPathMatchesStationaryMoments) {
  OUParams p;
  p.kappa = 0.01;
  p.sigma = 250.0 * std::sqrt(2.0 * p.kappa);
  const auto path = simulate_ou(p, RandomStream(77), 1'000'000);
  double s = 0, s2 = 0;
  for (double v : path) s += v;
  const double mean = s / static_cast<double>(path.size());
  for (double v : path) s2 += (v - mean) * (v - mean);
  const double var = s2 / static_cast<double>(path.size() - 1);
  EXPECT_NEAR(mean, p.mu, 0.01 * p.mu);
  EXPECT_NEAR(var, p.stationary_variance(), 0.1 * p.stationary_variance());
}

TEST(Fundamental, PathIsRoundedAndSampledPerSecond) {
  OUParams p;
  const auto path = generate_fundamental(p, RandomStream(3), SimTime::from_seconds(100));
  ASSERT_EQ(path.size(), 101u);
  EXPECT_EQ(path.values()[0], 100'000);
  const auto raw = simulate_ou(p, RandomStream(3), 100);
  for (std::size_t i = 0; i < raw.size(); ++i) EXPECT_EQ(path.values()[i], std::llround(raw[i]));
  EXPECT_EQ(path.at(SimTime::from_nanos(1'999'999'999)), path.values()[1]);
  EXPECT_EQ(path.at(SimTime::from_seconds(500)), path.values()[100]);
}

TEST(Fundamental, ClampedAtOneCent) {
  OUParams p;
  p.mu = 5.0;
  p.r0 = 5.0;
  p.kappa = 0.1;
  p.sigma = 50.0;
  const auto path = generate_fundamental(p, RandomStream(9), SimTime::from_seconds(10'000));
  for (Cents v : path.values()) EXPECT_GE(v, 1);
}

TEST(Fundamental, InvalidParamsThrow) {
  OUParams p;
  p.kappa = 0.0;
  EXPECT_ANY_THROW(p.validate());
  p = OUParams{};
  p.sigma = -1.0;
  EXPECT_ANY_THROW(p.validate());
  p = OUParams{};
  p.dt = 0.0;
  EXPECT_ANY_THROW(p.validate());
}

TEST(Fundamental, ObservationNoiseIsUnbiased) {
  const FundamentalPath path(std::vector<Cents>(10, 100'000), 1.0);
  RandomStream rng(4);
  double s = 0;
  const int n = 50'000;
  for (int i = 0; i < n; ++i) s += static_cast<double>(observe_fundamental(path, SimTime::from_seconds(3), 31.6, rng));
  EXPECT_NEAR(s / n, 100'000.0, 0.5);
  EXPECT_EQ(observe_fundamental(path, SimTime{}, 0.0, rng), 100'000);
}
