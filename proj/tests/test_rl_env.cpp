#include <gtest/gtest.h>

#include <cmath>

#include "bubblesim/rl_env.hpp"

using namespace bubblesim;

namespace {

double naive_mean(const std::vector<Cents>& v, std::size_t len, std::size_t w) {
  const std::size_t b = len > w ? len - w : 0;
  double s = 0;
  for (std::size_t i = b; i < len; ++i) s += static_cast<double>(v[i]);
  return s / static_cast<double>(len - b);
}

}  // namespace

TEST(Observation, MomentumFeaturesMatchRecomputation) {
  RandomStream rng(1);
  std::vector<Cents> v;
  Cents x = 100'000;
  for (int i = 0; i < 12'000; ++i) {
    x += rng.uniform_int(-20, 21);
    v.push_back(x);
  }
  const PriceSeries s(v);
  BookSnapshot book;
  book.best_bid = Level{99'990, 300};
  book.best_ask = Level{100'010, 120};
  book.mid = 100'000;
  for (std::size_t len : {1u, 200u, 2'500u, 12'000u}) {
    const Observation o = build_observation(s, len, book, -300, MomentumFeature::ratio);
    EXPECT_EQ(o[kHolding], -300.0);
    EXPECT_EQ(o[kImbalance], 180.0);
    EXPECT_EQ(o[kMidPrice], 100'000.0);
    const double ma5 = naive_mean(v, len, 300);
    for (std::size_t k = 0; k < kMomentumLongS.size(); ++k) {
      const double ma = naive_mean(v, len, kMomentumLongS[k]);
      EXPECT_NEAR(o[kMomentum30 + k], (ma5 - ma) / ma, 1e-12) << len << " " << k;
    }
    const std::size_t b = len > 1800 ? len - 1800 : 0;
    const double m = naive_mean(v, len, 1800);
    double ss = 0;
    for (std::size_t i = b; i < len; ++i) ss += std::pow(static_cast<double>(v[i]) - m, 2);
    EXPECT_NEAR(o[kVolatility], std::sqrt(ss / static_cast<double>(len - b)), 1e-6);
  }
}

TEST(Observation, SignModeKeepsOnlyDirection) {
  std::vector<Cents> v;
  for (int i = 0; i < 4'000; ++i) v.push_back(100'000 + i);
  const PriceSeries s(v);
  const Observation ratio = build_observation(s, v.size(), {}, 0, MomentumFeature::ratio);
  const Observation sign = build_observation(s, v.size(), {}, 0, MomentumFeature::sign);
  for (std::size_t k = kMomentum30; k < kFeatureCount; ++k) {
    EXPECT_GT(ratio[k], 0.0);
    EXPECT_EQ(sign[k], 1.0);
  }
}

TEST(Observation, NormalizeAppliesOffsetAndScale) {
  Observation raw{};
  raw[kMidPrice] = 101'000;
  raw[kHolding] = 500;
  const Observation z = normalize(raw, FeatureScaling{});
  EXPECT_DOUBLE_EQ(z[kMidPrice], 1.0);
  EXPECT_DOUBLE_EQ(z[kHolding], 0.5);
}

TEST(TradingEnv, EpisodeHas390DecisionsAndRewardsTelescope) {
  ScenarioConfig cfg;
  TradingEnv env(cfg);
  env.reset(ScenarioKind::bubble, 17);
  const Cents start = env.mtm();
  EXPECT_EQ(start, cfg.env.starting_cash);
  RandomStream rng(2);
  Cents total = 0;
  int steps = 0;
  while (!env.done()) {
    const auto a = static_cast<Action>(rng.uniform_int(0, 2));
    total += env.step(a).reward;
    ++steps;
  }
  EXPECT_EQ(steps, 390);
  EXPECT_EQ(total, env.mtm() - start);
  EXPECT_EQ(env.tape().size(), 390u);
  EXPECT_THROW(env.step(Action::hold), std::logic_error);
}

TEST(TradingEnv, RewardIsMarkToMarketDelta) {
  ScenarioConfig cfg;
  TradingEnv env(cfg);
  env.reset(ScenarioKind::bubble, 4);
  const ExternalTrader& me = *env.sim().external();
  Cents prev_cash = me.cash();
  Shares prev_hold = me.holding();
  Cents prev_mid = env.sim().exchange().snapshot(env.now()).mid;
  for (int i = 0; i < 30; ++i) {
    const StepResult r = env.step(i < 10 ? Action::buy : (i < 15 ? Action::sell : Action::hold));
    const Cents mid = env.sim().exchange().snapshot(env.now()).mid;
    const Cents expected = (me.cash() - prev_cash) + me.holding() * mid - prev_hold * prev_mid;
    EXPECT_EQ(r.reward, expected) << "step " << i;
    EXPECT_EQ(env.mtm(), cfg.env.starting_cash + me.cash() + me.holding() * mid);
    prev_cash = me.cash();
    prev_hold = me.holding();
    prev_mid = mid;
  }
  EXPECT_GT(me.holding(), 0);
}

TEST(TradingEnv, OrderIntoEmptyBookStaysUnfilled) {
  TradingEnv env{ScenarioConfig{}};
  env.reset(ScenarioKind::bubble, 4);
  ASSERT_FALSE(env.sim().exchange().snapshot(env.now()).best_ask);
  const StepResult r = env.step(Action::buy);
  EXPECT_EQ(env.holding(), 0);
  EXPECT_EQ(r.reward, 0);
}

TEST(TradingEnv, HoldingNothingEarnsNothing) {
  TradingEnv env{ScenarioConfig{}};
  env.reset(ScenarioKind::nonbubble, 8);
  while (!env.done()) EXPECT_EQ(env.step(Action::hold).reward, 0);
  EXPECT_DOUBLE_EQ(env.profit_pct(), 0.0);
}

TEST(TradingEnv, TapeRecordsStateBeforeAction) {
  TradingEnv env{ScenarioConfig{}};
  env.reset(ScenarioKind::bubble, 5);
  env.step(Action::hold);
  env.step(Action::buy);
  const Shares after_buy = env.holding();
  env.step(Action::sell);
  const auto& tape = env.tape();
  EXPECT_EQ(after_buy, 100);
  EXPECT_EQ(tape[0].t_s, 0);
  EXPECT_EQ(tape[1].t_s, 60);
  EXPECT_EQ(tape[1].holding, 0);
  EXPECT_EQ(tape[1].action, Action::buy);
  EXPECT_EQ(tape[2].t_s, 120);
  EXPECT_EQ(tape[2].holding, 100);
  EXPECT_EQ(tape[2].action, Action::sell);
}

TEST(TradingEnv, SameSeedSameEpisode) {
  auto run = [] {
    TradingEnv env{ScenarioConfig{}};
    env.reset(ScenarioKind::bubble, 33);
    std::vector<Cents> r;
    int i = 0;
    while (!env.done()) r.push_back(env.step(static_cast<Action>(i++ % 3)).reward);
    return r;
  };
  EXPECT_EQ(run(), run());
}
