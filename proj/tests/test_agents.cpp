#include <gtest/gtest.h>

#include "bubblesim/agents.hpp"

using namespace bubblesim;

namespace {

MarketView view_with(Cents bid, Cents ask, Cents mid) {
  MarketView v;
  v.book.best_bid = Level{bid, 100};
  v.book.best_ask = Level{ask, 100};
  v.book.mid = mid;
  return v;
}

PriceSeries rising(std::size_t n) {
  PriceSeries s;
  for (std::size_t i = 0; i < n; ++i) s.push(100'000 + static_cast<Cents>(i));
  return s;
}

}  // namespace

TEST(ValueAgent, BuysBelowBandAtBestAsk) {
  const auto v = view_with(98'990, 99'010, 99'000);
  const auto out = value_agent_act(v, 100'000, 0.002, 100);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].kind, OrderIntent::Kind::limit);
  EXPECT_EQ(out[0].side, Side::buy);
  EXPECT_EQ(out[0].price, 99'010);
  EXPECT_EQ(out[0].qty, 100);
}

TEST(ValueAgent, SellsAboveBandAtBestBid) {
  const auto v = view_with(100'990, 101'010, 101'000);
  const auto out = value_agent_act(v, 100'000, 0.002, 100);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].side, Side::sell);
  EXPECT_EQ(out[0].price, 100'990);
}

TEST(ValueAgent, IdleInsideBand) {
  EXPECT_TRUE(value_agent_act(view_with(100'100, 100'300, 100'200), 100'000, 0.002, 100).empty());
  EXPECT_TRUE(value_agent_act(view_with(99'700, 99'900, 99'800), 100'000, 0.002, 100).empty());
}

TEST(NoiseAgent, CrossesAtOppositeTouchWithBoundedSize) {
  const auto v = view_with(99'990, 100'010, 100'000);
  RandomStream rng(3);
  int buys = 0;
  for (int i = 0; i < 400; ++i) {
    const auto out = noise_agent_act(v, rng, 10, 50);
    ASSERT_EQ(out.size(), 1u);
    EXPECT_GE(out[0].qty, 10);
    EXPECT_LE(out[0].qty, 50);
    EXPECT_EQ(out[0].price, out[0].side == Side::buy ? 100'010 : 99'990);
    buys += out[0].side == Side::buy;
  }
  EXPECT_GT(buys, 150);
  EXPECT_LT(buys, 250);
}

TEST(NoiseAgent, IdleOnEmptyBook) {
  MarketView v;
  RandomStream rng(1);
  EXPECT_TRUE(noise_agent_act(v, rng, 10, 50).empty());
}

TEST(Momentum, FollowsMovingAverageCross) {
  const PriceSeries up = rising(2'000);
  auto v = view_with(99'990, 100'010, 100'000);
  v.prices = &up;
  v.price_len = up.size();
  EXPECT_EQ(momentum_signal(v, {}), 1);
  auto out = momentum_agent_act(v, {}, 100);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].side, Side::buy);
  EXPECT_EQ(out[0].price, 100'010);

  v.price_len = 1'799;
  EXPECT_EQ(momentum_signal(v, {}), 0);
  EXPECT_TRUE(momentum_agent_act(v, {}, 100).empty());

  v.price_len = up.size();
  v.book.best_ask.reset();
  EXPECT_TRUE(momentum_agent_act(v, {}, 100).empty());
}

TEST(Herding, MarketOrdersBeforeCutoffSilentAfter) {
  const PriceSeries up = rising(2'000);
  auto v = view_with(99'990, 100'010, 100'000);
  v.prices = &up;
  v.price_len = up.size();
  const SimTime cutoff = SimTime::from_seconds(12'000);
  auto out = herding_agent_act(v, cutoff - SimTime{1}, cutoff, {}, 100);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].kind, OrderIntent::Kind::market);
  EXPECT_EQ(out[0].side, Side::buy);
  EXPECT_TRUE(herding_agent_act(v, cutoff, cutoff, {}, 100).empty());
  EXPECT_TRUE(herding_agent_act(v, cutoff + SimTime::from_seconds(5), cutoff, {}, 100).empty());
}

TEST(MarketMaker, CancelsThenQuotesLadder) {
  auto v = view_with(99'990, 100'010, 100'000);
  v.open_orders = {7, 9};
  MarketMakerParams p;
  p.levels = 3;
  const auto out = market_maker_act(v, p);
  ASSERT_EQ(out.size(), 2u + 6u);
  EXPECT_EQ(out[0].kind, OrderIntent::Kind::cancel);
  EXPECT_EQ(out[0].target, 7u);
  EXPECT_EQ(out[1].target, 9u);
  std::vector<Cents> bids, asks;
  for (std::size_t i = 2; i < out.size(); ++i) {
    EXPECT_EQ(out[i].qty, p.size);
    (out[i].side == Side::buy ? bids : asks).push_back(out[i].price);
  }
  EXPECT_EQ(bids, (std::vector<Cents>{99'990, 99'980, 99'970}));
  EXPECT_EQ(asks, (std::vector<Cents>{100'010, 100'020, 100'030}));
}

TEST(MarketMaker, NeverQuotesNonPositiveBid) {
  MarketView v;
  v.book.mid = 15;
  MarketMakerParams p;
  p.levels = 2;
  const auto out = market_maker_act(v, p);
  int bids = 0;
  for (const auto& o : out) bids += o.side == Side::buy;
  EXPECT_EQ(bids, 1);
  EXPECT_EQ(out.size(), 3u);
}
