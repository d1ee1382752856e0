#include <gtest/gtest.h>

#include "bubblesim/market.hpp"

using namespace bubblesim;

namespace {

ScenarioConfig short_day() {
  ScenarioConfig c;
  c.horizon_s = 14'000.0;
  return c;
}

}  // namespace

TEST(Market, RosterMatchesScenario) {
  const ScenarioConfig cfg = short_day();
  MarketSimulation bubble(cfg, ScenarioKind::bubble, 1, false);
  MarketSimulation calm(cfg, ScenarioKind::nonbubble, 1, true);
  auto count = [](const MarketSimulation& s, Role r) {
    return std::count(s.roles().begin(), s.roles().end(), r);
  };
  EXPECT_EQ(count(bubble, Role::value), 50);
  EXPECT_EQ(count(bubble, Role::noise), 500);
  EXPECT_EQ(count(bubble, Role::momentum), 8);
  EXPECT_EQ(count(bubble, Role::herding), 5);
  EXPECT_EQ(count(bubble, Role::market_maker), 1);
  EXPECT_EQ(count(bubble, Role::external), 0);
  EXPECT_EQ(count(calm, Role::herding), 0);
  EXPECT_EQ(count(calm, Role::external), 1);
  EXPECT_NE(calm.external(), nullptr);
  EXPECT_EQ(bubble.external(), nullptr);
}

TEST(Market, HerdingIsSilentFromCutoff) {
  const ScenarioConfig cfg = short_day();
  MarketSimulation sim(cfg, ScenarioKind::bubble, 21, false);
  sim.run_to_end();
  int herding_orders = 0;
  for (const auto& o : sim.exchange().order_log()) {
    if (sim.role_of(o.agent) != Role::herding) continue;
    ++herding_orders;
    EXPECT_LT(o.ts, cfg.herding_cutoff());
  }
  EXPECT_GT(herding_orders, 0);
}

TEST(Market, SameSeedReplaysExactly) {
  const ScenarioConfig cfg = short_day();
  MarketSimulation a(cfg, ScenarioKind::bubble, 5, false);
  MarketSimulation b(cfg, ScenarioKind::bubble, 5, false);
  MarketSimulation c(cfg, ScenarioKind::bubble, 6, false);
  a.run_to_end();
  b.run_to_end();
  c.run_to_end();
  EXPECT_EQ(a.kernel().trace_hash(), b.kernel().trace_hash());
  EXPECT_EQ(a.exchange().trades(), b.exchange().trades());
  EXPECT_NE(a.kernel().trace_hash(), c.kernel().trace_hash());
}

TEST(Market, InventoryAndCashAreConserved) {
  const ScenarioConfig cfg = short_day();
  MarketSimulation sim(cfg, ScenarioKind::bubble, 9, false);
  sim.run_to_end();
  Shares holding = 0;
  Cents cash = 0;
  for (AgentId id = 0; id < sim.roles().size(); ++id) {
    if (sim.role_of(id) == Role::exchange) continue;
    const auto& t = static_cast<const TraderAgent&>(sim.kernel().agent(id));
    holding += t.holding();
    cash += t.cash();
  }
  EXPECT_EQ(holding, 0);
  EXPECT_EQ(cash, 0);
  EXPECT_GT(sim.exchange().trades().size(), 1000u);
}

TEST(Market, MidSampledEverySecond) {
  const ScenarioConfig cfg = short_day();
  MarketSimulation sim(cfg, ScenarioKind::nonbubble, 2, false);
  sim.run_until(SimTime::from_seconds(100));
  EXPECT_EQ(sim.exchange().mids().size(), 101u);
  sim.run_to_end();
  EXPECT_EQ(sim.exchange().mids().size(), 14'001u);
  EXPECT_EQ(sim.fundamental().size(), 14'001u);
}

TEST(Market, OrdersAreStampedCausally) {
  const ScenarioConfig cfg = short_day();
  MarketSimulation sim(cfg, ScenarioKind::bubble, 3, false);
  sim.run_to_end();
  const auto& log = sim.exchange().order_log();
  for (std::size_t i = 1; i < log.size(); ++i) EXPECT_LE(log[i - 1].ts, log[i].ts);
  for (const auto& t : sim.exchange().trades()) EXPECT_LE(t.ts, cfg.horizon());
}
