#include "bubblesim/market.hpp"

#include <cmath>

namespace bubblesim {

MarketSimulation::MarketSimulation(const ScenarioConfig& cfg, ScenarioKind kind, std::uint64_t seed,
                                   bool with_external_trader)
    : kind_(kind), horizon_(cfg.horizon()) {
  const RandomStream master(seed);
  fundamental_ = std::make_unique<FundamentalPath>(
      generate_fundamental(cfg.fundamental, master.derive("fundamental"), horizon_));
  kernel_ = std::make_unique<Kernel>(SimTime::from_nanos(cfg.latency_ns));

  const auto fallback = static_cast<Cents>(std::llround(cfg.fundamental.mu));
  exchange_ = &kernel_->add_agent(std::make_unique<Exchange>(fallback));
  roles_.push_back(Role::exchange);
  const AgentId ex = exchange_->id();

  auto add = [&](Role role, auto agent) {
    kernel_->add_agent(std::move(agent));
    roles_.push_back(role);
  };
  for (int i = 0; i < cfg.roster.market_makers; ++i)
    add(Role::market_maker,
        std::make_unique<MarketMakerAgent>(ex, master.derive("market_maker", i), cfg.market_maker));
  for (int i = 0; i < cfg.roster.value; ++i)
    add(Role::value, std::make_unique<ValueAgent>(ex, master.derive("value", i), *fundamental_, cfg.value));
  for (int i = 0; i < cfg.roster.noise; ++i)
    add(Role::noise, std::make_unique<NoiseAgent>(ex, master.derive("noise", i), cfg.noise, horizon_));
  for (int i = 0; i < cfg.roster.momentum; ++i)
    add(Role::momentum, std::make_unique<MomentumAgent>(ex, master.derive("momentum", i), cfg.momentum));
  if (kind == ScenarioKind::bubble) {
    for (int i = 0; i < cfg.roster.herding; ++i)
      add(Role::herding, std::make_unique<HerdingAgent>(ex, master.derive("herding", i), cfg.herding,
                                                        cfg.herding_cutoff()));
  }
  if (with_external_trader) {
    external_ = &kernel_->add_agent(std::make_unique<ExternalTrader>(ex, master.derive("external")));
    roles_.push_back(Role::external);
  }
}

KernelStats MarketSimulation::run_until(SimTime t) {
  KernelStats stats = kernel_->run_until(t);
  exchange_->sample_through(t);
  return stats;
}

}  // namespace bubblesim
