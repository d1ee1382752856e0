#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "bubblesim/agents.hpp"
#include "bubblesim/config.hpp"
#include "bubblesim/exchange.hpp"
#include "bubblesim/fundamental.hpp"
#include "bubblesim/kernel.hpp"

namespace bubblesim {

/// Bubble scenarios carry the full roster; non-bubble scenarios drop the
/// herding agents and keep everything else (including every random stream).
enum class ScenarioKind { bubble, nonbubble };

constexpr const char* to_string(ScenarioKind k) { return k == ScenarioKind::bubble ? "bubble" : "nonbubble"; }

enum class Role { exchange, market_maker, value, noise, momentum, herding, external };

constexpr const char* to_string(Role r) {
  switch (r) {
    case Role::exchange:
      return "exchange";
    case Role::market_maker:
      return "market_maker";
    case Role::value:
      return "value";
    case Role::noise:
      return "noise";
    case Role::momentum:
      return "momentum";
    case Role::herding:
      return "herding";
    case Role::external:
      return "external";
  }
  return "?";
}

/// One trading day: kernel, exchange, fundamental and the background roster.
class MarketSimulation {
 public:
  MarketSimulation(const ScenarioConfig& cfg, ScenarioKind kind, std::uint64_t seed, bool with_external_trader);

  MarketSimulation(MarketSimulation&&) = default;
  MarketSimulation& operator=(MarketSimulation&&) = default;

  /// Runs the kernel to t and samples the mid through t.
  KernelStats run_until(SimTime t);
  KernelStats run_to_end() { return run_until(horizon_); }

  Kernel& kernel() { return *kernel_; }
  const Kernel& kernel() const { return *kernel_; }
  Exchange& exchange() { return *exchange_; }
  const Exchange& exchange() const { return *exchange_; }
  const FundamentalPath& fundamental() const { return *fundamental_; }

  /// Null unless constructed with an external trader.
  ExternalTrader* external() { return external_; }

  Role role_of(AgentId id) const { return roles_.at(id); }
  const std::vector<Role>& roles() const { return roles_; }
  SimTime horizon() const { return horizon_; }
  ScenarioKind kind() const { return kind_; }

  template <typename A>
  std::vector<const A*> agents_of(Role role) const {
    std::vector<const A*> out;
    for (AgentId id = 0; id < roles_.size(); ++id)
      if (roles_[id] == role) out.push_back(static_cast<const A*>(&kernel_->agent(id)));
    return out;
  }

 private:
  ScenarioKind kind_;
  SimTime horizon_;
  // Heap-held so references from agents stay valid when the simulation moves.
  std::unique_ptr<FundamentalPath> fundamental_;
  std::unique_ptr<Kernel> kernel_;
  Exchange* exchange_{nullptr};
  ExternalTrader* external_{nullptr};
  std::vector<Role> roles_;
};

}  // namespace bubblesim
