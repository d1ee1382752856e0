#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <vector>

#include "bubblesim/config.hpp"
#include "bubblesim/market.hpp"

namespace bubblesim {

enum class Action : int { buy = 0, hold = 1, sell = 2 };

inline constexpr int kActionCount = 3;

constexpr const char* to_string(Action a) {
  switch (a) {
    case Action::buy:
      return "BUY";
    case Action::hold:
      return "HOLD";
    case Action::sell:
      return "SELL";
  }
  return "?";
}

enum Feature : std::size_t {
  kHolding = 0,
  kImbalance,
  kVolatility,
  kMidPrice,
  kMomentum30,
  kMomentum60,
  kMomentum90,
  kMomentum120,
  kMomentum180,
};

using Observation = std::array<double, kFeatureCount>;

const char* feature_name(std::size_t i);

inline constexpr std::size_t kMomentumShortS = 300;
inline constexpr std::size_t kVolatilityWindowS = 1800;
inline constexpr std::array<std::size_t, 5> kMomentumLongS{1800, 3600, 5400, 7200, 10800};

/// Raw features from the first `len` mid samples, the book and the holding.
/// Windows longer than the available history are truncated to it.
Observation build_observation(const PriceSeries& mids, std::size_t len, const BookSnapshot& book, Shares holding,
                              MomentumFeature mode);

Observation normalize(const Observation& raw, const FeatureScaling& scaling);

struct StepResult {
  Observation obs;  // raw features at the next decision time
  Cents reward{0};
  bool done{false};
};

struct TapeRow {
  std::int64_t t_s{0};
  Action action{Action::hold};
  Cents reward{0};
  Shares holding{0};  // at t_s, before the action
  Cents mid{0};       // at t_s
};

/// One trading day seen by the learning agent: a decision every interval,
/// market orders of fixed size, reward = change in marked-to-market value.
class TradingEnv {
 public:
  explicit TradingEnv(ScenarioConfig cfg) : cfg_(std::move(cfg)) {}

  Observation reset(ScenarioKind kind, std::uint64_t seed);
  StepResult step(Action action);

  bool done() const { return done_; }
  SimTime now() const { return now_; }
  Observation observation() const;
  Observation normalized() const { return normalize(observation(), cfg_.env.scaling); }

  /// starting cash + cash + holding * mid, all in cents.
  Cents mtm() const;
  /// MtM right after the last reset.
  Cents initial_mtm() const { return initial_mtm_; }
  Cents starting_cash() const { return cfg_.env.starting_cash; }
  double profit_pct() const {
    return static_cast<double>(mtm() - starting_cash()) / static_cast<double>(starting_cash());
  }
  Shares holding() const;

  const std::vector<TapeRow>& tape() const { return tape_; }
  MarketSimulation& sim() { return *sim_; }
  const MarketSimulation& sim() const { return *sim_; }
  const ScenarioConfig& config() const { return cfg_; }

 private:
  Cents mid_now() const;

  ScenarioConfig cfg_;
  std::unique_ptr<MarketSimulation> sim_;
  SimTime now_{};
  SimTime interval_{};
  Cents last_mtm_{0};
  Cents initial_mtm_{0};
  bool done_{true};
  std::vector<TapeRow> tape_;
};

}  // namespace bubblesim
