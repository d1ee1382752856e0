#pragma once

#include <map>
#include <optional>
#include <vector>

#include "bubblesim/fundamental.hpp"
#include "bubblesim/kernel.hpp"
#include "bubblesim/random.hpp"
#include "bubblesim/series.hpp"

namespace bubblesim {

/// What an agent sees when it acts: the book, the per-second mid history up
/// to the snapshot time, and its own account.
struct MarketView {
  BookSnapshot book;
  const PriceSeries* prices{nullptr};
  std::size_t price_len{0};
  Shares holding{0};
  Cents cash{0};
  std::vector<OrderId> open_orders;
};

struct OrderIntent {
  enum class Kind { limit, market, cancel };

  Kind kind{Kind::limit};
  Side side{Side::buy};
  Shares qty{0};
  Cents price{0};
  OrderId target{0};

  static OrderIntent limit(Side s, Shares q, Cents p) { return {Kind::limit, s, q, p, 0}; }
  static OrderIntent market(Side s, Shares q) { return {Kind::market, s, q, 0, 0}; }
  static OrderIntent cancel(OrderId id) { return {Kind::cancel, Side::buy, 0, 0, id}; }
};

struct MomentumWindows {
  std::size_t short_s{300};
  std::size_t long_s{1800};
};

struct MarketMakerParams;

// Decision rules. Each is a pure function of its inputs.

std::vector<OrderIntent> value_agent_act(const MarketView& view, Cents observed_value, double band, Shares qty);

std::vector<OrderIntent> noise_agent_act(const MarketView& view, RandomStream& stream, Shares min_qty,
                                         Shares max_qty);

/// +1 when the short moving average of the view's prices is above the long
/// one, -1 when below, 0 on a tie or with less than a long window of history.
int momentum_signal(const MarketView& view, MomentumWindows windows);

std::vector<OrderIntent> momentum_agent_act(const MarketView& view, MomentumWindows windows, Shares qty);

std::vector<OrderIntent> herding_agent_act(const MarketView& view, SimTime now, SimTime cutoff,
                                           MomentumWindows windows, Shares qty);

/// Cancels every live quote in `view.open_orders`, then quotes both sides of
/// the view's mid: `levels` price levels per side, the innermost at
/// +-half_spread and each further one `level_spacing` cents out.
std::vector<OrderIntent> market_maker_act(const MarketView& view, const MarketMakerParams& params);

/// Shared plumbing for trading agents: wake, query the exchange, act on the
/// snapshot, and keep the account from fill reports.
class TraderAgent : public Agent {
 public:
  TraderAgent(AgentId exchange, RandomStream stream) : exchange_(exchange), stream_(stream) {}

  void on_start(Kernel& kernel) override;
  void on_wakeup(Kernel& kernel, SimTime now) override;
  void on_message(Kernel& kernel, const Message& msg) override;

  Shares holding() const { return holding_; }
  Cents cash() const { return cash_; }
  const std::map<OrderId, Shares>& open_orders() const { return open_; }

  /// Sends an intent to the exchange stamped with the kernel's current time.
  OrderId submit(Kernel& kernel, const OrderIntent& intent);

 protected:
  virtual std::optional<SimTime> first_wakeup() { return std::nullopt; }
  virtual std::optional<SimTime> next_wakeup(SimTime) { return std::nullopt; }
  virtual std::vector<OrderIntent> decide(Kernel&, const MarketView&) { return {}; }

  RandomStream& stream() { return stream_; }
  AgentId exchange() const { return exchange_; }

 private:
  AgentId exchange_;
  RandomStream stream_;
  Shares holding_{0};
  Cents cash_{0};
  std::map<OrderId, Shares> open_;
  std::uint32_t next_seq_{0};
};

struct ValueAgentParams {
  double wake_interval_s{150.0};
  double wake_jitter{0.5};  // interval drawn uniformly from interval * (1 +- jitter)
  double band{0.002};
  double obs_sigma{31.6};
  Shares qty{100};
};

class ValueAgent : public TraderAgent {
 public:
  ValueAgent(AgentId exchange, RandomStream stream, const FundamentalPath& fundamental, ValueAgentParams params)
      : TraderAgent(exchange, stream), fundamental_(&fundamental), params_(params) {}

 protected:
  std::optional<SimTime> first_wakeup() override;
  std::optional<SimTime> next_wakeup(SimTime now) override;
  std::vector<OrderIntent> decide(Kernel& kernel, const MarketView& view) override;

 private:
  const FundamentalPath* fundamental_;
  ValueAgentParams params_;
};

struct NoiseAgentParams {
  double wakes_per_day{6.0};
  Shares min_qty{10};
  Shares max_qty{50};
};

class NoiseAgent : public TraderAgent {
 public:
  NoiseAgent(AgentId exchange, RandomStream stream, NoiseAgentParams params, SimTime horizon)
      : TraderAgent(exchange, stream), params_(params), horizon_(horizon) {}

 protected:
  std::optional<SimTime> first_wakeup() override { return next_wakeup(SimTime{}); }
  std::optional<SimTime> next_wakeup(SimTime now) override;
  std::vector<OrderIntent> decide(Kernel& kernel, const MarketView& view) override;

 private:
  NoiseAgentParams params_;
  SimTime horizon_;
};

struct TrendAgentParams {
  double wake_interval_s{30.0};
  MomentumWindows windows{};
  Shares qty{100};
};

class MomentumAgent : public TraderAgent {
 public:
  MomentumAgent(AgentId exchange, RandomStream stream, TrendAgentParams params)
      : TraderAgent(exchange, stream), params_(params) {}

 protected:
  std::optional<SimTime> first_wakeup() override;
  std::optional<SimTime> next_wakeup(SimTime now) override;
  std::vector<OrderIntent> decide(Kernel& kernel, const MarketView& view) override;

  TrendAgentParams params_;
};

/// Momentum follower that trades with market orders and goes silent at the cutoff.
class HerdingAgent : public MomentumAgent {
 public:
  HerdingAgent(AgentId exchange, RandomStream stream, TrendAgentParams params, SimTime cutoff)
      : MomentumAgent(exchange, stream, params), cutoff_(cutoff) {}

 protected:
  std::optional<SimTime> first_wakeup() override;
  std::optional<SimTime> next_wakeup(SimTime now) override;
  std::vector<OrderIntent> decide(Kernel& kernel, const MarketView& view) override;

 private:
  SimTime cutoff_;
};

struct MarketMakerParams {
  double wake_interval_s{10.0};
  Cents half_spread{10};
  Shares size{100};  // per level
  int levels{5};
  Cents level_spacing{10};
};

class MarketMakerAgent : public TraderAgent {
 public:
  MarketMakerAgent(AgentId exchange, RandomStream stream, MarketMakerParams params)
      : TraderAgent(exchange, stream), params_(params) {}

 protected:
  std::optional<SimTime> first_wakeup() override { return SimTime{}; }
  std::optional<SimTime> next_wakeup(SimTime now) override {
    return now + SimTime::from_nanos(static_cast<std::int64_t>(params_.wake_interval_s * 1e9));
  }
  std::vector<OrderIntent> decide(Kernel&, const MarketView& view) override {
    return market_maker_act(view, params_);
  }

 private:
  MarketMakerParams params_;
};

/// Agent whose orders are injected from outside (the learning environment).
class ExternalTrader : public TraderAgent {
 public:
  using TraderAgent::TraderAgent;
};

}  // namespace bubblesim
