#pragma once

#include <vector>

#include "bubblesim/kernel.hpp"
#include "bubblesim/order_book.hpp"
#include "bubblesim/series.hpp"

namespace bubblesim {

struct OrderLogEntry {
  SimTime ts{};  // time the order was sent by the agent
  OrderId id{0};
  AgentId agent{kNoAgent};
  Side side{Side::buy};
  OrderType type{OrderType::limit};
  Shares qty{0};
  Cents limit_price{0};
};

/// Continuous double-auction exchange agent.
///
/// Keeps the book, the trade tape, a log of every accepted order and a mid
/// price sampled once per second. Sample s holds the mid after all events at
/// or before s seconds.
class Exchange : public Agent {
 public:
  explicit Exchange(Cents fallback_mid) : fallback_mid_(fallback_mid) {}

  void on_message(Kernel& kernel, const Message& msg) override;

  /// Pushes a snapshot to `agent` after every batch of trades.
  void subscribe(AgentId agent) { subscribers_.push_back(agent); }

  /// Fills per-second mid samples up to and including t. Only valid once the
  /// kernel has processed every event at or before t.
  void sample_through(SimTime t);

  BookSnapshot snapshot(SimTime ts) const { return book_.snapshot(ts, fallback_mid_); }
  const OrderBook& book() const { return book_; }
  const PriceSeries& mids() const { return mids_; }
  const std::vector<Trade>& trades() const { return trades_; }
  const std::vector<OrderLogEntry>& order_log() const { return order_log_; }
  Cents fallback_mid() const { return fallback_mid_; }

 private:
  // Samples every second strictly before t.
  void sample_before(SimTime t);
  void handle_submission(Kernel& kernel, const Message& msg, const Order& order);

  OrderBook book_;
  Cents fallback_mid_;
  PriceSeries mids_;
  std::vector<Trade> trades_;
  std::vector<OrderLogEntry> order_log_;
  std::vector<AgentId> subscribers_;
};

}  // namespace bubblesim
