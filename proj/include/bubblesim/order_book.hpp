#pragma once

#include <functional>
#include <list>
#include <map>
#include <optional>
#include <unordered_map>
#include <vector>

#include "bubblesim/types.hpp"

namespace bubblesim {

struct Order {
  OrderId id{0};
  AgentId agent{kNoAgent};
  Side side{Side::buy};
  OrderType type{OrderType::limit};
  Shares qty{0};
  Cents limit_price{0};  // ignored for market orders
  SimTime ts{};
};

struct Trade {
  SimTime ts{};
  Cents price{0};
  Shares qty{0};
  AgentId buyer{kNoAgent};
  AgentId seller{kNoAgent};
  OrderId buy_order{0};
  OrderId sell_order{0};

  friend bool operator==(const Trade&, const Trade&) = default;
};

struct Level {
  Cents price{0};
  Shares qty{0};

  friend bool operator==(const Level&, const Level&) = default;
};

struct BookSnapshot {
  SimTime ts{};
  std::optional<Level> best_bid;
  std::optional<Level> best_ask;
  Cents mid{0};
  std::optional<Cents> last_trade;

  Shares imbalance() const {
    return (best_bid ? best_bid->qty : 0) - (best_ask ? best_ask->qty : 0);
  }
};

/// A resting order as seen from outside the book, in priority order.
struct RestingOrder {
  OrderId id{0};
  AgentId agent{kNoAgent};
  Side side{Side::buy};
  Cents price{0};
  Shares remaining{0};

  friend bool operator==(const RestingOrder&, const RestingOrder&) = default;
};

struct SubmitResult {
  std::vector<Trade> trades;
  Shares filled{0};
  Shares rested{0};     // limit residue left in the book
  Shares cancelled{0};  // market residue with no liquidity left
};

/// Two-sided limit order book with price-time priority.
///
/// Trades execute at the resting order's price. Market orders never rest: any
/// quantity left after sweeping the opposite side is cancelled.
class OrderBook {
 public:
  /// Throws std::invalid_argument for non-positive quantity, non-positive
  /// limit price, or an id that is already resting.
  SubmitResult submit(const Order& order);

  /// True iff `id` was resting and owned by `agent`; the order is removed.
  bool cancel(OrderId id, AgentId agent);

  BookSnapshot snapshot(SimTime ts, Cents fallback_mid) const;

  std::optional<Level> best_bid() const;
  std::optional<Level> best_ask() const;
  std::optional<Cents> last_trade_price() const { return last_trade_; }

  /// Aggregated levels, best first.
  std::vector<Level> depth(Side side) const;

  /// Every resting order: bids best-first then asks best-first, FIFO within a level.
  std::vector<RestingOrder> resting_orders() const;

  bool contains(OrderId id) const { return index_.contains(id); }
  std::optional<Shares> remaining(OrderId id) const {
    auto it = index_.find(id);
    if (it == index_.end()) return std::nullopt;
    return it->second.it->remaining;
  }
  std::size_t order_count() const { return index_.size(); }
  bool empty() const { return bids_.empty() && asks_.empty(); }

 private:
  struct Entry {
    OrderId id;
    AgentId agent;
    Shares remaining;
  };
  struct PriceLevel {
    Shares total{0};
    std::list<Entry> queue;
  };
  using BidMap = std::map<Cents, PriceLevel, std::greater<>>;
  using AskMap = std::map<Cents, PriceLevel>;
  struct Locator {
    Side side;
    Cents price;
    std::list<Entry>::iterator it;
  };

  template <typename Map>
  void match_against(Map& book, Order& incoming, SubmitResult& result);
  template <typename Map>
  void rest(Map& book, const Order& order);

  BidMap bids_;
  AskMap asks_;
  std::unordered_map<OrderId, Locator> index_;
  std::optional<Cents> last_trade_;
};

}  // namespace bubblesim
