#include "bubblesim/order_book.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace bubblesim {

namespace {

bool marketable(const Order& o, Cents resting_price) {
  if (o.type == OrderType::market) return true;
  return o.side == Side::buy ? resting_price <= o.limit_price : resting_price >= o.limit_price;
}

}  // namespace

template <typename Map>
void OrderBook::match_against(Map& book, Order& incoming, SubmitResult& result) {
  while (incoming.qty > 0 && !book.empty()) {
    auto level_it = book.begin();
    if (!marketable(incoming, level_it->first)) break;
    PriceLevel& level = level_it->second;
    while (incoming.qty > 0 && !level.queue.empty()) {
      Entry& resting = level.queue.front();
      const Shares fill = std::min(incoming.qty, resting.remaining);
      Trade t;
      t.ts = incoming.ts;
      t.price = level_it->first;
      t.qty = fill;
      if (incoming.side == Side::buy) {
        t.buyer = incoming.agent;
        t.buy_order = incoming.id;
        t.seller = resting.agent;
        t.sell_order = resting.id;
      } else {
        t.seller = incoming.agent;
        t.sell_order = incoming.id;
        t.buyer = resting.agent;
        t.buy_order = resting.id;
      }
      result.trades.push_back(t);
      result.filled += fill;
      last_trade_ = t.price;
      incoming.qty -= fill;
      resting.remaining -= fill;
      level.total -= fill;
      if (resting.remaining == 0) {
        index_.erase(resting.id);
        level.queue.pop_front();
      }
    }
    if (level.queue.empty()) book.erase(level_it);
  }
}

template <typename Map>
void OrderBook::rest(Map& book, const Order& order) {
  PriceLevel& level = book[order.limit_price];
  level.queue.push_back(Entry{order.id, order.agent, order.qty});
  level.total += order.qty;
  index_.emplace(order.id, Locator{order.side, order.limit_price, std::prev(level.queue.end())});
}

SubmitResult OrderBook::submit(const Order& order) {
  if (order.qty <= 0) throw std::invalid_argument("order quantity must be positive");
  if (order.type == OrderType::limit && order.limit_price <= 0)
    throw std::invalid_argument("limit price must be positive");
  if (index_.contains(order.id))
    throw std::invalid_argument("duplicate order id " + std::to_string(order.id));

  SubmitResult result;
  Order incoming = order;
  if (incoming.side == Side::buy)
    match_against(asks_, incoming, result);
  else
    match_against(bids_, incoming, result);

  if (incoming.qty > 0) {
    if (incoming.type == OrderType::market) {
      result.cancelled = incoming.qty;
    } else {
      result.rested = incoming.qty;
      if (incoming.side == Side::buy)
        rest(bids_, incoming);
      else
        rest(asks_, incoming);
    }
  }
  return result;
}

bool OrderBook::cancel(OrderId id, AgentId agent) {
  auto found = index_.find(id);
  if (found == index_.end() || found->second.it->agent != agent) return false;
  const Locator loc = found->second;
  auto drop = [&](auto& book) {
    auto level_it = book.find(loc.price);
    level_it->second.total -= loc.it->remaining;
    level_it->second.queue.erase(loc.it);
    if (level_it->second.queue.empty()) book.erase(level_it);
  };
  if (loc.side == Side::buy)
    drop(bids_);
  else
    drop(asks_);
  index_.erase(found);
  return true;
}

std::optional<Level> OrderBook::best_bid() const {
  if (bids_.empty()) return std::nullopt;
  return Level{bids_.begin()->first, bids_.begin()->second.total};
}

std::optional<Level> OrderBook::best_ask() const {
  if (asks_.empty()) return std::nullopt;
  return Level{asks_.begin()->first, asks_.begin()->second.total};
}

BookSnapshot OrderBook::snapshot(SimTime ts, Cents fallback_mid) const {
  BookSnapshot s;
  s.ts = ts;
  s.best_bid = best_bid();
  s.best_ask = best_ask();
  s.last_trade = last_trade_;
  if (s.best_bid && s.best_ask)
    s.mid = (s.best_bid->price + s.best_ask->price) / 2;
  else
    s.mid = last_trade_.value_or(fallback_mid);
  return s;
}

std::vector<Level> OrderBook::depth(Side side) const {
  std::vector<Level> out;
  auto collect = [&](const auto& book) {
    for (const auto& [price, level] : book) out.push_back(Level{price, level.total});
  };
  if (side == Side::buy)
    collect(bids_);
  else
    collect(asks_);
  return out;
}

std::vector<RestingOrder> OrderBook::resting_orders() const {
  std::vector<RestingOrder> out;
  out.reserve(index_.size());
  auto collect = [&](const auto& book, Side side) {
    for (const auto& [price, level] : book)
      for (const Entry& e : level.queue) out.push_back(RestingOrder{e.id, e.agent, side, price, e.remaining});
  };
  collect(bids_, Side::buy);
  collect(asks_, Side::sell);
  return out;
}

}  // namespace bubblesim
