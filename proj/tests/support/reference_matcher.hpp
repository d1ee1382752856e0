#pragma once

#include <algorithm>
#include <optional>
#include <vector>

#include "bubblesim/order_book.hpp"
#include "bubblesim/random.hpp"

namespace bubblesim::testing {

// Brute-force matcher: one flat list of resting orders scanned linearly.
class ReferenceMatcher {
 public:
  std::vector<Trade> submit(Order o) {
    std::vector<Trade> trades;
    while (o.qty > 0) {
      std::optional<std::size_t> best;
      for (std::size_t i = 0; i < resting_.size(); ++i) {
        const Resting& r = resting_[i];
        if (r.side == o.side) continue;
        if (o.type == OrderType::limit &&
            (o.side == Side::buy ? r.price > o.limit_price : r.price < o.limit_price))
          continue;
        if (!best) {
          best = i;
          continue;
        }
        const Resting& b = resting_[*best];
        const bool better = o.side == Side::buy ? r.price < b.price : r.price > b.price;
        if (better || (r.price == b.price && r.seq < b.seq)) best = i;
      }
      if (!best) break;
      Resting& r = resting_[*best];
      const Shares q = std::min(o.qty, r.qty);
      Trade t;
      t.ts = o.ts;
      t.price = r.price;
      t.qty = q;
      t.buyer = o.side == Side::buy ? o.agent : r.agent;
      t.seller = o.side == Side::buy ? r.agent : o.agent;
      t.buy_order = o.side == Side::buy ? o.id : r.id;
      t.sell_order = o.side == Side::buy ? r.id : o.id;
      trades.push_back(t);
      o.qty -= q;
      r.qty -= q;
      if (r.qty == 0) resting_.erase(resting_.begin() + static_cast<std::ptrdiff_t>(*best));
    }
    if (o.qty > 0 && o.type == OrderType::limit) resting_.push_back({o.id, o.agent, o.side, o.limit_price, o.qty, seq_++});
    return trades;
  }

  bool cancel(OrderId id, AgentId agent) {
    for (auto it = resting_.begin(); it != resting_.end(); ++it)
      if (it->id == id) {
        if (it->agent != agent) return false;
        resting_.erase(it);
        return true;
      }
    return false;
  }

  // Bids best-first then asks best-first, FIFO within a price.
  std::vector<RestingOrder> resting_orders() const {
    std::vector<Resting> bids;
    std::vector<Resting> asks;
    for (const Resting& r : resting_) (r.side == Side::buy ? bids : asks).push_back(r);
    std::stable_sort(bids.begin(), bids.end(), [](const Resting& a, const Resting& b) {
      return a.price != b.price ? a.price > b.price : a.seq < b.seq;
    });
    std::stable_sort(asks.begin(), asks.end(), [](const Resting& a, const Resting& b) {
      return a.price != b.price ? a.price < b.price : a.seq < b.seq;
    });
    std::vector<RestingOrder> out;
    for (const auto* side : {&bids, &asks})
      for (const Resting& r : *side) out.push_back({r.id, r.agent, r.side, r.price, r.qty});
    return out;
  }

 private:
  struct Resting {
    OrderId id;
    AgentId agent;
    Side side;
    Cents price;
    Shares qty;
    std::uint64_t seq;
  };
  std::vector<Resting> resting_;
  std::uint64_t seq_{0};
};

struct BookEvent {
  bool is_cancel{false};
  Order order;  // for a cancel only id and agent are used
};

// Mixed submit/cancel stream over a narrow price band so books cross often.
inline std::vector<BookEvent> random_book_stream(RandomStream& rng, std::size_t max_events) {
  const auto n = static_cast<std::size_t>(rng.uniform_int(1, static_cast<std::int64_t>(max_events)));
  std::vector<BookEvent> out;
  std::vector<std::pair<OrderId, AgentId>> submitted;
  OrderId next_id = 1;
  for (std::size_t i = 0; i < n; ++i) {
    BookEvent ev;
    const double u = rng.uniform();
    if (u < 0.25 && !submitted.empty()) {
      ev.is_cancel = true;
      const auto& [id, agent] = submitted[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(submitted.size()) - 1))];
      ev.order.id = id;
      ev.order.agent = rng.bernoulli(0.9) ? agent : agent + 1;
    } else {
      Order& o = ev.order;
      o.id = next_id++;
      o.agent = static_cast<AgentId>(rng.uniform_int(0, 9));
      o.side = rng.bernoulli(0.5) ? Side::buy : Side::sell;
      o.type = u > 0.9 ? OrderType::market : OrderType::limit;
      o.qty = rng.uniform_int(1, 60);
      o.limit_price = o.type == OrderType::limit ? rng.uniform_int(9'990, 10'010) : 0;
      o.ts = SimTime::from_micros(static_cast<std::int64_t>(i));
      submitted.emplace_back(o.id, o.agent);
    }
    out.push_back(ev);
  }
  return out;
}

struct StreamCheck {
  bool equal{true};
  std::size_t trades{0};
};

inline StreamCheck replay_against_reference(const std::vector<BookEvent>& events) {
  OrderBook book;
  ReferenceMatcher ref;
  StreamCheck check;
  std::vector<Trade> tape;
  std::vector<Trade> ref_tape;
  for (const BookEvent& ev : events) {
    if (ev.is_cancel) {
      if (book.cancel(ev.order.id, ev.order.agent) != ref.cancel(ev.order.id, ev.order.agent)) check.equal = false;
      continue;
    }
    const auto r = book.submit(ev.order);
    tape.insert(tape.end(), r.trades.begin(), r.trades.end());
    const auto rt = ref.submit(ev.order);
    ref_tape.insert(ref_tape.end(), rt.begin(), rt.end());
  }
  check.trades = tape.size();
  if (tape != ref_tape || book.resting_orders() != ref.resting_orders()) check.equal = false;
  return check;
}

}  // namespace bubblesim::testing
