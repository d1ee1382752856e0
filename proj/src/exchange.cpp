#include "bubblesim/exchange.hpp"

#include <type_traits>

namespace bubblesim {

namespace {
constexpr std::int64_t kNanosPerSecond = 1'000'000'000;
}

void Exchange::sample_before(SimTime t) {
  while (static_cast<std::int64_t>(mids_.size()) * kNanosPerSecond < t.nanos)
    mids_.push(book_.snapshot(t, fallback_mid_).mid);
}

void Exchange::sample_through(SimTime t) {
  while (static_cast<std::int64_t>(mids_.size()) * kNanosPerSecond <= t.nanos)
    mids_.push(book_.snapshot(t, fallback_mid_).mid);
}

void Exchange::on_message(Kernel& kernel, const Message& msg) {
  sample_before(kernel.now());
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, OrderSubmission>) {
          handle_submission(kernel, msg, p.order);
        } else if constexpr (std::is_same_v<T, CancelRequest>) {
          const Shares left = book_.remaining(p.id).value_or(0);
          const bool ok = book_.cancel(p.id, msg.sender);
          kernel.send(id(), msg.sender, CancelReport{p.id, ok ? left : 0, ok});
        } else if constexpr (std::is_same_v<T, BookQuery>) {
          kernel.send(id(), msg.sender, SnapshotReport{snapshot(kernel.now()), &mids_, mids_.size()});
        }
      },
      msg.payload);
}

void Exchange::handle_submission(Kernel& kernel, const Message& msg, const Order& order) {
  order_log_.push_back(OrderLogEntry{order.ts, order.id, order.agent, order.side, order.type, order.qty,
                                     order.limit_price});
  Order stamped = order;
  stamped.ts = kernel.now();
  const SubmitResult result = book_.submit(stamped);
  for (const Trade& t : result.trades) {
    trades_.push_back(t);
    kernel.send(id(), t.buyer, FillReport{t, t.buy_order, Side::buy});
    kernel.send(id(), t.seller, FillReport{t, t.sell_order, Side::sell});
  }
  if (result.cancelled > 0) kernel.send(id(), msg.sender, CancelReport{order.id, result.cancelled, true});
  if (!result.trades.empty()) {
    kernel.record_trades(result.trades.size());
    for (AgentId sub : subscribers_)
      kernel.send(id(), sub, SnapshotReport{snapshot(kernel.now()), &mids_, mids_.size()});
  }
}

}  // namespace bubblesim
