#include "bubblesim/agents.hpp"

#include <algorithm>
#include <cmath>
#include <type_traits>

namespace bubblesim {

namespace {

SimTime seconds(double s) { return SimTime::from_nanos(static_cast<std::int64_t>(std::llround(s * 1e9))); }

double jittered(RandomStream& rng, double base, double jitter) {
  return base * (1.0 + jitter * (2.0 * rng.uniform() - 1.0));
}

}  // namespace

// ---------------------------------------------------------------- rules

std::vector<OrderIntent> value_agent_act(const MarketView& view, Cents observed_value, double band, Shares qty) {
  const auto mid = static_cast<double>(view.book.mid);
  const auto value = static_cast<double>(observed_value);
  if (mid < value * (1.0 - band)) {
    const Cents px = view.book.best_ask ? view.book.best_ask->price : observed_value;
    return {OrderIntent::limit(Side::buy, qty, px)};
  }
  if (mid > value * (1.0 + band)) {
    const Cents px = view.book.best_bid ? view.book.best_bid->price : observed_value;
    return {OrderIntent::limit(Side::sell, qty, px)};
  }
  return {};
}

std::vector<OrderIntent> noise_agent_act(const MarketView& view, RandomStream& stream, Shares min_qty,
                                         Shares max_qty) {
  if (!view.book.best_bid && !view.book.best_ask) return {};
  const Side side = stream.bernoulli(0.5) ? Side::buy : Side::sell;
  const Shares qty = stream.uniform_int(min_qty, max_qty);
  const auto& touch = side == Side::buy ? view.book.best_ask : view.book.best_bid;
  const Cents px = touch ? touch->price : view.book.mid;
  return {OrderIntent::limit(side, qty, std::max<Cents>(1, px))};
}

int momentum_signal(const MarketView& view, MomentumWindows windows) {
  if (view.prices == nullptr) return 0;
  return moving_average_signal(*view.prices, view.price_len, windows.short_s, windows.long_s);
}

std::vector<OrderIntent> momentum_agent_act(const MarketView& view, MomentumWindows windows, Shares qty) {
  const int signal = momentum_signal(view, windows);
  if (signal > 0 && view.book.best_ask) return {OrderIntent::limit(Side::buy, qty, view.book.best_ask->price)};
  if (signal < 0 && view.book.best_bid) return {OrderIntent::limit(Side::sell, qty, view.book.best_bid->price)};
  return {};
}

std::vector<OrderIntent> herding_agent_act(const MarketView& view, SimTime now, SimTime cutoff,
                                           MomentumWindows windows, Shares qty) {
  if (now >= cutoff) return {};
  const int signal = momentum_signal(view, windows);
  if (signal > 0) return {OrderIntent::market(Side::buy, qty)};
  if (signal < 0) return {OrderIntent::market(Side::sell, qty)};
  return {};
}

std::vector<OrderIntent> market_maker_act(const MarketView& view, const MarketMakerParams& params) {
  std::vector<OrderIntent> out;
  for (OrderId id : view.open_orders) out.push_back(OrderIntent::cancel(id));
  const Cents mid = view.book.mid;
  for (int k = 0; k < params.levels; ++k) {
    const Cents offset = params.half_spread + k * params.level_spacing;
    if (mid - offset >= 1) out.push_back(OrderIntent::limit(Side::buy, params.size, mid - offset));
    out.push_back(OrderIntent::limit(Side::sell, params.size, mid + offset));
  }
  return out;
}

// ---------------------------------------------------------------- plumbing

void TraderAgent::on_start(Kernel& kernel) {
  if (auto t = first_wakeup()) kernel.set_wakeup(id(), *t);
}

void TraderAgent::on_wakeup(Kernel& kernel, SimTime now) {
  kernel.send(id(), exchange_, BookQuery{});
  if (auto t = next_wakeup(now)) kernel.set_wakeup(id(), *t);
}

void TraderAgent::on_message(Kernel& kernel, const Message& msg) {
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, SnapshotReport>) {
          MarketView view;
          view.book = p.book;
          view.prices = p.history;
          view.price_len = p.history_len;
          view.holding = holding_;
          view.cash = cash_;
          view.open_orders.reserve(open_.size());
          for (const auto& [oid, qty] : open_) view.open_orders.push_back(oid);
          for (const OrderIntent& intent : decide(kernel, view)) submit(kernel, intent);
        } else if constexpr (std::is_same_v<T, FillReport>) {
          const Cents notional = p.trade.price * p.trade.qty;
          if (p.side == Side::buy) {
            holding_ += p.trade.qty;
            cash_ -= notional;
          } else {
            holding_ -= p.trade.qty;
            cash_ += notional;
          }
          if (auto it = open_.find(p.order); it != open_.end()) {
            it->second -= p.trade.qty;
            if (it->second <= 0) open_.erase(it);
          }
        } else if constexpr (std::is_same_v<T, CancelReport>) {
          open_.erase(p.order);
        }
      },
      msg.payload);
}

OrderId TraderAgent::submit(Kernel& kernel, const OrderIntent& intent) {
  if (intent.kind == OrderIntent::Kind::cancel) {
    kernel.send(id(), exchange_, CancelRequest{intent.target});
    return intent.target;
  }
  Order order;
  order.id = (static_cast<OrderId>(id()) << 32) | ++next_seq_;
  order.agent = id();
  order.side = intent.side;
  order.type = intent.kind == OrderIntent::Kind::market ? OrderType::market : OrderType::limit;
  order.qty = intent.qty;
  order.limit_price = order.type == OrderType::limit ? intent.price : 0;
  order.ts = kernel.now();
  open_.emplace(order.id, order.qty);
  kernel.send(id(), exchange_, OrderSubmission{order});
  return order.id;
}

// ---------------------------------------------------------------- roles

std::optional<SimTime> ValueAgent::first_wakeup() {
  return seconds(stream().uniform() * params_.wake_interval_s);
}

std::optional<SimTime> ValueAgent::next_wakeup(SimTime now) {
  return now + seconds(jittered(stream(), params_.wake_interval_s, params_.wake_jitter));
}

std::vector<OrderIntent> ValueAgent::decide(Kernel& kernel, const MarketView& view) {
  std::vector<OrderIntent> out;
  for (OrderId id : view.open_orders) out.push_back(OrderIntent::cancel(id));
  const Cents obs = observe_fundamental(*fundamental_, kernel.now(), params_.obs_sigma, stream());
  for (const OrderIntent& o : value_agent_act(view, obs, params_.band, params_.qty)) out.push_back(o);
  return out;
}

std::optional<SimTime> NoiseAgent::next_wakeup(SimTime now) {
  const double mean_gap = horizon_.seconds() / params_.wakes_per_day;
  const SimTime t = now + seconds(stream().exponential(mean_gap));
  if (t > horizon_) return std::nullopt;
  return t;
}

std::vector<OrderIntent> NoiseAgent::decide(Kernel&, const MarketView& view) {
  return noise_agent_act(view, stream(), params_.min_qty, params_.max_qty);
}

std::optional<SimTime> MomentumAgent::first_wakeup() {
  return seconds(stream().uniform() * params_.wake_interval_s);
}

std::optional<SimTime> MomentumAgent::next_wakeup(SimTime now) {
  return now + seconds(params_.wake_interval_s);
}

std::vector<OrderIntent> MomentumAgent::decide(Kernel&, const MarketView& view) {
  std::vector<OrderIntent> out;
  for (OrderId id : view.open_orders) out.push_back(OrderIntent::cancel(id));
  for (const OrderIntent& o : momentum_agent_act(view, params_.windows, params_.qty)) out.push_back(o);
  return out;
}

std::optional<SimTime> HerdingAgent::first_wakeup() {
  auto t = MomentumAgent::first_wakeup();
  if (t && *t >= cutoff_) return std::nullopt;
  return t;
}

std::optional<SimTime> HerdingAgent::next_wakeup(SimTime now) {
  const SimTime t = now + seconds(params_.wake_interval_s);
  if (t >= cutoff_) return std::nullopt;
  return t;
}

std::vector<OrderIntent> HerdingAgent::decide(Kernel& kernel, const MarketView& view) {
  return herding_agent_act(view, kernel.now(), cutoff_, params_.windows, params_.qty);
}

}  // namespace bubblesim
