#include "bubblesim/rl_env.hpp"

#include <cmath>
#include <stdexcept>

namespace bubblesim {

const char* feature_name(std::size_t i) {
  static constexpr std::array<const char*, kFeatureCount> names{
      "holding",      "imbalance",    "volatility",    "mid_price",     "momentum_30",
      "momentum_60",  "momentum_90",  "momentum_120",  "momentum_180"};
  return names.at(i);
}

Observation build_observation(const PriceSeries& mids, std::size_t len, const BookSnapshot& book, Shares holding,
                              MomentumFeature mode) {
  Observation obs{};
  obs[kHolding] = static_cast<double>(holding);
  obs[kImbalance] = static_cast<double>(book.imbalance());
  obs[kMidPrice] = static_cast<double>(book.mid);
  if (len == 0) return obs;
  const std::size_t vol_begin = len > kVolatilityWindowS ? len - kVolatilityWindowS : 0;
  obs[kVolatility] = mids.stddev(vol_begin, len);
  const double short_ma = mids.trailing_mean(len, kMomentumShortS);
  for (std::size_t k = 0; k < kMomentumLongS.size(); ++k) {
    const double long_ma = mids.trailing_mean(len, kMomentumLongS[k]);
    const double rel = (short_ma - long_ma) / long_ma;
    obs[kMomentum30 + k] = mode == MomentumFeature::ratio ? rel : static_cast<double>((rel > 0) - (rel < 0));
  }
  return obs;
}

Observation normalize(const Observation& raw, const FeatureScaling& scaling) {
  Observation out;
  for (std::size_t i = 0; i < kFeatureCount; ++i) out[i] = (raw[i] - scaling.offset[i]) / scaling.scale[i];
  return out;
}

Observation TradingEnv::reset(ScenarioKind kind, std::uint64_t seed) {
  sim_ = std::make_unique<MarketSimulation>(cfg_, kind, seed, true);
  interval_ = SimTime::from_nanos(static_cast<std::int64_t>(std::llround(cfg_.env.decision_interval_s * 1e9)));
  now_ = SimTime{};
  sim_->run_until(now_);
  tape_.clear();
  done_ = false;
  last_mtm_ = mtm();
  initial_mtm_ = last_mtm_;
  return observation();
}

StepResult TradingEnv::step(Action action) {
  if (done_) throw std::logic_error("step on a finished episode");
  TapeRow row{now_.whole_seconds(), action, 0, holding(), mid_now()};
  ExternalTrader& trader = *sim_->external();
  if (action == Action::buy)
    trader.submit(sim_->kernel(), OrderIntent::market(Side::buy, cfg_.env.order_qty));
  else if (action == Action::sell)
    trader.submit(sim_->kernel(), OrderIntent::market(Side::sell, cfg_.env.order_qty));

  now_ = std::min(now_ + interval_, sim_->horizon());
  sim_->run_until(now_);
  const Cents value = mtm();
  row.reward = value - last_mtm_;
  last_mtm_ = value;
  tape_.push_back(row);
  done_ = now_ >= sim_->horizon();
  return StepResult{observation(), row.reward, done_};
}

Observation TradingEnv::observation() const {
  const Exchange& ex = sim_->exchange();
  const std::size_t len = static_cast<std::size_t>(now_.whole_seconds()) + 1;
  return build_observation(ex.mids(), len, ex.snapshot(now_), holding(), cfg_.env.momentum_feature);
}

Cents TradingEnv::mid_now() const { return sim_->exchange().snapshot(now_).mid; }

Shares TradingEnv::holding() const { return sim_->external()->holding(); }

Cents TradingEnv::mtm() const {
  const ExternalTrader& trader = *sim_->external();
  return cfg_.env.starting_cash + trader.cash() + trader.holding() * mid_now();
}

}  // namespace bubblesim
