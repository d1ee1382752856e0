#include "bubblesim/bubbles.hpp"

#include <algorithm>
#include <cmath>

#include "bubblesim/series.hpp"

namespace bubblesim {

namespace {

// Signed deviation in the candidate's direction, relative to the fundamental.
double directed_deviation(Cents mid, Cents fund, BubbleDirection dir) {
  const double rel = static_cast<double>(mid - fund) / static_cast<double>(fund);
  return dir == BubbleDirection::up ? rel : -rel;
}

std::optional<BubbleEvent> classify(std::span<const Cents> mid, std::span<const Cents> fund, std::size_t start,
                                    std::size_t end, BubbleDirection dir, const DetectorConfig& cfg) {
  if (end <= start) return std::nullopt;
  bool body = false;
  double dev_sum = 0.0;
  double abs_gap_sum = 0.0;
  for (std::size_t i = start; i <= end; ++i) {
    const double dev = directed_deviation(mid[i], fund[i], dir);
    if (dev >= cfg.threshold) body = true;
    dev_sum += dev;
    abs_gap_sum += static_cast<double>(std::llabs(fund[i] - mid[i]));
  }
  const auto n = static_cast<double>(end - start + 1);
  if (cfg.mode == DetectionMode::mean_deviation) body = dev_sum / n >= cfg.threshold;
  if (!body) return std::nullopt;
  return BubbleEvent{static_cast<std::int64_t>(start), static_cast<std::int64_t>(end), dir, abs_gap_sum / n};
}

}  // namespace

std::vector<BubbleEvent> detect_bubbles(std::span<const Cents> mid, std::span<const Cents> fundamental,
                                        const DetectorConfig& cfg) {
  std::vector<BubbleEvent> events;
  const std::size_t n = std::min(mid.size(), fundamental.size());
  if (n < cfg.long_s || cfg.short_s == 0) return events;
  const PriceSeries prices(mid.first(n));

  enum class Regime { none, up, down };
  Regime regime = Regime::none;
  std::size_t open_at = 0;

  auto close = [&](std::size_t at) {
    if (regime == Regime::none) return;
    const auto dir = regime == Regime::up ? BubbleDirection::up : BubbleDirection::down;
    if (auto ev = classify(mid, fundamental, open_at, at, dir, cfg)) events.push_back(*ev);
  };

  for (std::size_t t = cfg.long_s - 1; t < n; ++t) {
    const int s = moving_average_signal(prices, t + 1, cfg.short_s, cfg.long_s);
    if (s > 0 && regime != Regime::up) {
      close(t);
      regime = Regime::up;
      open_at = t;
    } else if (s < 0 && regime != Regime::down) {
      close(t);
      regime = Regime::down;
      open_at = t;
    }
  }
  close(n - 1);
  return events;
}

BubbleMetrics measure_bubbles(std::span<const BubbleEvent> events) {
  BubbleMetrics m;
  m.count = static_cast<int>(events.size());
  if (events.empty()) return m;
  double mag = 0.0;
  double dur = 0.0;
  for (const BubbleEvent& e : events) {
    mag += e.magnitude;
    dur += static_cast<double>(e.duration_s());
  }
  m.avg_magnitude = mag / static_cast<double>(events.size());
  m.avg_duration_s = dur / static_cast<double>(events.size());
  return m;
}

}  // namespace bubblesim
