#pragma once

#include <optional>
#include <span>
#include <vector>

#include "bubblesim/config.hpp"
#include "bubblesim/types.hpp"

namespace bubblesim {

enum class BubbleDirection { up, down };

constexpr const char* to_string(BubbleDirection d) { return d == BubbleDirection::up ? "up" : "down"; }

/// A detected bubble over per-second samples [start_s, end_s].
struct BubbleEvent {
  std::int64_t start_s{0};
  std::int64_t end_s{0};
  BubbleDirection direction{BubbleDirection::up};
  double magnitude{0.0};  // mean |fundamental - mid| over the interval, cents

  std::int64_t duration_s() const { return end_s - start_s; }
};

struct BubbleMetrics {
  int count{0};
  std::optional<double> avg_magnitude;  // absent when no bubble was found
  std::optional<double> avg_duration_s;

  bool has_bubble() const { return count > 0; }
};

/// Moving-average-cross candidates filtered by deviation from the fundamental.
///
/// Both series are sampled once per second from t=0 and are truncated to the
/// shorter length. A candidate opens when the short MA moves above (below)
/// the long MA and closes at the opposite cross or at the last sample; it is
/// a bubble when its body deviates from the fundamental by the threshold in
/// the candidate's direction.
std::vector<BubbleEvent> detect_bubbles(std::span<const Cents> mid, std::span<const Cents> fundamental,
                                        const DetectorConfig& cfg);

BubbleMetrics measure_bubbles(std::span<const BubbleEvent> events);

}  // namespace bubblesim
