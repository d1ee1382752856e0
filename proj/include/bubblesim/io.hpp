#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bubblesim/bubbles.hpp"
#include "bubblesim/exchange.hpp"
#include "bubblesim/market.hpp"
#include "bubblesim/order_book.hpp"
#include "bubblesim/ppo.hpp"
#include "bubblesim/rl_env.hpp"
#include "bubblesim/shapley.hpp"

namespace bubblesim {

class CsvError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct MetricsRecord {
  int run_id{0};
  std::uint64_t seed{0};
  int arm_pct{0};
  double profit_pct{0.0};
  int bubble_count{0};
  std::optional<double> avg_magnitude_cents;
  std::optional<double> avg_duration_s;
};

struct BubbleRow {
  int run_id{0};
  BubbleEvent event;
};

struct EpisodeRow {
  int run_id{0};
  TapeRow step;
};

struct AttributionRow {
  int run_id{0};
  AttributionRecord record;
};

void write_trades_csv(const std::filesystem::path& path, std::span<const Trade> trades);
/// Every accepted order with the role of the sending agent.
void write_orders_csv(const std::filesystem::path& path, std::span<const OrderLogEntry> orders,
                      std::span<const Role> roles);
/// time_s,<value_name>: one row per per-second sample.
void write_series_csv(const std::filesystem::path& path, const std::string& value_name, std::span<const Cents> values);
void write_bubbles_csv(const std::filesystem::path& path, std::span<const BubbleRow> rows);
void write_episodes_csv(const std::filesystem::path& path, std::span<const EpisodeRow> rows);
void write_metrics_csv(const std::filesystem::path& path, std::span<const MetricsRecord> rows);
void write_attribution_csv(const std::filesystem::path& path, std::span<const AttributionRow> rows);
void write_train_log_csv(const std::filesystem::path& path, std::span<const TrainLogRow> rows);

/// Reads the second column of a two-column per-second series file.
std::vector<Cents> read_series_csv(const std::filesystem::path& path);
std::vector<MetricsRecord> read_metrics_csv(const std::filesystem::path& path);

/// Fixed-point text for a double, identical across runs and platforms.
std::string format_fixed(double v, int digits);

}  // namespace bubblesim
