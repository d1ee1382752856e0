#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "bubblesim/agents.hpp"
#include "bubblesim/fundamental.hpp"

namespace bubblesim {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kConfigVersion = 1;
inline constexpr std::size_t kFeatureCount = 9;

struct RosterConfig {
  int value{50};
  int noise{500};
  int momentum{8};
  int herding{5};
  int market_makers{1};
};

enum class DetectionMode { any_sample, mean_deviation };

struct DetectorConfig {
  std::size_t short_s{300};
  std::size_t long_s{1800};
  double threshold{0.02};
  DetectionMode mode{DetectionMode::any_sample};
};

enum class MomentumFeature { ratio, sign };

/// Per-feature affine map applied before the policy: (raw - offset) / scale.
struct FeatureScaling {
  std::array<double, kFeatureCount> offset{0, 0, 0, 100'000, 0, 0, 0, 0, 0};
  std::array<double, kFeatureCount> scale{1'000, 200, 100, 1'000, 0.005, 0.005, 0.005, 0.005, 0.005};
};

struct EnvConfig {
  double decision_interval_s{60.0};
  Shares order_qty{100};
  Cents starting_cash{10'000'000};
  MomentumFeature momentum_feature{MomentumFeature::ratio};
  FeatureScaling scaling{};
};

struct PpoConfig {
  double clip{0.2};
  double gamma{0.99};
  double lambda{0.95};
  int epochs{4};
  int minibatch{256};
  double learning_rate{3e-4};
  double entropy_coef{0.01};
  double value_coef{0.5};
  double max_grad_norm{0.5};
  bool normalize_advantages{true};
  int hidden{64};
  int episodes_per_update{4};
  double reward_scale{1e-4};  // cents -> learner units
};

struct TrainConfig {
  int bubble_mix_pct{0};
  int episodes{400};
  PpoConfig ppo{};
  std::uint64_t seed{1};
};

/// Scalar explained by attribution: p(SELL) - p(BUY), or one action logit.
enum class AttributionTarget { action_score, buy_logit, hold_logit, sell_logit };

struct ExperimentConfig {
  std::vector<int> arms{0, 25, 50, 75, 100};
  int n_test{100};
  int train_pool_size{100};
  int screen_candidates{800};
  int workers{1};
  int attribution_permutations{200};
  AttributionTarget attribution_target{AttributionTarget::action_score};
};

struct SeedLists {
  std::vector<std::uint64_t> bubble;
  std::vector<std::uint64_t> nonbubble;
  std::vector<std::uint64_t> test;
};

struct ScenarioConfig {
  int version{kConfigVersion};
  std::uint64_t master_seed{20231215};
  double horizon_s{23'400.0};
  std::int64_t latency_ns{1'000};
  OUParams fundamental{};
  RosterConfig roster{};
  ValueAgentParams value{};
  NoiseAgentParams noise{};
  TrendAgentParams momentum{};
  TrendAgentParams herding{};
  double herding_cutoff_s{12'000.0};
  MarketMakerParams market_maker{};
  DetectorConfig detector{};
  EnvConfig env{};
  TrainConfig train{};
  ExperimentConfig experiment{};
  SeedLists seeds{};

  SimTime horizon() const { return SimTime::from_nanos(static_cast<std::int64_t>(horizon_s * 1e9)); }
  SimTime herding_cutoff() const {
    return SimTime::from_nanos(static_cast<std::int64_t>(herding_cutoff_s * 1e9));
  }

  /// Throws ConfigError on any violated invariant.
  void validate() const;
};

/// Parses a versioned JSON document. Missing keys keep their defaults;
/// unknown keys and version mismatches throw ConfigError.
ScenarioConfig parse_config(const std::string& text);
ScenarioConfig load_config(const std::filesystem::path& path);

/// Canonical JSON text (sorted keys, every field present).
std::string dump_config(const ScenarioConfig& cfg);

/// FNV-1a of the canonical dump; embedded in checkpoints.
std::uint64_t config_hash(const ScenarioConfig& cfg);

}  // namespace bubblesim
