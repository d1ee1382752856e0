#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "bubblesim/bubbles.hpp"
#include "bubblesim/ppo.hpp"

namespace bubblesim {

struct ScenarioDraw {
  ScenarioKind kind{ScenarioKind::nonbubble};
  std::uint64_t seed{0};
};

/// Draws the scenario type of each training episode with probability
/// mix/100 and walks each seed pool in a shuffled order, reshuffling when a
/// pool is exhausted.
class SeedScheduler {
 public:
  SeedScheduler(int bubble_mix_pct, std::vector<std::uint64_t> bubble_pool, std::vector<std::uint64_t> nonbubble_pool,
                RandomStream rng);

  ScenarioDraw next();

  int bubble_draws() const { return bubble_draws_; }
  int reshuffles() const { return reshuffles_; }

 private:
  struct Pool {
    std::vector<std::uint64_t> seeds;
    std::size_t pos{0};
  };
  std::uint64_t take(Pool& pool);

  int mix_;
  Pool bubble_;
  Pool nonbubble_;
  RandomStream rng_;
  int bubble_draws_{0};
  int reshuffles_{0};
};

/// Plays one episode. Steps carry scaled observations and rewards.
Episode play_episode(TradingEnv& env, const PolicyNet& net, ScenarioKind kind, std::uint64_t seed, ActMode mode,
                     RandomStream* rng);

struct MarketTrainResult {
  PolicyNet net;
  std::vector<TrainLogRow> log;
  int bubble_episodes{0};
  int episodes{0};
  int reshuffles{0};
};

/// Trains one agent for cfg.train.episodes episodes (rounded up to whole
/// updates) with the configured bubble mix.
MarketTrainResult train_market(const ScenarioConfig& cfg, std::span<const std::uint64_t> bubble_pool,
                               std::span<const std::uint64_t> nonbubble_pool, int workers);

struct EvalRecord {
  int run_id{0};
  std::uint64_t seed{0};
  double profit_pct{0.0};
  Cents initial_mtm{0};
  Cents final_mtm{0};
  std::vector<BubbleEvent> events;
  BubbleMetrics metrics;
  std::vector<TapeRow> tape;
};

/// Greedy-policy runs on bubble scenarios for the first n_runs test seeds
/// (cycling when n_runs exceeds the pool).
std::vector<EvalRecord> evaluate(const ScenarioConfig& cfg, const PolicyNet& net,
                                 std::span<const std::uint64_t> test_seeds, int n_runs, int workers);

/// Policy weights plus the full config they were trained under.
struct Checkpoint {
  ScenarioConfig config;
  PolicyNet net;
};

/// JSON with the config, its hash and the flat weight vector. Loading checks
/// the stored hash against the stored config and throws on a mismatch.
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace bubblesim
