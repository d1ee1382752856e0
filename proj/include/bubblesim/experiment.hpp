#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "bubblesim/io.hpp"
#include "bubblesim/learn.hpp"
#include "bubblesim/stats.hpp"

namespace bubblesim {

using Progress = std::function<void(const std::string&)>;

/// The i-th candidate seed derived from a master seed.
std::uint64_t candidate_seed(std::uint64_t master_seed, std::uint64_t index);

/// Detected bubbles of one RL-free run.
std::vector<BubbleEvent> run_background(const ScenarioConfig& cfg, ScenarioKind kind, std::uint64_t seed);

struct ScreenResult {
  SeedLists seeds;
  int candidates{0};
  int bubble_hits{0};     // candidates whose herding run had a bubble
  int nonbubble_hits{0};  // candidates whose herding-free run had none
  std::vector<std::string> warnings;
};

/// Walks candidate seeds in order and fills, without overlap, the training
/// bubble pool, then the test pool (both from herding runs with >= 1
/// bubble) and the non-bubble pool (herding-free runs with no bubble).
ScreenResult screen_seeds(const ScenarioConfig& cfg, int candidates, int workers, const Progress& progress = {});

/// Throws std::invalid_argument when a training seed also appears in the
/// test pool.
void check_pool_hygiene(const SeedLists& seeds);

struct ArmOutcome {
  int arm_pct{0};
  std::vector<TrainLogRow> train_log;
  int bubble_episodes{0};
  int episodes{0};
  std::vector<EvalRecord> evals;
  std::string error;  // non-empty when the arm failed
};

struct ExperimentResult {
  std::vector<ArmOutcome> arms;
  std::vector<MetricsRecord> metrics;  // sorted by (arm order, run index)
};

/// Trains one policy per arm and evaluates each on the shared test pool.
/// Seeds are screened first only when the config carries no pools at all.
/// Writes metrics.csv, bubbles.csv, episodes.csv, report.md and per-arm
/// train logs and checkpoints under out_dir when it is non-empty.
ExperimentResult run_experiment(const ScenarioConfig& cfg, int workers, const std::filesystem::path& out_dir,
                                const Progress& progress = {});

std::vector<MetricsRecord> to_metrics(int arm_pct, int first_run_id, std::span<const EvalRecord> evals);

struct ArmSummary {
  int arm_pct{0};
  Summary profit;
  Summary count;
  Summary magnitude;  // over runs with at least one bubble
  Summary duration;
  double no_bubble_fraction{0.0};
};

struct Report {
  std::vector<ArmSummary> arms;                  // ascending arm
  std::map<std::string, KruskalWallis> tests;    // profit, count, magnitude, duration
  std::map<std::string, std::vector<double>> per_arm_means;
};

/// Throws std::invalid_argument on empty input.
Report build_report(std::span<const MetricsRecord> metrics);

/// report.md, summary.csv, kruskal_wallis.csv and histograms.csv.
void write_report(const Report& report, std::span<const MetricsRecord> metrics, const std::filesystem::path& dir,
                  std::size_t bins = 10);

/// True when `v` is nondecreasing (or nonincreasing) except for at most
/// `allowed` adjacent inversions.
bool monotone_with_inversions(std::span<const double> v, bool increasing, int allowed);

}  // namespace bubblesim
