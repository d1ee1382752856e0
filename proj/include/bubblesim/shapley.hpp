#pragma once

#include <functional>
#include <span>
#include <vector>

#include "bubblesim/ppo.hpp"

namespace bubblesim {

/// Scalar model output explained by attribution: p(SELL) - p(BUY).
double action_score(const PolicyNet& net, std::span<const double> x);

/// Raw logit of one action.
double action_logit(const PolicyNet& net, std::span<const double> x, Action a);

using ScalarModel = std::function<double(std::span<const double>)>;

/// The configured attribution target as a scalar model of the scaled input.
ScalarModel attribution_model(const PolicyNet& net, AttributionTarget target);

struct ShapleyResult {
  std::vector<double> values;
  std::vector<double> std_error;  // Monte Carlo standard error of each value
  double output{0.0};             // f(x)
  double baseline_output{0.0};    // f(baseline)
  int permutations{0};

  /// Standard error of sum(values), from the per-permutation totals.
  double sum_std_error{0.0};
};

/// Permutation-sampling Shapley values of f at x against a baseline point.
/// Features outside the coalition take their baseline value.
ShapleyResult shapley_permutation(const ScalarModel& f, std::span<const double> x, std::span<const double> baseline,
                                  int permutations, RandomStream& rng);

/// Exact Shapley values by enumerating all 2^n coalitions (n <= 20).
std::vector<double> shapley_exact(const ScalarModel& f, std::span<const double> x, std::span<const double> baseline);

struct AttributionRecord {
  std::int64_t t_s{0};
  Observation features{};  // raw
  std::array<double, kFeatureCount> shapley{};
  double model_output{0.0};
};

/// Attributions for every decision of one greedy episode. The baseline is
/// the mean scaled observation over the episode; the explained scalar is
/// cfg.experiment.attribution_target.
std::vector<AttributionRecord> episode_attribution(const ScenarioConfig& cfg, const PolicyNet& net,
                                                   ScenarioKind kind, std::uint64_t seed, int permutations);

}  // namespace bubblesim
