#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace bubblesim {

struct KruskalWallis {
  double h{0.0};  // tie-corrected statistic
  double p{1.0};  // chi-square upper tail with groups-1 degrees of freedom
  int df{0};
};

/// Kruskal-Wallis H test over k >= 2 groups with average ranks for ties.
/// When every observation is tied the statistic is 0 and p is 1. Throws
/// std::invalid_argument with fewer than two non-empty groups.
KruskalWallis kruskal_wallis(std::span<const std::vector<double>> groups);

/// Average ranks (1-based), ties share the mean of their positions.
std::vector<double> average_ranks(std::span<const double> values);

struct Summary {
  std::size_t n{0};
  double mean{0.0};
  double stddev{0.0};  // sample (n-1); 0 when n < 2
  double min{0.0};
  double max{0.0};
};

Summary summarize(std::span<const double> values);

struct Histogram {
  double lo{0.0};
  double width{0.0};
  std::vector<std::size_t> counts;
};

/// Equal-width bins over [min, max]; the maximum lands in the last bin.
Histogram histogram(std::span<const double> values, std::size_t bins);

}  // namespace bubblesim
