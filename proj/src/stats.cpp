#include "bubblesim/stats.hpp"

#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace bubblesim {

std::vector<double> average_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

KruskalWallis kruskal_wallis(std::span<const std::vector<double>> groups) {
  std::vector<double> all;
  std::vector<std::size_t> sizes;
  for (const auto& g : groups) {
    if (g.empty()) continue;
    sizes.push_back(g.size());
    all.insert(all.end(), g.begin(), g.end());
  }
  if (sizes.size() < 2) throw std::invalid_argument("Kruskal-Wallis needs at least two non-empty groups");
  for (double v : all)
    if (!std::isfinite(v)) throw std::invalid_argument("Kruskal-Wallis input must be finite");

  const auto ranks = average_ranks(all);
  const auto n = static_cast<double>(all.size());
  double term = 0.0;
  std::size_t offset = 0;
  for (std::size_t size : sizes) {
    double r = 0.0;
    for (std::size_t i = 0; i < size; ++i) r += ranks[offset + i];
    term += r * r / static_cast<double>(size);
    offset += size;
  }
  KruskalWallis out;
  out.df = static_cast<int>(sizes.size()) - 1;

  std::vector<double> sorted = all;
  std::sort(sorted.begin(), sorted.end());
  double ties = 0.0;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    const auto t = static_cast<double>(j - i);
    ties += t * t * t - t;
    i = j;
  }
  const double correction = 1.0 - ties / (n * n * n - n);
  if (correction <= 0.0) return out;  // all observations tied

  out.h = (12.0 / (n * (n + 1.0)) * term - 3.0 * (n + 1.0)) / correction;
  out.h = std::max(0.0, out.h);
  out.p = boost::math::gamma_q(out.df / 2.0, out.h / 2.0);
  return out;
}

Summary summarize(std::span<const double> values) {
  Summary s;
  s.n = values.size();
  if (s.n == 0) return s;
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(s.n);
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  s.min = *lo;
  s.max = *hi;
  if (s.n > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(ss / static_cast<double>(s.n - 1));
  }
  return s;
}

Histogram histogram(std::span<const double> values, std::size_t bins) {
  Histogram h;
  h.counts.assign(std::max<std::size_t>(1, bins), 0);
  if (values.empty()) return h;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  h.lo = *lo;
  h.width = (*hi - *lo) / static_cast<double>(h.counts.size());
  for (double v : values) {
    std::size_t b = h.width > 0 ? static_cast<std::size_t>((v - h.lo) / h.width) : 0;
    h.counts[std::min(b, h.counts.size() - 1)]++;
  }
  return h;
}

}  // namespace bubblesim
