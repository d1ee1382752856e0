#include "bubblesim/series.hpp"

#include <cmath>

namespace bubblesim {

double PriceSeries::stddev(std::size_t begin, std::size_t end) const {
  const std::size_t n = end - begin;
  if (n == 0) return 0.0;
  const __int128 s = sum(begin, end);
  const __int128 sq = squares_[end] - squares_[begin];
  const __int128 num = static_cast<__int128>(n) * sq - s * s;  // n^2 * variance, exact
  if (num <= 0) return 0.0;
  return std::sqrt(static_cast<double>(num)) / static_cast<double>(n);
}

int moving_average_signal(const PriceSeries& prices, std::size_t len, std::size_t short_window,
                          std::size_t long_window) {
  if (len < long_window || short_window == 0) return 0;
  const __int128 short_sum = prices.sum(len - short_window, len);
  const __int128 long_sum = prices.sum(len - long_window, len);
  const __int128 lhs = short_sum * static_cast<__int128>(long_window);
  const __int128 rhs = long_sum * static_cast<__int128>(short_window);
  return lhs > rhs ? 1 : (lhs < rhs ? -1 : 0);
}

}  // namespace bubblesim
