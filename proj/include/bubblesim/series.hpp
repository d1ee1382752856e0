#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "bubblesim/types.hpp"

namespace bubblesim {

/// Integer series sampled once per second, with exact prefix sums so that any
/// window mean or variance is O(1) and free of floating-point drift.
class PriceSeries {
 public:
  PriceSeries() { reset(); }
  explicit PriceSeries(std::span<const Cents> values) {
    reset();
    for (Cents v : values) push(v);
  }

  void push(Cents v) {
    values_.push_back(v);
    sums_.push_back(sums_.back() + v);
    squares_.push_back(squares_.back() + static_cast<__int128>(v) * v);
  }

  void reset() {
    values_.clear();
    sums_.assign(1, 0);
    squares_.assign(1, 0);
  }

  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }
  Cents operator[](std::size_t i) const { return values_[i]; }
  Cents back() const { return values_.back(); }
  std::span<const Cents> values() const { return values_; }

  /// Sum over [begin, end).
  __int128 sum(std::size_t begin, std::size_t end) const { return sums_[end] - sums_[begin]; }

  double mean(std::size_t begin, std::size_t end) const {
    return static_cast<double>(sum(begin, end)) / static_cast<double>(end - begin);
  }

  /// Population standard deviation over [begin, end).
  double stddev(std::size_t begin, std::size_t end) const;

  /// Mean of the last `window` samples of the first `len` samples; the window
  /// is truncated to the available history.
  double trailing_mean(std::size_t len, std::size_t window) const {
    const std::size_t begin = len > window ? len - window : 0;
    return mean(begin, len);
  }

 private:
  std::vector<Cents> values_;
  std::vector<__int128> sums_;
  std::vector<__int128> squares_;
};

/// Sign of MA(short) - MA(long) over the last samples of `prices[0, len)`,
/// compared exactly in integers. Zero when fewer than `long_window` samples
/// are available or when the two means are equal.
int moving_average_signal(const PriceSeries& prices, std::size_t len, std::size_t short_window,
                          std::size_t long_window);

}  // namespace bubblesim
