#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "bubblesim/random.hpp"
#include "bubblesim/types.hpp"

namespace bubblesim {

/// Ornstein-Uhlenbeck parameters. Prices in cents, time in seconds.
struct OUParams {
  double mu{100'000.0};
  double kappa{1.67e-5};
  double sigma{1.4448};  // stationary std = sigma / sqrt(2 kappa) ~= 250 cents (0.25% of mu)
  double r0{100'000.0};
  double dt{1.0};

  void validate() const;
  double stationary_variance() const { return sigma * sigma / (2.0 * kappa); }
};

/// Fundamental value sampled every `dt` seconds from t=0 to the horizon.
class FundamentalPath {
 public:
  FundamentalPath() = default;
  FundamentalPath(std::vector<Cents> values, double dt) : values_(std::move(values)), dt_(dt) {}

  /// Step lookup: the value of the last sample at or before t (clamped to the end).
  Cents at(SimTime t) const;

  std::span<const Cents> values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double dt() const { return dt_; }

 private:
  std::vector<Cents> values_;
  double dt_{1.0};
};

/// Euler-Maruyama path of length floor(horizon/dt)+1, rounded to cents and
/// clamped to at least one cent.
FundamentalPath generate_fundamental(const OUParams& params, RandomStream stream, SimTime horizon);

/// Unrounded path for statistical checks of the recursion itself.
std::vector<double> simulate_ou(const OUParams& params, RandomStream stream, std::size_t steps);

/// Fundamental at t plus N(0, obs_sigma^2) noise from `stream`, clamped >= 1.
Cents observe_fundamental(const FundamentalPath& path, SimTime t, double obs_sigma, RandomStream& stream);

}  // namespace bubblesim
