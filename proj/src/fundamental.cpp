#include "bubblesim/fundamental.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bubblesim {

void OUParams::validate() const {
  if (!(kappa > 0.0)) throw std::invalid_argument("OU kappa must be positive");
  if (!(sigma >= 0.0)) throw std::invalid_argument("OU sigma must be non-negative");
  if (!(dt > 0.0)) throw std::invalid_argument("OU dt must be positive");
}

std::vector<double> simulate_ou(const OUParams& p, RandomStream stream, std::size_t steps) {
  p.validate();
  std::vector<double> out;
  out.reserve(steps + 1);
  const double diffusion = p.sigma * std::sqrt(p.dt);
  double r = p.r0;
  out.push_back(r);
  for (std::size_t i = 0; i < steps; ++i) {
    r += p.kappa * (p.mu - r) * p.dt + diffusion * stream.normal();
    r = std::max(r, 1.0);
    out.push_back(r);
  }
  return out;
}

FundamentalPath generate_fundamental(const OUParams& p, RandomStream stream, SimTime horizon) {
  const auto steps = static_cast<std::size_t>(std::floor(static_cast<double>(horizon.nanos) / (p.dt * 1e9)));
  const std::vector<double> raw = simulate_ou(p, stream, steps);
  std::vector<Cents> values(raw.size());
  std::transform(raw.begin(), raw.end(), values.begin(),
                 [](double v) { return std::max<Cents>(1, std::llround(v)); });
  return FundamentalPath(std::move(values), p.dt);
}

Cents FundamentalPath::at(SimTime t) const {
  if (values_.empty()) throw std::logic_error("empty fundamental path");
  const auto idx = static_cast<std::int64_t>(std::floor(static_cast<double>(t.nanos) / (dt_ * 1e9)));
  const auto clamped = std::clamp<std::int64_t>(idx, 0, static_cast<std::int64_t>(values_.size()) - 1);
  return values_[static_cast<std::size_t>(clamped)];
}

Cents observe_fundamental(const FundamentalPath& path, SimTime t, double obs_sigma, RandomStream& stream) {
  const Cents truth = path.at(t);
  if (obs_sigma <= 0.0) return truth;
  return std::max<Cents>(1, truth + std::llround(obs_sigma * stream.normal()));
}

}  // namespace bubblesim
