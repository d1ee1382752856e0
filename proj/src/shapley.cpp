#include "bubblesim/shapley.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace bubblesim {

double action_score(const PolicyNet& net, std::span<const double> x) {
  Eigen::MatrixXd in(net.inputs(), 1);
  for (Eigen::Index i = 0; i < in.rows(); ++i) in(i, 0) = x[static_cast<std::size_t>(i)];
  const Eigen::MatrixXd p = nn::softmax(net.forward(in).logits);
  return p(static_cast<int>(Action::sell), 0) - p(static_cast<int>(Action::buy), 0);
}

double action_logit(const PolicyNet& net, std::span<const double> x, Action a) {
  Eigen::MatrixXd in(net.inputs(), 1);
  for (Eigen::Index i = 0; i < in.rows(); ++i) in(i, 0) = x[static_cast<std::size_t>(i)];
  return net.forward(in).logits(static_cast<int>(a), 0);
}

ScalarModel attribution_model(const PolicyNet& net, AttributionTarget target) {
  switch (target) {
    case AttributionTarget::buy_logit:
      return [&net](std::span<const double> z) { return action_logit(net, z, Action::buy); };
    case AttributionTarget::hold_logit:
      return [&net](std::span<const double> z) { return action_logit(net, z, Action::hold); };
    case AttributionTarget::sell_logit:
      return [&net](std::span<const double> z) { return action_logit(net, z, Action::sell); };
    case AttributionTarget::action_score:
      break;
  }
  return [&net](std::span<const double> z) { return action_score(net, z); };
}

ShapleyResult shapley_permutation(const ScalarModel& f, std::span<const double> x, std::span<const double> baseline,
                                  int permutations, RandomStream& rng) {
  const std::size_t n = x.size();
  if (baseline.size() != n) throw std::invalid_argument("baseline width mismatch");
  if (permutations < 1) throw std::invalid_argument("need at least one permutation");
  ShapleyResult r;
  r.permutations = permutations;
  r.output = f(x);
  r.baseline_output = f(baseline);
  std::vector<double> sum(n, 0.0);
  std::vector<double> sum_sq(n, 0.0);
  double total_sum = 0.0;
  double total_sq = 0.0;
  std::vector<std::size_t> order(n);
  std::vector<double> z(n);
  for (int p = 0; p < permutations; ++p) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng.shuffle(std::span<std::size_t>(order));
    std::copy(baseline.begin(), baseline.end(), z.begin());
    double prev = r.baseline_output;
    double total = 0.0;
    for (std::size_t i : order) {
      z[i] = x[i];
      const double cur = f(z);
      const double m = cur - prev;
      sum[i] += m;
      sum_sq[i] += m * m;
      total += m;
      prev = cur;
    }
    total_sum += total;
    total_sq += total * total;
  }
  const double k = permutations;
  r.values.resize(n);
  r.std_error.resize(n);
  auto se = [k](double s, double sq) {
    if (k < 2) return 0.0;
    const double mean = s / k;
    const double var = std::max(0.0, (sq - k * mean * mean) / (k - 1));
    return std::sqrt(var / k);
  };
  for (std::size_t i = 0; i < n; ++i) {
    r.values[i] = sum[i] / k;
    r.std_error[i] = se(sum[i], sum_sq[i]);
  }
  r.sum_std_error = se(total_sum, total_sq);
  return r;
}

std::vector<double> shapley_exact(const ScalarModel& f, std::span<const double> x, std::span<const double> baseline) {
  const std::size_t n = x.size();
  if (baseline.size() != n) throw std::invalid_argument("baseline width mismatch");
  if (n > 20) throw std::invalid_argument("too many features for exact enumeration");
  const std::size_t subsets = std::size_t{1} << n;
  std::vector<double> value(subsets);
  std::vector<double> z(n);
  for (std::size_t mask = 0; mask < subsets; ++mask) {
    for (std::size_t i = 0; i < n; ++i) z[i] = (mask >> i) & 1U ? x[i] : baseline[i];
    value[mask] = f(z);
  }
  // weight(|S|) = |S|! (n - |S| - 1)! / n!
  std::vector<double> weight(n);
  for (std::size_t s = 0; s < n; ++s) {
    double w = 1.0 / static_cast<double>(n);
    // 1 / (n * C(n-1, s))
    for (std::size_t j = 1; j <= s; ++j) w *= static_cast<double>(j) / static_cast<double>(n - j);
    weight[s] = w;
  }
  std::vector<double> phi(n, 0.0);
  for (std::size_t mask = 0; mask < subsets; ++mask) {
    const auto size = static_cast<std::size_t>(__builtin_popcountll(mask));
    for (std::size_t i = 0; i < n; ++i) {
      if ((mask >> i) & 1U) continue;
      phi[i] += weight[size] * (value[mask | (std::size_t{1} << i)] - value[mask]);
    }
  }
  return phi;
}

std::vector<AttributionRecord> episode_attribution(const ScenarioConfig& cfg, const PolicyNet& net,
                                                   ScenarioKind kind, std::uint64_t seed, int permutations) {
  TradingEnv env(cfg);
  std::vector<std::int64_t> times;
  std::vector<Observation> raw;
  Observation obs = env.reset(kind, seed);
  while (!env.done()) {
    times.push_back(env.now().whole_seconds());
    raw.push_back(obs);
    const Observation x = normalize(obs, cfg.env.scaling);
    obs = env.step(static_cast<Action>(act(net, x, ActMode::greedy, nullptr).action)).obs;
  }

  std::vector<double> baseline(kFeatureCount, 0.0);
  for (const Observation& o : raw) {
    const Observation x = normalize(o, cfg.env.scaling);
    for (std::size_t i = 0; i < kFeatureCount; ++i) baseline[i] += x[i] / static_cast<double>(raw.size());
  }
  const ScalarModel f = attribution_model(net, cfg.experiment.attribution_target);
  RandomStream rng = RandomStream(seed).derive("attribution");
  std::vector<AttributionRecord> out;
  out.reserve(raw.size());
  for (std::size_t k = 0; k < raw.size(); ++k) {
    const Observation x = normalize(raw[k], cfg.env.scaling);
    const ShapleyResult s = shapley_permutation(f, x, baseline, permutations, rng);
    AttributionRecord rec;
    rec.t_s = times[k];
    rec.features = raw[k];
    std::copy(s.values.begin(), s.values.end(), rec.shapley.begin());
    rec.model_output = s.output;
    out.push_back(rec);
  }
  return out;
}

}  // namespace bubblesim
