#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "bubblesim/ppo.hpp"

namespace bubblesim::testing {

// Random batch whose old log-probs sit near the current policy, so both
// clipped and unclipped samples appear.
inline RolloutBatch random_batch(const PolicyNet& net, Eigen::Index n, RandomStream& rng) {
  RolloutBatch b;
  b.obs.resize(net.inputs(), n);
  for (Eigen::Index i = 0; i < b.obs.size(); ++i) b.obs.data()[i] = rng.normal();
  const auto logp = nn::log_softmax(net.forward(b.obs).logits);
  b.actions.resize(static_cast<std::size_t>(n));
  b.old_log_probs.resize(n);
  b.values.resize(n);
  b.advantages.resize(n);
  b.returns.resize(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const int a = static_cast<int>(rng.uniform_int(0, net.actions() - 1));
    b.actions[static_cast<std::size_t>(j)] = a;
    b.old_log_probs(j) = logp(a, j) + 0.3 * rng.normal();
    b.values(j) = rng.normal();
    b.advantages(j) = rng.normal();
    b.returns(j) = rng.normal();
  }
  return b;
}

struct GradCheck {
  double max_rel_error{0.0};
  Eigen::Index worst{-1};
};

// Forward-only PPO objective in extended precision, written independently of
// ppo_loss so the finite differences below are not limited by double roundoff.
inline long double reference_objective(const nn::PolicyValueNet<long double>& net, const RolloutBatch& batch,
                                       const PpoConfig& cfg) {
  using L = long double;
  const auto f = net.forward(batch.obs.cast<L>());
  const auto logp = nn::log_softmax(f.logits);
  const L n = static_cast<L>(batch.size());
  const L eps = static_cast<L>(cfg.clip);
  L policy = 0, value = 0, entropy = 0;
  for (Eigen::Index j = 0; j < batch.size(); ++j) {
    const int a = batch.actions[static_cast<std::size_t>(j)];
    const L adv = batch.advantages(j);
    const L r = std::exp(logp(a, j) - static_cast<L>(batch.old_log_probs(j)));
    policy -= std::min(r * adv, std::clamp(r, 1 - eps, 1 + eps) * adv);
    for (Eigen::Index k = 0; k < logp.rows(); ++k) entropy -= std::exp(logp(k, j)) * logp(k, j);
    const L e = f.values(j) - static_cast<L>(batch.returns(j));
    value += e * e;
  }
  return policy / n + static_cast<L>(cfg.value_coef) * value / n - static_cast<L>(cfg.entropy_coef) * entropy / n;
}

// Central differences of reference_objective on every parameter against the
// analytic gradient of ppo_loss. Relative error per parameter is
// |a - n| / max(|a|, |n|), taken as 0 when both are below 1e-10.
inline GradCheck check_ppo_gradient(const PolicyNet& net, const RolloutBatch& batch, const PpoConfig& cfg,
                                    double h = 1e-6) {
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(batch.size()));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  Eigen::VectorXd grad;
  ppo_loss(net, batch, idx, cfg, &grad);
  nn::PolicyValueNet<long double> ext(net.inputs(), net.hidden(), net.actions());
  ext.params() = net.params().cast<long double>();
  GradCheck out;
  for (Eigen::Index p = 0; p < net.size(); ++p) {
    const long double keep = ext.params()(p);
    ext.params()(p) = keep + h;
    const long double up = reference_objective(ext, batch, cfg);
    ext.params()(p) = keep - h;
    const long double down = reference_objective(ext, batch, cfg);
    ext.params()(p) = keep;
    const double numeric = static_cast<double>((up - down) / (2.0L * h));
    const double scale = std::max(std::abs(grad(p)), std::abs(numeric));
    const double rel = scale < 1e-10 ? 0.0 : std::abs(grad(p) - numeric) / scale;
    if (rel > out.max_rel_error) {
      out.max_rel_error = rel;
      out.worst = p;
    }
  }
  return out;
}

// Context c in {0, 1} is a one-hot in feature c. Reward 1 for BUY in
// context 0 and for SELL in context 1, 0 otherwise.
inline Observation bandit_obs(int context) {
  Observation o{};
  o[static_cast<std::size_t>(context)] = 1.0;
  return o;
}

inline int bandit_best(int context) { return context == 0 ? 0 : 2; }

inline bool bandit_greedy_optimal(const PolicyNet& net) {
  for (int c = 0; c < 2; ++c)
    if (act(net, bandit_obs(c), ActMode::greedy, nullptr).action != bandit_best(c)) return false;
  return true;
}

struct BanditRun {
  bool final_optimal{false};  // greedy policy optimal after the last update
  int first_optimal_update{-1};  // number of updates after which greedy was first optimal
};

inline PpoConfig bandit_config() {
  PpoConfig cfg;
  cfg.episodes_per_update = 16;
  cfg.minibatch = 16;
  cfg.hidden = 16;
  return cfg;
}

inline BanditRun train_bandit(std::uint64_t seed, int max_updates = 200) {
  const PpoConfig cfg = bandit_config();
  RandomStream init = RandomStream(seed).derive("init");
  PolicyNet net = make_policy(cfg, init);
  BanditRun run;
  const auto per = static_cast<std::size_t>(cfg.episodes_per_update);
  const RolloutFn rollout = [&](std::size_t index, const PolicyNet& current, RandomStream& rng) {
    const int u = static_cast<int>(index / per);
    if (index % per == 0 && run.first_optimal_update < 0 && bandit_greedy_optimal(current))
      run.first_optimal_update = u;
    const int context = rng.bernoulli(0.5) ? 1 : 0;
    const Observation obs = bandit_obs(context);
    const ActResult r = act(current, obs, ActMode::stochastic, &rng);
    Episode ep;
    ep.steps.push_back(Step{obs, r.action, r.log_prob, r.value, r.action == bandit_best(context) ? 1.0 : 0.0});
    ep.score = ep.steps.back().reward;
    return ep;
  };
  train_policy(net, cfg, seed, max_updates, rollout, 1);
  run.final_optimal = bandit_greedy_optimal(net);
  if (run.first_optimal_update < 0 && run.final_optimal) run.first_optimal_update = max_updates;
  return run;
}

}  // namespace bubblesim::testing
