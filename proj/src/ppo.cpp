#include "bubblesim/ppo.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "bubblesim/parallel.hpp"

namespace bubblesim {

PolicyNet make_policy(const PpoConfig& cfg, RandomStream& rng) {
  PolicyNet net(static_cast<int>(kFeatureCount), cfg.hidden, kActionCount);
  net.init(rng);
  return net;
}

ActResult act(const PolicyNet& net, std::span<const double> obs, ActMode mode, RandomStream* rng) {
  if (static_cast<int>(obs.size()) != net.inputs()) throw std::invalid_argument("observation width mismatch");
  Eigen::MatrixXd x(net.inputs(), 1);
  for (std::size_t i = 0; i < obs.size(); ++i) {
    if (!std::isfinite(obs[i])) throw std::invalid_argument("non-finite observation");
    x(static_cast<Eigen::Index>(i), 0) = obs[i];
  }
  const auto f = net.forward(x);
  const Eigen::MatrixXd logp = nn::log_softmax(f.logits);
  ActResult r;
  for (int a = 0; a < kActionCount; ++a) r.probs[a] = std::exp(logp(a, 0));
  if (mode == ActMode::greedy) {
    Eigen::Index best = 0;
    f.logits.col(0).maxCoeff(&best);
    r.action = static_cast<int>(best);
  } else {
    if (rng == nullptr) throw std::invalid_argument("stochastic act needs a random stream");
    const double u = rng->uniform();
    double acc = 0.0;
    r.action = kActionCount - 1;
    for (int a = 0; a < kActionCount; ++a) {
      acc += r.probs[a];
      if (u < acc) {
        r.action = a;
        break;
      }
    }
  }
  r.log_prob = logp(r.action, 0);
  r.value = f.values(0);
  return r;
}

std::vector<double> compute_gae(std::span<const double> rewards, std::span<const double> values, double gamma,
                                double lambda) {
  if (rewards.size() != values.size()) throw std::invalid_argument("rewards/values length mismatch");
  std::vector<double> adv(rewards.size());
  double next_adv = 0.0;
  double next_value = 0.0;  // terminal
  for (std::size_t i = rewards.size(); i-- > 0;) {
    const double delta = rewards[i] + gamma * next_value - values[i];
    next_adv = delta + gamma * lambda * next_adv;
    adv[i] = next_adv;
    next_value = values[i];
  }
  return adv;
}

RolloutBatch make_batch(std::span<const Episode> episodes, const PpoConfig& cfg) {
  Eigen::Index n = 0;
  for (const Episode& e : episodes) n += static_cast<Eigen::Index>(e.steps.size());
  RolloutBatch b;
  b.obs.resize(static_cast<Eigen::Index>(kFeatureCount), n);
  b.actions.resize(static_cast<std::size_t>(n));
  b.old_log_probs.resize(n);
  b.values.resize(n);
  b.advantages.resize(n);
  b.returns.resize(n);
  Eigen::Index k = 0;
  for (const Episode& e : episodes) {
    std::vector<double> rewards;
    std::vector<double> values;
    for (const Step& s : e.steps) {
      rewards.push_back(s.reward);
      values.push_back(s.value);
    }
    const auto adv = compute_gae(rewards, values, cfg.gamma, cfg.lambda);
    for (std::size_t i = 0; i < e.steps.size(); ++i, ++k) {
      const Step& s = e.steps[i];
      for (std::size_t f = 0; f < kFeatureCount; ++f) b.obs(static_cast<Eigen::Index>(f), k) = s.obs[f];
      b.actions[static_cast<std::size_t>(k)] = s.action;
      b.old_log_probs(k) = s.log_prob;
      b.values(k) = s.value;
      b.advantages(k) = adv[i];
      b.returns(k) = adv[i] + s.value;
    }
  }
  return b;
}

LossTerms ppo_loss(const PolicyNet& net, const RolloutBatch& batch, std::span<const Eigen::Index> idx,
                   const PpoConfig& cfg, Eigen::VectorXd* grad) {
  const auto n = static_cast<Eigen::Index>(idx.size());
  if (n == 0) throw std::invalid_argument("empty minibatch");
  Eigen::MatrixXd x(batch.obs.rows(), n);
  for (Eigen::Index j = 0; j < n; ++j) x.col(j) = batch.obs.col(idx[j]);
  const auto f = net.forward(x);
  const Eigen::MatrixXd logp = nn::log_softmax(f.logits);
  const Eigen::MatrixXd p = logp.array().exp().matrix();

  Eigen::MatrixXd dlogits = Eigen::MatrixXd::Zero(f.logits.rows(), n);
  Eigen::RowVectorXd dvalues(n);
  LossTerms t;
  const double inv_n = 1.0 / static_cast<double>(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const Eigen::Index i = idx[j];
    const int a = batch.actions[static_cast<std::size_t>(i)];
    const double adv = batch.advantages(i);
    const double log_ratio = logp(a, j) - batch.old_log_probs(i);
    const double ratio = std::exp(log_ratio);
    const double clipped = std::clamp(ratio, 1.0 - cfg.clip, 1.0 + cfg.clip);
    const double unclipped_obj = ratio * adv;
    const double clipped_obj = clipped * adv;
    const bool use_unclipped = unclipped_obj <= clipped_obj;
    t.policy -= (use_unclipped ? unclipped_obj : clipped_obj) * inv_n;
    t.approx_kl -= log_ratio * inv_n;
    if (std::abs(ratio - 1.0) > cfg.clip) t.clip_fraction += inv_n;

    double entropy = 0.0;
    for (Eigen::Index k = 0; k < p.rows(); ++k) entropy -= p(k, j) * logp(k, j);
    t.entropy += entropy * inv_n;

    const double err = f.values(j) - batch.returns(i);
    t.value += err * err * inv_n;

    // d/dlogits of the policy term: -g r (onehot - p) / n, with g = A on the active branch
    const double g = use_unclipped ? adv : 0.0;
    for (Eigen::Index k = 0; k < p.rows(); ++k) {
      const double onehot = k == a ? 1.0 : 0.0;
      dlogits(k, j) = -g * ratio * (onehot - p(k, j)) * inv_n;
      // entropy bonus: d(-c H)/dz_k = c p_k (log p_k + H)
      dlogits(k, j) += cfg.entropy_coef * p(k, j) * (logp(k, j) + entropy) * inv_n;
    }
    dvalues(j) = 2.0 * cfg.value_coef * err * inv_n;
  }
  t.total = t.policy + cfg.value_coef * t.value - cfg.entropy_coef * t.entropy;
  if (grad != nullptr) net.backward(f, dlogits, dvalues, *grad);
  return t;
}

void Adam::step(Eigen::VectorXd& params, const Eigen::VectorXd& grad) {
  ++t_;
  m_ = beta1_ * m_ + (1.0 - beta1_) * grad;
  v_ = beta2_ * v_ + (1.0 - beta2_) * grad.cwiseProduct(grad);
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  params.array() -= lr_ * (m_.array() / c1) / ((v_.array() / c2).sqrt() + eps_);
}

UpdateStats ppo_update(PolicyNet& net, Adam& opt, RolloutBatch batch, const PpoConfig& cfg, RandomStream& rng) {
  UpdateStats stats;
  const Eigen::Index n = batch.size();
  if (n == 0) return stats;
  if (cfg.normalize_advantages && n > 1) {
    const double mean = batch.advantages.mean();
    const double var = (batch.advantages.array() - mean).square().mean();
    batch.advantages = (batch.advantages.array() - mean) / (std::sqrt(var) + 1e-8);
  }
  const Eigen::VectorXd saved_params = net.params();
  const Adam saved_opt = opt;

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  const auto mb = static_cast<std::size_t>(std::max(1, cfg.minibatch));
  Eigen::VectorXd grad;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(std::span<Eigen::Index>(order));
    for (std::size_t start = 0; start < order.size(); start += mb) {
      const std::size_t len = std::min(mb, order.size() - start);
      const LossTerms t = ppo_loss(net, batch, std::span<const Eigen::Index>(order).subspan(start, len), cfg, &grad);
      const double norm = grad.norm();
      if (!std::isfinite(t.total) || !std::isfinite(norm)) {
        net.params() = saved_params;
        opt = saved_opt;
        stats.aborted = true;
        stats.loss = t;
        return stats;
      }
      if (cfg.max_grad_norm > 0 && norm > cfg.max_grad_norm) grad *= cfg.max_grad_norm / norm;
      opt.step(net.params(), grad);
      ++stats.minibatches;
      stats.grad_norm += norm;
      stats.loss.total += t.total;
      stats.loss.policy += t.policy;
      stats.loss.value += t.value;
      stats.loss.entropy += t.entropy;
      stats.loss.approx_kl += t.approx_kl;
      stats.loss.clip_fraction += t.clip_fraction;
    }
  }
  if (!net.params().allFinite()) {
    net.params() = saved_params;
    opt = saved_opt;
    stats.aborted = true;
    return stats;
  }
  const double k = 1.0 / stats.minibatches;
  stats.grad_norm *= k;
  stats.loss.total *= k;
  stats.loss.policy *= k;
  stats.loss.value *= k;
  stats.loss.entropy *= k;
  stats.loss.approx_kl *= k;
  stats.loss.clip_fraction *= k;
  return stats;
}

std::vector<TrainLogRow> train_policy(PolicyNet& net, const PpoConfig& cfg, std::uint64_t seed, int updates,
                                      const RolloutFn& rollout, int workers) {
  const RandomStream root(seed);
  Adam opt(net.size(), cfg.learning_rate);
  std::vector<TrainLogRow> log;
  const auto per_update = static_cast<std::size_t>(cfg.episodes_per_update);
  for (int u = 0; u < updates; ++u) {
    std::vector<Episode> episodes(per_update);
    parallel_for(per_update, workers, [&](std::size_t k) {
      const std::size_t index = static_cast<std::size_t>(u) * per_update + k;
      RandomStream rng = root.derive("episode", index);
      episodes[k] = rollout(index, net, rng);
    });
    RandomStream update_rng = root.derive("update", static_cast<std::uint64_t>(u));
    const UpdateStats s = ppo_update(net, opt, make_batch(episodes, cfg), cfg, update_rng);
    TrainLogRow row;
    row.update_id = u;
    row.episodes = static_cast<int>(per_update);
    for (const Episode& e : episodes) row.mean_reward += e.score / static_cast<double>(per_update);
    row.policy_loss = s.loss.policy;
    row.value_loss = s.loss.value;
    row.entropy = s.loss.entropy;
    row.approx_kl = s.loss.approx_kl;
    row.clip_fraction = s.loss.clip_fraction;
    row.aborted = s.aborted;
    log.push_back(row);
  }
  return log;
}

}  // namespace bubblesim
