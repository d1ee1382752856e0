#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "bubblesim/config.hpp"
#include "bubblesim/nn/mlp.hpp"
#include "bubblesim/random.hpp"
#include "bubblesim/rl_env.hpp"

namespace bubblesim {

using PolicyNet = nn::PolicyValueNet<double>;

PolicyNet make_policy(const PpoConfig& cfg, RandomStream& rng);

enum class ActMode { stochastic, greedy };

struct ActResult {
  int action{0};
  double log_prob{0.0};
  double value{0.0};
  std::array<double, kActionCount> probs{};
};

/// Throws std::invalid_argument on a non-finite observation. Greedy mode
/// breaks ties toward the lower action index and ignores `rng`.
ActResult act(const PolicyNet& net, std::span<const double> obs, ActMode mode, RandomStream* rng);

struct Step {
  Observation obs{};  // policy input (already scaled)
  int action{0};
  double log_prob{0.0};
  double value{0.0};
  double reward{0.0};  // learner units
};

/// A complete episode; its last step is terminal.
struct Episode {
  std::vector<Step> steps;
  double score{0.0};  // episode return in natural units, for logging
};

/// Generalized advantage estimates for one terminal episode.
std::vector<double> compute_gae(std::span<const double> rewards, std::span<const double> values, double gamma,
                                double lambda);

struct RolloutBatch {
  Eigen::MatrixXd obs;  // features x samples
  std::vector<int> actions;
  Eigen::VectorXd old_log_probs;
  Eigen::VectorXd values;
  Eigen::VectorXd advantages;
  Eigen::VectorXd returns;

  Eigen::Index size() const { return obs.cols(); }
};

RolloutBatch make_batch(std::span<const Episode> episodes, const PpoConfig& cfg);

struct LossTerms {
  double total{0.0};
  double policy{0.0};
  double value{0.0};
  double entropy{0.0};
  double approx_kl{0.0};
  double clip_fraction{0.0};
};

/// Clipped-surrogate loss over the samples in `idx`, using the advantages
/// exactly as stored in the batch:
///   L = -mean(min(r A, clip(r, 1-eps, 1+eps) A)) + c_v mean((V - R)^2) - c_e mean(H).
/// Writes dL/dparams into `grad` when it is non-null.
LossTerms ppo_loss(const PolicyNet& net, const RolloutBatch& batch, std::span<const Eigen::Index> idx,
                   const PpoConfig& cfg, Eigen::VectorXd* grad);

class Adam {
 public:
  Adam() = default;
  Adam(Eigen::Index size, double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
      : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps), m_(Eigen::VectorXd::Zero(size)),
        v_(Eigen::VectorXd::Zero(size)) {}

  void step(Eigen::VectorXd& params, const Eigen::VectorXd& grad);
  long steps() const { return t_; }

 private:
  double lr_{1e-3};
  double beta1_{0.9};
  double beta2_{0.999};
  double eps_{1e-8};
  long t_{0};
  Eigen::VectorXd m_;
  Eigen::VectorXd v_;
};

struct UpdateStats {
  LossTerms loss;  // mean over minibatches
  double grad_norm{0.0};
  int minibatches{0};
  bool aborted{false};
};

/// Epochs of shuffled minibatch steps. A non-finite loss or gradient aborts
/// the whole update and restores the parameters and optimizer state.
UpdateStats ppo_update(PolicyNet& net, Adam& opt, RolloutBatch batch, const PpoConfig& cfg, RandomStream& rng);

struct TrainLogRow {
  int update_id{0};
  int episodes{0};
  double mean_reward{0.0};
  double policy_loss{0.0};
  double value_loss{0.0};
  double entropy{0.0};
  double approx_kl{0.0};
  double clip_fraction{0.0};
  bool aborted{false};
};

/// Produces episode `index` with the current policy; `rng` is private to the
/// episode.
using RolloutFn = std::function<Episode(std::size_t index, const PolicyNet& net, RandomStream& rng)>;

/// Runs `updates` rounds of (collect episodes_per_update episodes, update).
/// Episodes in a round are collected on `workers` threads and merged in
/// index order, so the result depends only on `seed`.
std::vector<TrainLogRow> train_policy(PolicyNet& net, const PpoConfig& cfg, std::uint64_t seed, int updates,
                                      const RolloutFn& rollout, int workers);

}  // namespace bubblesim
