#include "bubblesim/learn.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "bubblesim/parallel.hpp"
#include "json.hpp"

namespace bubblesim {

SeedScheduler::SeedScheduler(int bubble_mix_pct, std::vector<std::uint64_t> bubble_pool,
                             std::vector<std::uint64_t> nonbubble_pool, RandomStream rng)
    : mix_(bubble_mix_pct), bubble_{std::move(bubble_pool)}, nonbubble_{std::move(nonbubble_pool)}, rng_(rng) {
  rng_.shuffle(std::span<std::uint64_t>(bubble_.seeds));
  rng_.shuffle(std::span<std::uint64_t>(nonbubble_.seeds));
}

std::uint64_t SeedScheduler::take(Pool& pool) {
  if (pool.seeds.empty()) throw std::invalid_argument("seed pool is empty");
  if (pool.pos == pool.seeds.size()) {
    rng_.shuffle(std::span<std::uint64_t>(pool.seeds));
    pool.pos = 0;
    ++reshuffles_;
  }
  return pool.seeds[pool.pos++];
}

ScenarioDraw SeedScheduler::next() {
  const bool bubble = mix_ >= 100 || (mix_ > 0 && rng_.uniform() * 100.0 < mix_);
  if (bubble) {
    ++bubble_draws_;
    return {ScenarioKind::bubble, take(bubble_)};
  }
  return {ScenarioKind::nonbubble, take(nonbubble_)};
}

Episode play_episode(TradingEnv& env, const PolicyNet& net, ScenarioKind kind, std::uint64_t seed, ActMode mode,
                     RandomStream* rng) {
  const PpoConfig& ppo = env.config().train.ppo;
  const FeatureScaling& scaling = env.config().env.scaling;
  Episode ep;
  Observation raw = env.reset(kind, seed);
  while (!env.done()) {
    const Observation x = normalize(raw, scaling);
    const ActResult a = act(net, x, mode, rng);
    const StepResult r = env.step(static_cast<Action>(a.action));
    ep.steps.push_back(Step{x, a.action, a.log_prob, a.value, static_cast<double>(r.reward) * ppo.reward_scale});
    ep.score += static_cast<double>(r.reward);
    raw = r.obs;
  }
  return ep;
}

MarketTrainResult train_market(const ScenarioConfig& cfg, std::span<const std::uint64_t> bubble_pool,
                               std::span<const std::uint64_t> nonbubble_pool, int workers) {
  const TrainConfig& tc = cfg.train;
  const RandomStream root(tc.seed);
  const int per_update = tc.ppo.episodes_per_update;
  const int updates = (tc.episodes + per_update - 1) / per_update;
  const int total = updates * per_update;

  SeedScheduler scheduler(tc.bubble_mix_pct, {bubble_pool.begin(), bubble_pool.end()},
                          {nonbubble_pool.begin(), nonbubble_pool.end()}, root.derive("schedule"));
  std::vector<ScenarioDraw> schedule;
  schedule.reserve(static_cast<std::size_t>(total));
  for (int i = 0; i < total; ++i) schedule.push_back(scheduler.next());

  RandomStream init_rng = root.derive("init");
  MarketTrainResult result{make_policy(tc.ppo, init_rng), {}, scheduler.bubble_draws(), total,
                           scheduler.reshuffles()};
  auto rollout = [&](std::size_t index, const PolicyNet& net, RandomStream& rng) {
    TradingEnv env(cfg);
    const ScenarioDraw& d = schedule[index];
    return play_episode(env, net, d.kind, d.seed, ActMode::stochastic, &rng);
  };
  result.log = train_policy(result.net, tc.ppo, root.derive("ppo").next_u64(), updates, rollout, workers);
  return result;
}

std::vector<EvalRecord> evaluate(const ScenarioConfig& cfg, const PolicyNet& net,
                                 std::span<const std::uint64_t> test_seeds, int n_runs, int workers) {
  if (test_seeds.empty()) throw std::invalid_argument("test seed pool is empty");
  std::vector<EvalRecord> out(static_cast<std::size_t>(n_runs));
  parallel_for(out.size(), workers, [&](std::size_t i) {
    EvalRecord& rec = out[i];
    rec.run_id = static_cast<int>(i);
    rec.seed = test_seeds[i % test_seeds.size()];
    TradingEnv env(cfg);
    play_episode(env, net, ScenarioKind::bubble, rec.seed, ActMode::greedy, nullptr);
    rec.profit_pct = env.profit_pct();
    rec.initial_mtm = env.initial_mtm();
    rec.final_mtm = env.mtm();
    rec.events = detect_bubbles(env.sim().exchange().mids().values(), env.sim().fundamental().values(), cfg.detector);
    rec.metrics = measure_bubbles(rec.events);
    rec.tape = env.tape();
  });
  return out;
}

namespace {
constexpr int kCheckpointVersion = 1;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  nlohmann::json j;
  j["format"] = "bubblesim-policy";
  j["version"] = kCheckpointVersion;
  j["config_hash"] = config_hash(ckpt.config);
  j["config"] = nlohmann::json::parse(dump_config(ckpt.config));
  j["inputs"] = ckpt.net.inputs();
  j["hidden"] = ckpt.net.hidden();
  j["actions"] = ckpt.net.actions();
  j["params"] = std::vector<double>(ckpt.net.params().data(), ckpt.net.params().data() + ckpt.net.size());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write checkpoint " + path.string());
  out << j.dump() << '\n';
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open checkpoint " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("checkpoint parse error: " + std::string(e.what()));
  }
  if (j.value("format", "") != "bubblesim-policy" || j.value("version", 0) != kCheckpointVersion)
    throw std::runtime_error("not a policy checkpoint: " + path.string());
  Checkpoint ckpt{parse_config(j.at("config").dump()), {}};
  if (j.at("config_hash").get<std::uint64_t>() != config_hash(ckpt.config))
    throw std::runtime_error("checkpoint config hash mismatch: " + path.string());
  ckpt.net = PolicyNet(j.at("inputs").get<int>(), j.at("hidden").get<int>(), j.at("actions").get<int>());
  const auto params = j.at("params").get<std::vector<double>>();
  if (static_cast<Eigen::Index>(params.size()) != ckpt.net.size())
    throw std::runtime_error("checkpoint weight count mismatch");
  for (std::size_t i = 0; i < params.size(); ++i) ckpt.net.params()(static_cast<Eigen::Index>(i)) = params[i];
  return ckpt;
}

}  // namespace bubblesim
