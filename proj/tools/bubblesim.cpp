#include <algorithm>
#include <cmath>
#include <numeric>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bubblesim/config.hpp"
#include "bubblesim/experiment.hpp"
#include "bubblesim/io.hpp"
#include "bubblesim/learn.hpp"
#include "bubblesim/market.hpp"
#include "bubblesim/shapley.hpp"

using namespace bubblesim;

namespace {

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::string out{"out"};
};

ScenarioConfig load(const Common& c) {
  ScenarioConfig cfg = c.config.empty() ? ScenarioConfig{} : load_config(c.config);
  if (c.workers) cfg.experiment.workers = *c.workers;
  cfg.validate();
  return cfg;
}

void log_line(const std::string& s) { std::cerr << s << '\n'; }

ScenarioKind parse_kind(const std::string& s) {
  if (s == "bubble") return ScenarioKind::bubble;
  if (s == "nonbubble") return ScenarioKind::nonbubble;
  throw CLI::ValidationError("--kind", "expected bubble or nonbubble");
}

void write_text(const std::filesystem::path& p, const std::string& text) {
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << text << '\n';
}

// Screens seeds when the config has no pools.
ScenarioConfig ensure_seeds(ScenarioConfig cfg, int workers) {
  if (!cfg.seeds.bubble.empty() || !cfg.seeds.test.empty() || !cfg.seeds.nonbubble.empty()) return cfg;
  log_line("screening " + std::to_string(cfg.experiment.screen_candidates) + " candidates");
  cfg.seeds = screen_seeds(cfg, cfg.experiment.screen_candidates, workers, log_line).seeds;
  return cfg;
}

void add_common(CLI::App* cmd, Common& c, bool with_seed = true) {
  cmd->add_option("-c,--config", c.config, "Scenario config (JSON)")->check(CLI::ExistingFile);
  if (with_seed) cmd->add_option("-s,--seed", c.seed, "Seed override");
  cmd->add_option("-w,--workers", c.workers, "Worker threads");
  cmd->add_option("-o,--out", c.out, "Output path");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Agent-based market simulation with RL traders and bubble analytics"};
  app.require_subcommand(1);

  Common c;

  auto* init = app.add_subcommand("init-config", "Write the default config");
  init->add_option("-o,--out", c.out, "Output file")->required();

  int candidates = -1;
  auto* screen = app.add_subcommand("screen", "Screen candidate seeds into bubble, test and non-bubble pools");
  add_common(screen, c);
  screen->add_option("-n,--candidates", candidates, "Number of candidate seeds");

  std::string kind_name{"bubble"};
  auto* simulate = app.add_subcommand("simulate", "Run one background market and write its tapes");
  add_common(simulate, c);
  simulate->add_option("-k,--kind", kind_name, "bubble or nonbubble");

  std::string mid_path;
  std::string fundamental_path;
  auto* detect = app.add_subcommand("detect", "Detect bubbles in a mid/fundamental series pair");
  add_common(detect, c, false);
  detect->add_option("--mid", mid_path, "mid.csv")->required()->check(CLI::ExistingFile);
  detect->add_option("--fundamental", fundamental_path, "fundamental.csv")->required()->check(CLI::ExistingFile);

  int arm = -1;
  auto* train = app.add_subcommand("train", "Train one PPO agent");
  add_common(train, c);
  train->add_option("-a,--arm", arm, "Bubble mix percent")->check(CLI::Range(0, 100));

  std::string checkpoint;
  int runs = -1;
  auto* eval = app.add_subcommand("eval", "Evaluate a trained agent on the test pool");
  add_common(eval, c, false);
  eval->add_option("--checkpoint", checkpoint, "policy.json")->required()->check(CLI::ExistingFile);
  eval->add_option("-n,--runs", runs, "Number of test runs");

  int permutations = -1;
  auto* attribute = app.add_subcommand("attribute", "Shapley attributions for one greedy episode");
  add_common(attribute, c);
  attribute->add_option("--checkpoint", checkpoint, "policy.json")->required()->check(CLI::ExistingFile);
  attribute->add_option("-k,--kind", kind_name, "bubble or nonbubble");
  attribute->add_option("-p,--permutations", permutations, "Permutations per state");

  std::vector<int> arms;
  int n_test = -1;
  auto* experiment = app.add_subcommand("experiment", "Train every arm and evaluate on the shared test pool");
  add_common(experiment, c);
  experiment->add_option("-a,--arms", arms, "Bubble mix percents")->delimiter(',')->check(CLI::Range(0, 100));
  experiment->add_option("-n,--n-test", n_test, "Test runs per arm");

  std::string metrics_path;
  auto* report = app.add_subcommand("report", "Summaries and Kruskal-Wallis tests from metrics.csv");
  report->add_option("metrics", metrics_path, "metrics.csv")->required()->check(CLI::ExistingFile);
  report->add_option("-o,--out", c.out, "Output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    const std::filesystem::path out(c.out);
    if (init->parsed()) {
      write_text(out, dump_config(ScenarioConfig{}));
      return 0;
    }
    if (report->parsed()) {
      const auto metrics = read_metrics_csv(metrics_path);
      write_report(build_report(metrics), metrics, out);
      std::cout << "wrote " << (out / "report.md").string() << '\n';
      return 0;
    }

    ScenarioConfig cfg = load(c);
    const int workers = cfg.experiment.workers;

    if (screen->parsed()) {
      if (c.seed) cfg.master_seed = *c.seed;
      const ScreenResult r =
          screen_seeds(cfg, candidates > 0 ? candidates : cfg.experiment.screen_candidates, workers, log_line);
      cfg.seeds = r.seeds;
      std::printf("candidates %d: herding runs with bubbles %d (%.1f%%), herding-free runs without %d (%.1f%%)\n",
                  r.candidates, r.bubble_hits, 100.0 * r.bubble_hits / std::max(1, r.candidates), r.nonbubble_hits,
                  100.0 * r.nonbubble_hits / std::max(1, r.candidates));
      std::printf("pools: bubble %zu, test %zu, nonbubble %zu\n", cfg.seeds.bubble.size(), cfg.seeds.test.size(),
                  cfg.seeds.nonbubble.size());
      write_text(out, dump_config(cfg));
      return r.warnings.empty() ? 0 : 2;
    }

    if (simulate->parsed()) {
      const ScenarioKind kind = parse_kind(kind_name);
      const std::uint64_t seed = c.seed.value_or(candidate_seed(cfg.master_seed, 0));
      MarketSimulation sim(cfg, kind, seed, false);
      const KernelStats stats = sim.run_to_end();
      const Exchange& ex = sim.exchange();
      write_trades_csv(out / "trades.csv", ex.trades());
      write_orders_csv(out / "orders.csv", ex.order_log(), sim.roles());
      write_series_csv(out / "fundamental.csv", "value_cents", sim.fundamental().values());
      write_series_csv(out / "mid.csv", "mid_cents", ex.mids().values());
      std::vector<BubbleRow> rows;
      for (const BubbleEvent& e : detect_bubbles(ex.mids().values(), sim.fundamental().values(), cfg.detector))
        rows.push_back({0, e});
      write_bubbles_csv(out / "bubbles.csv", rows);
      std::printf("seed %llu (%s): %llu messages, %zu orders, %zu trades, %zu bubbles\n",
                  static_cast<unsigned long long>(seed), to_string(kind),
                  static_cast<unsigned long long>(stats.messages_delivered), ex.order_log().size(), ex.trades().size(),
                  rows.size());
      return 0;
    }

    if (detect->parsed()) {
      const auto mid = read_series_csv(mid_path);
      const auto fundamental = read_series_csv(fundamental_path);
      std::vector<BubbleRow> rows;
      for (const BubbleEvent& e : detect_bubbles(mid, fundamental, cfg.detector)) rows.push_back({0, e});
      write_bubbles_csv(out.extension() == ".csv" ? out : out / "bubbles.csv", rows);
      std::printf("%zu bubbles\n", rows.size());
      return 0;
    }

    if (train->parsed()) {
      if (arm >= 0) cfg.train.bubble_mix_pct = arm;
      if (c.seed) cfg.train.seed = *c.seed;
      cfg = ensure_seeds(cfg, workers);
      const MarketTrainResult r = train_market(cfg, cfg.seeds.bubble, cfg.seeds.nonbubble, workers);
      save_checkpoint(out / "policy.json", Checkpoint{cfg, r.net});
      write_train_log_csv(out / "train_log.csv", r.log);
      std::printf("trained %d episodes (%d bubble), %zu updates\n", r.episodes, r.bubble_episodes, r.log.size());
      return 0;
    }

    if (eval->parsed()) {
      const Checkpoint ck = load_checkpoint(checkpoint);
      ScenarioConfig ecfg = ck.config;
      if (!c.config.empty()) ecfg.seeds.test = cfg.seeds.test;
      if (ecfg.seeds.test.empty()) throw std::runtime_error("no test seeds in the checkpoint or config");
      check_pool_hygiene(ecfg.seeds);
      const int n = runs > 0 ? runs : ecfg.experiment.n_test;
      const auto evals = evaluate(ecfg, ck.net, ecfg.seeds.test, n, workers);
      const auto metrics = to_metrics(ecfg.train.bubble_mix_pct, 0, evals);
      std::vector<BubbleRow> bubbles;
      std::vector<EpisodeRow> episodes;
      for (const EvalRecord& e : evals) {
        for (const BubbleEvent& b : e.events) bubbles.push_back({e.run_id, b});
        for (const TapeRow& t : e.tape) episodes.push_back({e.run_id, t});
      }
      write_metrics_csv(out / "metrics.csv", metrics);
      write_bubbles_csv(out / "bubbles.csv", bubbles);
      write_episodes_csv(out / "episodes.csv", episodes);
      const Report rep = build_report(metrics);
      std::printf("%d runs: mean profit %.4f%%, mean bubble count %.3f\n", n, 100.0 * rep.arms[0].profit.mean,
                  rep.arms[0].count.mean);
      return 0;
    }

    if (attribute->parsed()) {
      const Checkpoint ck = load_checkpoint(checkpoint);
      const ScenarioKind kind = parse_kind(kind_name);
      ScenarioConfig acfg = ck.config;
      acfg.experiment.attribution_target = cfg.experiment.attribution_target;
      std::uint64_t seed = 0;
      if (c.seed)
        seed = *c.seed;
      else if (!acfg.seeds.test.empty())
        seed = acfg.seeds.test.front();
      else
        throw std::runtime_error("no --seed given and no test seed in the checkpoint");
      const int perms = permutations > 0 ? permutations : cfg.experiment.attribution_permutations;
      std::vector<AttributionRow> rows;
      for (const AttributionRecord& r : episode_attribution(acfg, ck.net, kind, seed, perms)) rows.push_back({0, r});
      write_attribution_csv(out.extension() == ".csv" ? out : out / "attribution.csv", rows);
      std::array<double, kFeatureCount> mean_abs{};
      for (const auto& r : rows)
        for (std::size_t i = 0; i < kFeatureCount; ++i)
          mean_abs[i] += std::abs(r.record.shapley[i]) / static_cast<double>(rows.size());
      std::vector<std::size_t> order(kFeatureCount);
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return mean_abs[a] > mean_abs[b]; });
      for (std::size_t i : order) std::printf("%-14s %.6f\n", feature_name(i), mean_abs[i]);
      return 0;
    }

    if (experiment->parsed()) {
      if (!arms.empty()) cfg.experiment.arms = arms;
      if (n_test > 0) cfg.experiment.n_test = n_test;
      if (c.seed) cfg.master_seed = *c.seed;
      cfg.validate();
      const ExperimentResult r = run_experiment(cfg, workers, out, log_line);
      int failed = 0;
      for (const ArmOutcome& a : r.arms) failed += !a.error.empty();
      std::printf("%zu metrics records, %d failed arms; see %s\n", r.metrics.size(), failed,
                  (out / "report.md").string().c_str());
      return failed == 0 ? 0 : 3;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
