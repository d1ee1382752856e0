#include "bubblesim/experiment.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "bubblesim/parallel.hpp"

namespace bubblesim {

std::uint64_t candidate_seed(std::uint64_t master_seed, std::uint64_t index) {
  return RandomStream(master_seed).derive("candidate", index).next_u64();
}

std::vector<BubbleEvent> run_background(const ScenarioConfig& cfg, ScenarioKind kind, std::uint64_t seed) {
  MarketSimulation sim(cfg, kind, seed, false);
  sim.run_to_end();
  return detect_bubbles(sim.exchange().mids().values(), sim.fundamental().values(), cfg.detector);
}

ScreenResult screen_seeds(const ScenarioConfig& cfg, int candidates, int workers, const Progress& progress) {
  const auto n = static_cast<std::size_t>(std::max(0, candidates));
  std::vector<char> bubble(n);
  std::vector<char> calm(n);
  parallel_for(n, workers, [&](std::size_t i) {
    const std::uint64_t seed = candidate_seed(cfg.master_seed, i);
    bubble[i] = !run_background(cfg, ScenarioKind::bubble, seed).empty();
    calm[i] = run_background(cfg, ScenarioKind::nonbubble, seed).empty();
  });

  ScreenResult r;
  r.candidates = static_cast<int>(n);
  const auto train_size = static_cast<std::size_t>(cfg.experiment.train_pool_size);
  const auto test_size = static_cast<std::size_t>(cfg.experiment.n_test);
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t seed = candidate_seed(cfg.master_seed, i);
    r.bubble_hits += bubble[i];
    r.nonbubble_hits += calm[i];
    if (bubble[i] && r.seeds.bubble.size() < train_size)
      r.seeds.bubble.push_back(seed);
    else if (bubble[i] && r.seeds.test.size() < test_size)
      r.seeds.test.push_back(seed);
    else if (calm[i] && r.seeds.nonbubble.size() < train_size)
      r.seeds.nonbubble.push_back(seed);
  }
  auto warn_short = [&](const char* name, std::size_t got, std::size_t want) {
    if (got < want) {
      r.warnings.push_back(std::string(name) + " pool short: " + std::to_string(got) + " of " +
                           std::to_string(want));
      if (progress) progress("warning: " + r.warnings.back());
    }
  };
  warn_short("bubble", r.seeds.bubble.size(), train_size);
  warn_short("test", r.seeds.test.size(), test_size);
  warn_short("nonbubble", r.seeds.nonbubble.size(), train_size);
  return r;
}

void check_pool_hygiene(const SeedLists& seeds) {
  const std::set<std::uint64_t> test(seeds.test.begin(), seeds.test.end());
  for (std::uint64_t s : seeds.bubble)
    if (test.contains(s)) throw std::invalid_argument("seed " + std::to_string(s) + " is in both training and test pools");
  for (std::uint64_t s : seeds.nonbubble)
    if (test.contains(s)) throw std::invalid_argument("seed " + std::to_string(s) + " is in both training and test pools");
}

std::vector<MetricsRecord> to_metrics(int arm_pct, int first_run_id, std::span<const EvalRecord> evals) {
  std::vector<MetricsRecord> out;
  for (const EvalRecord& e : evals) {
    MetricsRecord m;
    m.run_id = first_run_id + e.run_id;
    m.seed = e.seed;
    m.arm_pct = arm_pct;
    m.profit_pct = e.profit_pct;
    m.bubble_count = e.metrics.count;
    m.avg_magnitude_cents = e.metrics.avg_magnitude;
    m.avg_duration_s = e.metrics.avg_duration_s;
    out.push_back(m);
  }
  return out;
}

ExperimentResult run_experiment(const ScenarioConfig& cfg_in, int workers, const std::filesystem::path& out_dir,
                                const Progress& progress) {
  auto say = [&](const std::string& s) {
    if (progress) progress(s);
  };
  ScenarioConfig cfg = cfg_in;
  if (cfg.seeds.bubble.empty() && cfg.seeds.test.empty() && cfg.seeds.nonbubble.empty()) {
    say("screening " + std::to_string(cfg.experiment.screen_candidates) + " candidate seeds");
    const ScreenResult s = screen_seeds(cfg, cfg.experiment.screen_candidates, workers, progress);
    cfg.seeds = s.seeds;
  }
  check_pool_hygiene(cfg.seeds);
  if (cfg.seeds.test.empty()) throw std::runtime_error("no test seeds available");

  ExperimentResult result;
  std::vector<BubbleRow> bubble_rows;
  std::vector<EpisodeRow> episode_rows;
  const int n_test = cfg.experiment.n_test;
  for (std::size_t a = 0; a < cfg.experiment.arms.size(); ++a) {
    ArmOutcome arm;
    arm.arm_pct = cfg.experiment.arms[a];
    ScenarioConfig arm_cfg = cfg;
    arm_cfg.train.bubble_mix_pct = arm.arm_pct;
    const int first_run = static_cast<int>(a) * n_test;
    try {
      say("arm " + std::to_string(arm.arm_pct) + "%: training " + std::to_string(cfg.train.episodes) + " episodes");
      MarketTrainResult trained = train_market(arm_cfg, cfg.seeds.bubble, cfg.seeds.nonbubble, workers);
      arm.train_log = trained.log;
      arm.bubble_episodes = trained.bubble_episodes;
      arm.episodes = trained.episodes;
      say("arm " + std::to_string(arm.arm_pct) + "%: evaluating " + std::to_string(n_test) + " runs");
      arm.evals = evaluate(arm_cfg, trained.net, cfg.seeds.test, n_test, workers);
      if (!out_dir.empty()) {
        const auto dir = out_dir / ("arm_" + std::to_string(arm.arm_pct));
        std::filesystem::create_directories(dir);
        save_checkpoint(dir / "policy.json", Checkpoint{arm_cfg, trained.net});
        write_train_log_csv(dir / "train_log.csv", arm.train_log);
      }
      for (const MetricsRecord& m : to_metrics(arm.arm_pct, first_run, arm.evals)) result.metrics.push_back(m);
      for (const EvalRecord& e : arm.evals) {
        for (const BubbleEvent& ev : e.events) bubble_rows.push_back({first_run + e.run_id, ev});
        for (const TapeRow& t : e.tape) episode_rows.push_back({first_run + e.run_id, t});
      }
    } catch (const std::exception& e) {
      arm.error = e.what();
      say("arm " + std::to_string(arm.arm_pct) + "% failed: " + arm.error);
    }
    result.arms.push_back(std::move(arm));
  }

  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    write_metrics_csv(out_dir / "metrics.csv", result.metrics);
    write_bubbles_csv(out_dir / "bubbles.csv", bubble_rows);
    write_episodes_csv(out_dir / "episodes.csv", episode_rows);
    {
      std::ofstream seeds(out_dir / "config_used.json", std::ios::binary);
      seeds << dump_config(cfg) << '\n';
    }
    if (!result.metrics.empty()) write_report(build_report(result.metrics), result.metrics, out_dir);
    std::ofstream failures(out_dir / "failures.txt", std::ios::binary);
    for (const ArmOutcome& arm : result.arms)
      if (!arm.error.empty()) failures << arm.arm_pct << ": " << arm.error << '\n';
  }
  return result;
}

Report build_report(std::span<const MetricsRecord> metrics) {
  if (metrics.empty()) throw std::invalid_argument("no metrics records");
  std::map<int, std::vector<const MetricsRecord*>> by_arm;
  for (const MetricsRecord& m : metrics) by_arm[m.arm_pct].push_back(&m);

  Report rep;
  std::map<std::string, std::vector<std::vector<double>>> groups;
  for (const auto& [arm, rows] : by_arm) {
    std::vector<double> profit;
    std::vector<double> count;
    std::vector<double> magnitude;
    std::vector<double> duration;
    int none = 0;
    for (const MetricsRecord* m : rows) {
      profit.push_back(m->profit_pct);
      count.push_back(m->bubble_count);
      if (m->avg_magnitude_cents) magnitude.push_back(*m->avg_magnitude_cents);
      if (m->avg_duration_s) duration.push_back(*m->avg_duration_s);
      none += m->bubble_count == 0;
    }
    ArmSummary s;
    s.arm_pct = arm;
    s.profit = summarize(profit);
    s.count = summarize(count);
    s.magnitude = summarize(magnitude);
    s.duration = summarize(duration);
    s.no_bubble_fraction = static_cast<double>(none) / static_cast<double>(rows.size());
    rep.arms.push_back(s);
    rep.per_arm_means["profit"].push_back(s.profit.mean);
    rep.per_arm_means["count"].push_back(s.count.mean);
    rep.per_arm_means["magnitude"].push_back(s.magnitude.mean);
    rep.per_arm_means["duration"].push_back(s.duration.mean);
    groups["profit"].push_back(std::move(profit));
    groups["count"].push_back(std::move(count));
    groups["magnitude"].push_back(std::move(magnitude));
    groups["duration"].push_back(std::move(duration));
  }
  for (const auto& [name, g] : groups) {
    const auto non_empty = std::count_if(g.begin(), g.end(), [](const auto& v) { return !v.empty(); });
    if (non_empty >= 2) rep.tests[name] = kruskal_wallis(g);
  }
  return rep;
}

namespace {

std::ofstream open_text(const std::filesystem::path& p) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  return out;
}

std::string cell(const Summary& s, int digits) {
  if (s.n == 0) return "-";
  return format_fixed(s.mean, digits) + " (" + format_fixed(s.stddev, digits) + ")";
}

}  // namespace

void write_report(const Report& rep, std::span<const MetricsRecord> metrics, const std::filesystem::path& dir,
                  std::size_t bins) {
  std::filesystem::create_directories(dir);
  {
    auto out = open_text(dir / "summary.csv");
    out << "arm_pct,n,profit_mean,profit_std,count_mean,count_std,magnitude_n,magnitude_mean,magnitude_std,"
           "duration_mean,duration_std,no_bubble_fraction\n";
    for (const ArmSummary& a : rep.arms)
      out << a.arm_pct << ',' << a.profit.n << ',' << format_fixed(a.profit.mean, 8) << ','
          << format_fixed(a.profit.stddev, 8) << ',' << format_fixed(a.count.mean, 4) << ','
          << format_fixed(a.count.stddev, 4) << ',' << a.magnitude.n << ',' << format_fixed(a.magnitude.mean, 4)
          << ',' << format_fixed(a.magnitude.stddev, 4) << ',' << format_fixed(a.duration.mean, 4) << ','
          << format_fixed(a.duration.stddev, 4) << ',' << format_fixed(a.no_bubble_fraction, 4) << '\n';
  }
  {
    auto out = open_text(dir / "kruskal_wallis.csv");
    out << "metric,h,df,p\n";
    for (const auto& [name, t] : rep.tests)
      out << name << ',' << format_fixed(t.h, 6) << ',' << t.df << ',' << format_fixed(t.p, 10) << '\n';
  }
  {
    auto out = open_text(dir / "histograms.csv");
    out << "metric,arm_pct,bin,bin_lo,bin_hi,count\n";
    auto emit = [&](const std::string& name, auto get) {
      std::vector<double> all;
      std::map<int, std::vector<double>> by_arm;
      for (const MetricsRecord& m : metrics)
        if (auto v = get(m)) {
          all.push_back(*v);
          by_arm[m.arm_pct].push_back(*v);
        }
      if (all.empty()) return;
      const Histogram range = histogram(all, bins);
      for (const auto& [arm, values] : by_arm) {
        std::vector<std::size_t> counts(range.counts.size(), 0);
        for (double v : values) {
          std::size_t b = range.width > 0 ? static_cast<std::size_t>((v - range.lo) / range.width) : 0;
          counts[std::min(b, counts.size() - 1)]++;
        }
        for (std::size_t b = 0; b < counts.size(); ++b)
          out << name << ',' << arm << ',' << b << ',' << format_fixed(range.lo + range.width * b, 6) << ','
              << format_fixed(range.lo + range.width * (b + 1), 6) << ',' << counts[b] << '\n';
      }
    };
    emit("profit_pct", [](const MetricsRecord& m) { return std::optional<double>(m.profit_pct); });
    emit("bubble_count", [](const MetricsRecord& m) { return std::optional<double>(m.bubble_count); });
    emit("avg_magnitude_cents", [](const MetricsRecord& m) { return m.avg_magnitude_cents; });
    emit("avg_duration_s", [](const MetricsRecord& m) { return m.avg_duration_s; });
  }
  auto out = open_text(dir / "report.md");
  out << "# Experiment report\n\n";
  out << "Mean (sample std) per arm. Magnitude and duration are averaged over runs with at least one bubble.\n\n";
  out << "| arm % | runs | profit (% of cash) | bubble count | magnitude (cents) | duration (s) | no-bubble runs |\n";
  out << "|---|---|---|---|---|---|---|\n";
  for (const ArmSummary& a : rep.arms) {
    Summary profit = a.profit;
    profit.mean *= 100.0;
    profit.stddev *= 100.0;
    out << "| " << a.arm_pct << " | " << a.profit.n << " | " << cell(profit, 3) << " | " << cell(a.count, 3)
        << " | " << cell(a.magnitude, 1) << " | " << cell(a.duration, 1) << " | "
        << format_fixed(100.0 * a.no_bubble_fraction, 1) << "% |\n";
  }
  out << "\n## Kruskal-Wallis across arms\n\n| metric | H | df | p |\n|---|---|---|---|\n";
  for (const auto& [name, t] : rep.tests)
    out << "| " << name << " | " << format_fixed(t.h, 4) << " | " << t.df << " | " << format_fixed(t.p, 6)
        << " |\n";
  out << "\nHistogram bins are in histograms.csv.\n";
}

bool monotone_with_inversions(std::span<const double> v, bool increasing, int allowed) {
  int inversions = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    const bool bad = increasing ? v[i] < v[i - 1] : v[i] > v[i - 1];
    inversions += bad;
  }
  return inversions <= allowed;
}

}  // namespace bubblesim
