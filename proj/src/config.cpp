#include "bubblesim/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "bubblesim/random.hpp"
#include "json.hpp"

namespace bubblesim {

namespace {

using nlohmann::json;

// Field lists, shared by the reader and the writer.

template <typename V>
void describe(V& v, OUParams& p) {
  v("mu", p.mu);
  v("kappa", p.kappa);
  v("sigma", p.sigma);
  v("r0", p.r0);
  v("dt", p.dt);
}

template <typename V>
void describe(V& v, RosterConfig& p) {
  v("value", p.value);
  v("noise", p.noise);
  v("momentum", p.momentum);
  v("herding", p.herding);
  v("market_makers", p.market_makers);
}

template <typename V>
void describe(V& v, ValueAgentParams& p) {
  v("wake_interval_s", p.wake_interval_s);
  v("wake_jitter", p.wake_jitter);
  v("band", p.band);
  v("obs_sigma", p.obs_sigma);
  v("qty", p.qty);
}

template <typename V>
void describe(V& v, NoiseAgentParams& p) {
  v("wakes_per_day", p.wakes_per_day);
  v("min_qty", p.min_qty);
  v("max_qty", p.max_qty);
}

template <typename V>
void describe(V& v, MomentumWindows& p) {
  v("short_s", p.short_s);
  v("long_s", p.long_s);
}

template <typename V>
void describe(V& v, TrendAgentParams& p) {
  v("wake_interval_s", p.wake_interval_s);
  v("windows", p.windows);
  v("qty", p.qty);
}

template <typename V>
void describe(V& v, MarketMakerParams& p) {
  v("wake_interval_s", p.wake_interval_s);
  v("half_spread", p.half_spread);
  v("size", p.size);
  v("levels", p.levels);
  v("level_spacing", p.level_spacing);
}

template <typename V>
void describe(V& v, DetectorConfig& p) {
  v("short_s", p.short_s);
  v("long_s", p.long_s);
  v("threshold", p.threshold);
  v("mode", p.mode);
}

template <typename V>
void describe(V& v, FeatureScaling& p) {
  v("offset", p.offset);
  v("scale", p.scale);
}

template <typename V>
void describe(V& v, EnvConfig& p) {
  v("decision_interval_s", p.decision_interval_s);
  v("order_qty", p.order_qty);
  v("starting_cash", p.starting_cash);
  v("momentum_feature", p.momentum_feature);
  v("scaling", p.scaling);
}

template <typename V>
void describe(V& v, PpoConfig& p) {
  v("clip", p.clip);
  v("gamma", p.gamma);
  v("lambda", p.lambda);
  v("epochs", p.epochs);
  v("minibatch", p.minibatch);
  v("learning_rate", p.learning_rate);
  v("entropy_coef", p.entropy_coef);
  v("value_coef", p.value_coef);
  v("max_grad_norm", p.max_grad_norm);
  v("normalize_advantages", p.normalize_advantages);
  v("hidden", p.hidden);
  v("episodes_per_update", p.episodes_per_update);
  v("reward_scale", p.reward_scale);
}

template <typename V>
void describe(V& v, TrainConfig& p) {
  v("bubble_mix_pct", p.bubble_mix_pct);
  v("episodes", p.episodes);
  v("ppo", p.ppo);
  v("seed", p.seed);
}

template <typename V>
void describe(V& v, ExperimentConfig& p) {
  v("arms", p.arms);
  v("n_test", p.n_test);
  v("train_pool_size", p.train_pool_size);
  v("screen_candidates", p.screen_candidates);
  v("workers", p.workers);
  v("attribution_permutations", p.attribution_permutations);
  v("attribution_target", p.attribution_target);
}

template <typename V>
void describe(V& v, SeedLists& p) {
  v("bubble", p.bubble);
  v("nonbubble", p.nonbubble);
  v("test", p.test);
}

template <typename V>
void describe(V& v, ScenarioConfig& p) {
  v("version", p.version);
  v("master_seed", p.master_seed);
  v("horizon_s", p.horizon_s);
  v("latency_ns", p.latency_ns);
  v("fundamental", p.fundamental);
  v("roster", p.roster);
  v("value_agent", p.value);
  v("noise_agent", p.noise);
  v("momentum_agent", p.momentum);
  v("herding_agent", p.herding);
  v("herding_cutoff_s", p.herding_cutoff_s);
  v("market_maker", p.market_maker);
  v("detector", p.detector);
  v("env", p.env);
  v("train", p.train);
  v("experiment", p.experiment);
  v("seeds", p.seeds);
}

struct Probe {
  template <typename T>
  void operator()(const char*, T&) {}
};

template <typename T>
concept Described = requires(Probe& v, T& t) { describe(v, t); };

json enum_to_json(DetectionMode m) { return m == DetectionMode::any_sample ? "any_sample" : "mean_deviation"; }
json enum_to_json(MomentumFeature m) { return m == MomentumFeature::ratio ? "ratio" : "sign"; }

constexpr std::array<const char*, 4> kTargetNames{"action_score", "buy_logit", "hold_logit", "sell_logit"};

json enum_to_json(AttributionTarget t) { return kTargetNames[static_cast<std::size_t>(t)]; }

void enum_from_json(const json& j, AttributionTarget& t, const std::string& path) {
  const auto s = j.get<std::string>();
  for (std::size_t i = 0; i < kTargetNames.size(); ++i)
    if (s == kTargetNames[i]) {
      t = static_cast<AttributionTarget>(i);
      return;
    }
  throw ConfigError(path + ": unknown attribution target '" + s + "'");
}

void enum_from_json(const json& j, DetectionMode& m, const std::string& path) {
  const auto s = j.get<std::string>();
  if (s == "any_sample")
    m = DetectionMode::any_sample;
  else if (s == "mean_deviation")
    m = DetectionMode::mean_deviation;
  else
    throw ConfigError(path + ": unknown detection mode '" + s + "'");
}

void enum_from_json(const json& j, MomentumFeature& m, const std::string& path) {
  const auto s = j.get<std::string>();
  if (s == "ratio")
    m = MomentumFeature::ratio;
  else if (s == "sign")
    m = MomentumFeature::sign;
  else
    throw ConfigError(path + ": unknown momentum feature '" + s + "'");
}

struct Writer {
  json& out;

  template <typename T>
  void operator()(const char* key, T& value) {
    if constexpr (Described<T>) {
      json sub = json::object();
      Writer w{sub};
      describe(w, value);
      out[key] = std::move(sub);
    } else if constexpr (std::is_enum_v<T>) {
      out[key] = enum_to_json(value);
    } else {
      out[key] = value;
    }
  }
};

struct Reader {
  const json& in;
  std::string path;
  std::set<std::string> seen{};

  template <typename T>
  void operator()(const char* key, T& value) {
    seen.insert(key);
    if (!in.contains(key)) return;
    const json& node = in.at(key);
    const std::string where = path + "." + key;
    if constexpr (Described<T>) {
      if (!node.is_object()) throw ConfigError(where + ": expected an object");
      Reader r{node, where};
      describe(r, value);
      r.finish();
    } else {
      try {
        if constexpr (std::is_enum_v<T>)
          enum_from_json(node, value, where);
        else
          value = node.get<T>();
      } catch (const json::exception& e) {
        throw ConfigError(where + ": " + e.what());
      }
    }
  }

  void finish() const {
    for (const auto& item : in.items())
      if (!seen.contains(item.key())) throw ConfigError(path + ": unknown key '" + item.key() + "'");
  }
};

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError("invalid config: " + what);
}

}  // namespace

void ScenarioConfig::validate() const {
  require(version == kConfigVersion, "unsupported version " + std::to_string(version));
  require(horizon_s > 0, "horizon_s must be positive");
  require(latency_ns >= 0, "latency_ns must be non-negative");
  try {
    fundamental.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid config: ") + e.what());
  }
  require(roster.value >= 0 && roster.noise >= 0 && roster.momentum >= 0 && roster.herding >= 0 &&
              roster.market_makers >= 0,
          "roster counts must be non-negative");
  require(herding_cutoff_s >= 0 && herding_cutoff_s <= horizon_s, "herding cutoff must lie within the horizon");
  require(value.wake_interval_s > 0 && momentum.wake_interval_s > 0 && herding.wake_interval_s > 0 &&
              market_maker.wake_interval_s > 0,
          "wake intervals must be positive");
  require(value.wake_jitter >= 0 && value.wake_jitter < 1, "value wake_jitter must be in [0, 1)");
  require(noise.wakes_per_day > 0, "noise wakes_per_day must be positive");
  require(noise.min_qty > 0 && noise.max_qty >= noise.min_qty, "noise qty range invalid");
  require(value.qty > 0 && momentum.qty > 0 && herding.qty > 0 && market_maker.size > 0,
          "order sizes must be positive");
  require(market_maker.levels > 0 && market_maker.half_spread > 0 && market_maker.level_spacing > 0,
          "market maker ladder invalid");
  require(momentum.windows.short_s > 0 && momentum.windows.short_s < momentum.windows.long_s,
          "momentum windows must satisfy 0 < short < long");
  require(herding.windows.short_s > 0 && herding.windows.short_s < herding.windows.long_s,
          "herding windows must satisfy 0 < short < long");
  require(detector.short_s > 0 && detector.short_s < detector.long_s, "detector windows must satisfy 0 < short < long");
  require(detector.threshold > 0, "detector threshold must be positive");
  require(env.decision_interval_s > 0 && env.order_qty > 0 && env.starting_cash > 0, "env parameters invalid");
  for (double s : env.scaling.scale) require(s > 0, "feature scales must be positive");
  auto valid_mix = [](int m) { return m == 0 || m == 25 || m == 50 || m == 75 || m == 100; };
  require(valid_mix(train.bubble_mix_pct), "bubble_mix_pct must be one of 0, 25, 50, 75, 100");
  require(train.episodes > 0, "train.episodes must be positive");
  const PpoConfig& p = train.ppo;
  require(p.clip > 0 && p.gamma > 0 && p.gamma <= 1 && p.lambda >= 0 && p.lambda <= 1, "PPO coefficients invalid");
  require(p.epochs > 0 && p.minibatch > 0 && p.hidden > 0 && p.episodes_per_update > 0, "PPO sizes invalid");
  require(p.learning_rate > 0 && p.reward_scale > 0, "PPO rates invalid");
  require(!experiment.arms.empty(), "experiment.arms must not be empty");
  for (int a : experiment.arms) require(valid_mix(a), "experiment arm " + std::to_string(a) + " not allowed");
  require(experiment.n_test > 0 && experiment.train_pool_size > 0 && experiment.screen_candidates > 0 &&
              experiment.workers > 0,
          "experiment sizes must be positive");
}

ScenarioConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config root must be an object");
  if (!doc.contains("version")) throw ConfigError("config is missing 'version'");
  ScenarioConfig cfg;
  Reader r{doc, "config"};
  describe(r, cfg);
  r.finish();
  cfg.validate();
  return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string dump_config(const ScenarioConfig& cfg) {
  json out = json::object();
  ScenarioConfig copy = cfg;
  Writer w{out};
  describe(w, copy);
  return out.dump(2);
}

std::uint64_t config_hash(const ScenarioConfig& cfg) { return fnv1a(dump_config(cfg)); }

}  // namespace bubblesim
