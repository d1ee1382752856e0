#include "bubblesim/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace bubblesim {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CsvError("cannot write " + path.string());
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CsvError("cannot open " + path.string());
  return in;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string optional_fixed(const std::optional<double>& v, int digits) {
  return v ? format_fixed(*v, digits) : std::string();
}

template <typename T>
T parse_number(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    T v{};
    if constexpr (std::is_same_v<T, double>)
      v = std::stod(s, &used);
    else if constexpr (std::is_same_v<T, std::uint64_t>)
      v = std::stoull(s, &used);
    else
      v = static_cast<T>(std::stoll(s, &used));
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw CsvError("bad " + what + " value '" + s + "'");
  }
}

}  // namespace

std::string format_fixed(double v, int digits) {
  if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  std::string s(buf);
  if (s.find_first_not_of("-0.") == std::string::npos && s.front() == '-') s.erase(0, 1);  // no "-0.000"
  return s;
}

void write_trades_csv(const std::filesystem::path& path, std::span<const Trade> trades) {
  auto out = open_out(path);
  out << "time_ns,price_cents,qty,buyer,seller\n";
  for (const Trade& t : trades)
    out << t.ts.nanos << ',' << t.price << ',' << t.qty << ',' << t.buyer << ',' << t.seller << '\n';
}

void write_orders_csv(const std::filesystem::path& path, std::span<const OrderLogEntry> orders,
                      std::span<const Role> roles) {
  auto out = open_out(path);
  out << "time_ns,order_id,agent,role,side,type,qty,limit_price_cents\n";
  for (const OrderLogEntry& o : orders)
    out << o.ts.nanos << ',' << o.id << ',' << o.agent << ',' << (o.agent < roles.size() ? to_string(roles[o.agent]) : "?")
        << ',' << to_string(o.side) << ',' << (o.type == OrderType::market ? "market" : "limit") << ',' << o.qty << ','
        << o.limit_price << '\n';
}

void write_series_csv(const std::filesystem::path& path, const std::string& value_name,
                      std::span<const Cents> values) {
  auto out = open_out(path);
  out << "time_s," << value_name << '\n';
  for (std::size_t i = 0; i < values.size(); ++i) out << i << ',' << values[i] << '\n';
}

void write_bubbles_csv(const std::filesystem::path& path, std::span<const BubbleRow> rows) {
  auto out = open_out(path);
  out << "run_id,start_s,end_s,direction,magnitude_cents,duration_s\n";
  for (const BubbleRow& r : rows)
    out << r.run_id << ',' << r.event.start_s << ',' << r.event.end_s << ',' << to_string(r.event.direction) << ','
        << format_fixed(r.event.magnitude, 4) << ',' << r.event.duration_s() << '\n';
}

void write_episodes_csv(const std::filesystem::path& path, std::span<const EpisodeRow> rows) {
  auto out = open_out(path);
  out << "run_id,t_s,action,reward_cents,holding,mid_cents\n";
  for (const EpisodeRow& r : rows)
    out << r.run_id << ',' << r.step.t_s << ',' << to_string(r.step.action) << ',' << r.step.reward << ','
        << r.step.holding << ',' << r.step.mid << '\n';
}

void write_metrics_csv(const std::filesystem::path& path, std::span<const MetricsRecord> rows) {
  auto out = open_out(path);
  out << "run_id,seed,arm_pct,profit_pct,bubble_count,avg_magnitude_cents,avg_duration_s\n";
  for (const MetricsRecord& r : rows)
    out << r.run_id << ',' << r.seed << ',' << r.arm_pct << ',' << format_fixed(r.profit_pct, 8) << ','
        << r.bubble_count << ',' << optional_fixed(r.avg_magnitude_cents, 4) << ','
        << optional_fixed(r.avg_duration_s, 4) << '\n';
}

void write_attribution_csv(const std::filesystem::path& path, std::span<const AttributionRow> rows) {
  auto out = open_out(path);
  out << "run_id,t_s";
  for (std::size_t i = 0; i < kFeatureCount; ++i) out << ',' << feature_name(i);
  for (std::size_t i = 0; i < kFeatureCount; ++i) out << ",shap_" << feature_name(i);
  out << ",model_output\n";
  for (const AttributionRow& r : rows) {
    out << r.run_id << ',' << r.record.t_s;
    for (double v : r.record.features) out << ',' << format_fixed(v, 8);
    for (double v : r.record.shapley) out << ',' << format_fixed(v, 10);
    out << ',' << format_fixed(r.record.model_output, 10) << '\n';
  }
}

void write_train_log_csv(const std::filesystem::path& path, std::span<const TrainLogRow> rows) {
  auto out = open_out(path);
  out << "update_id,mean_reward,policy_loss,value_loss,entropy,approx_kl,clip_fraction,aborted\n";
  for (const TrainLogRow& r : rows)
    out << r.update_id << ',' << format_fixed(r.mean_reward, 4) << ',' << format_fixed(r.policy_loss, 8) << ','
        << format_fixed(r.value_loss, 8) << ',' << format_fixed(r.entropy, 8) << ','
        << format_fixed(r.approx_kl, 8) << ',' << format_fixed(r.clip_fraction, 6) << ',' << (r.aborted ? 1 : 0)
        << '\n';
}

std::vector<Cents> read_series_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw CsvError(path.string() + ": empty file");
  std::vector<Cents> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != 2) throw CsvError(path.string() + ": expected 2 columns");
    if (parse_number<std::int64_t>(cells[0], "time_s") != static_cast<std::int64_t>(out.size()))
      throw CsvError(path.string() + ": samples must be consecutive seconds from 0");
    out.push_back(parse_number<std::int64_t>(cells[1], "value"));
  }
  return out;
}

std::vector<MetricsRecord> read_metrics_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw CsvError(path.string() + ": empty file");
  if (line != "run_id,seed,arm_pct,profit_pct,bubble_count,avg_magnitude_cents,avg_duration_s")
    throw CsvError(path.string() + ": unexpected header");
  std::vector<MetricsRecord> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto c = split(line);
    if (c.size() != 7) throw CsvError(path.string() + ": expected 7 columns");
    MetricsRecord r;
    r.run_id = parse_number<int>(c[0], "run_id");
    r.seed = parse_number<std::uint64_t>(c[1], "seed");
    r.arm_pct = parse_number<int>(c[2], "arm_pct");
    r.profit_pct = parse_number<double>(c[3], "profit_pct");
    r.bubble_count = parse_number<int>(c[4], "bubble_count");
    if (!c[5].empty()) r.avg_magnitude_cents = parse_number<double>(c[5], "avg_magnitude_cents");
    if (!c[6].empty()) r.avg_duration_s = parse_number<double>(c[6], "avg_duration_s");
    out.push_back(r);
  }
  return out;
}

}  // namespace bubblesim
