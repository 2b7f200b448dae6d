#include "sirs/io.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace sirs {

using nlohmann::json;

const char* to_string(Experiment e) {
  switch (e) {
    case Experiment::kIndividual: return "individual";
    case Experiment::kPopulation: return "population";
    case Experiment::kNetworkEvolve: return "network-evolve";
    case Experiment::kOracleCheck: return "oracle-check";
    case Experiment::kCompare: return "compare";
  }
  return "?";
}

Experiment experiment_from_string(const std::string& s) {
  for (auto e : {Experiment::kIndividual, Experiment::kPopulation, Experiment::kNetworkEvolve,
                 Experiment::kOracleCheck, Experiment::kCompare})
    if (s == to_string(e)) return e;
  throw Error(ErrorCode::kValidationError, "experiment", "unknown experiment '" + s + "'");
}

namespace {

// Walks one JSON object, consuming keys; leftover keys are an error.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw Error(ErrorCode::kParseError, path_.empty() ? "<root>" : path_, "expected an object");
  }

  bool has(const char* key) const { return j_.contains(key); }

  template <typename T>
  void get(const char* key, T& out, bool required = false) {
    const std::string name = qualified(key);
    if (!j_.contains(key)) {
      if (required) throw Error(ErrorCode::kValidationError, name, "missing");
      return;
    }
    used_.insert(key);
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kParseError, name, e.what());
    }
  }

  ObjectReader child(const char* key) {
    used_.insert(key);
    return ObjectReader(j_.at(key), qualified(key));
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!used_.count(it.key()))
        throw Error(ErrorCode::kParseError, qualified(it.key()), "unknown key");
  }

  std::string qualified(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

std::size_t line_of(const std::string& text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + byte, '\n'));
}

}  // namespace

void validate_config(const RunConfig& cfg) {
  auto fail = [](const std::string& field, const std::string& what) {
    throw Error(ErrorCode::kValidationError, field, what);
  };
  try {
    validate_params(cfg.params);
  } catch (const Error& e) {
    fail("params." + e.field(), e.what());
  }
  if (cfg.seeds.empty()) fail("seeds", "at least one seed required");
  if (!(cfg.t_end > 0.0) || !std::isfinite(cfg.t_end)) fail("t_end", "must be > 0");
  if (!(cfg.mean_degree > 0.0)) fail("mean_degree", "must be > 0");
  if (!(cfg.resample_dt > 0.0)) fail("resample_dt", "must be > 0");
  if (cfg.m_arrival < 1) fail("m_arrival", "must be >= 1");
  if (cfg.bin_width < 1) fail("bin_width", "must be >= 1");
  if (cfg.workers < 0) fail("workers", "must be >= 0");
  if (cfg.init.s < 0 || cfg.init.i < 0 || cfg.init.r < 0) fail("init", "counts must be >= 0");
  try {
    validate_ws(cfg.ws);
  } catch (const Error& e) {
    fail("ws." + e.field(), e.what());
  }
  for (int k : cfg.k_init_values) {
    WsConfig ws = cfg.ws;
    ws.k_init = k;
    try {
      validate_ws(ws);
    } catch (const Error& e) {
      fail("k_init_values", e.what());
    }
  }
  for (double mu : cfg.protect_intensities)
    if (!(mu >= 0.0)) fail("protect_intensities", "must be >= 0");

  switch (cfg.experiment) {
    case Experiment::kIndividual:
      if (cfg.burn_in < 0) fail("burn_in", "must be >= 0");
      if (cfg.steps <= cfg.burn_in) fail("steps", "must exceed burn_in");
      if (cfg.params.gamma > 1.0) fail("params.gamma", "per-step probability must be <= 1");
      if (cfg.params.alpha > 1.0) fail("params.alpha", "per-step probability must be <= 1");
      break;
    case Experiment::kOracleCheck:
      if (cfg.oracle_cap < 1 || cfg.oracle_cap > 40) fail("oracle_cap", "must lie in [1, 40]");
      [[fallthrough]];
    case Experiment::kPopulation:
    case Experiment::kNetworkEvolve:
      if (!(cfg.window.t_b >= 0.0 && cfg.window.t_b < cfg.window.t_e &&
            cfg.window.t_e <= cfg.t_end))
        fail("window", "need 0 <= t_b < t_e <= t_end");
      break;
    case Experiment::kCompare:
      if (cfg.compare && cfg.compare->shift < 0) fail("compare.shift", "must be >= 0");
      if (cfg.compare && cfg.compare->beta_change_time.has_value() != cfg.compare->beta_after.has_value())
        fail("compare.beta_after", "beta_change_time and beta_after go together");
      if (cfg.compare && cfg.compare->beta_after && !(*cfg.compare->beta_after >= 0.0 && *cfg.compare->beta_after <= 1.0))
        fail("compare.beta_after", "must lie in [0, 1]");
      break;
  }
}

RunConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParseError, "line " + std::to_string(line_of(text, e.byte)), e.what());
  }

  RunConfig cfg;
  ObjectReader root(j, "");
  std::string experiment;
  root.get("experiment", experiment, true);
  cfg.experiment = experiment_from_string(experiment);

  if (!root.has("params")) throw Error(ErrorCode::kValidationError, "params", "missing");
  {
    ObjectReader p = root.child("params");
    p.get("beta", cfg.params.beta, true);
    p.get("gamma", cfg.params.gamma, true);
    p.get("alpha", cfg.params.alpha, true);
    p.get("lambda", cfg.params.lambda_in, true);
    p.get("revive_frac", cfg.params.revive_frac, true);
    p.get("protect_intensity", cfg.params.protect_intensity);
    p.finish();
  }
  if (root.has("ws")) {
    ObjectReader w = root.child("ws");
    w.get("n0", cfg.ws.n0);
    w.get("k_init", cfg.ws.k_init);
    w.get("rewire_prob", cfg.ws.rewire_prob);
    w.finish();
  }
  root.get("m_arrival", cfg.m_arrival);
  root.get("mean_degree", cfg.mean_degree);
  root.get("live_mean_degree", cfg.live_mean_degree);
  root.get("t_end", cfg.t_end);
  root.get("steps", cfg.steps);
  root.get("burn_in", cfg.burn_in);
  if (root.has("window")) {
    ObjectReader w = root.child("window");
    w.get("t_b", cfg.window.t_b, true);
    w.get("t_e", cfg.window.t_e, true);
    w.finish();
  }
  root.get("seeds", cfg.seeds);
  root.get("output_dir", cfg.output_dir);
  root.get("resample_dt", cfg.resample_dt);
  if (root.has("init")) {
    ObjectReader w = root.child("init");
    w.get("s", cfg.init.s, true);
    w.get("i", cfg.init.i, true);
    w.get("r", cfg.init.r, true);
    w.finish();
  }
  std::string extinction = to_string(cfg.extinction);
  root.get("extinction", extinction);
  cfg.extinction = extinction_policy_from_string(extinction);
  root.get("protect_intensities", cfg.protect_intensities);
  root.get("k_init_values", cfg.k_init_values);
  root.get("oracle_cap", cfg.oracle_cap);
  root.get("bin_width", cfg.bin_width);
  root.get("write_events", cfg.write_events);
  root.get("workers", cfg.workers);
  if (root.has("compare")) {
    ObjectReader c = root.child("compare");
    CompareSettings cs;
    c.get("obs_csv", cs.obs_csv);
    c.get("date_column", cs.date_column);
    c.get("value_column", cs.value_column);
    c.get("shift", cs.shift);
    if (c.has("beta_change_time")) {
      double v;
      c.get("beta_change_time", v);
      cs.beta_change_time = v;
    }
    if (c.has("beta_after")) {
      double v;
      c.get("beta_after", v);
      cs.beta_after = v;
    }
    c.finish();
    cfg.compare = cs;
  }
  root.finish();
  if (!root.has("seeds")) throw Error(ErrorCode::kValidationError, "seeds", "missing");
  validate_config(cfg);
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, path.string(), "cannot open config");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string write_config(const RunConfig& cfg) {
  nlohmann::ordered_json j;
  j["experiment"] = to_string(cfg.experiment);
  j["params"] = {{"beta", cfg.params.beta},
                 {"gamma", cfg.params.gamma},
                 {"alpha", cfg.params.alpha},
                 {"lambda", cfg.params.lambda_in},
                 {"revive_frac", cfg.params.revive_frac},
                 {"protect_intensity", cfg.params.protect_intensity}};
  j["ws"] = {{"n0", cfg.ws.n0}, {"k_init", cfg.ws.k_init}, {"rewire_prob", cfg.ws.rewire_prob}};
  j["m_arrival"] = cfg.m_arrival;
  j["mean_degree"] = cfg.mean_degree;
  j["live_mean_degree"] = cfg.live_mean_degree;
  j["t_end"] = cfg.t_end;
  j["steps"] = cfg.steps;
  j["burn_in"] = cfg.burn_in;
  j["window"] = {{"t_b", cfg.window.t_b}, {"t_e", cfg.window.t_e}};
  j["seeds"] = cfg.seeds;
  j["output_dir"] = cfg.output_dir;
  j["resample_dt"] = cfg.resample_dt;
  j["init"] = {{"s", cfg.init.s}, {"i", cfg.init.i}, {"r", cfg.init.r}};
  j["extinction"] = to_string(cfg.extinction);
  j["protect_intensities"] = cfg.protect_intensities;
  j["k_init_values"] = cfg.k_init_values;
  j["oracle_cap"] = cfg.oracle_cap;
  j["bin_width"] = cfg.bin_width;
  j["write_events"] = cfg.write_events;
  j["workers"] = cfg.workers;
  if (cfg.compare) {
    nlohmann::ordered_json c;
    c["obs_csv"] = cfg.compare->obs_csv;
    c["date_column"] = cfg.compare->date_column;
    c["value_column"] = cfg.compare->value_column;
    c["shift"] = cfg.compare->shift;
    if (cfg.compare->beta_change_time) c["beta_change_time"] = *cfg.compare->beta_change_time;
    if (cfg.compare->beta_after) c["beta_after"] = *cfg.compare->beta_after;
    j["compare"] = c;
  }
  return j.dump(2) + "\n";
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
    out.push_back(cell);
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::optional<double> parse_number(const std::string& s) {
  double v = 0.0;
  const char* end = s.data() + s.size();
  auto res = std::from_chars(s.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end || !std::isfinite(v)) return std::nullopt;
  return v;
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, path.string(), "cannot open");
  CsvTable t;
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!have_header) {
      t.header = split_csv_line(line);
      have_header = true;
    } else {
      t.rows.push_back(split_csv_line(line));
    }
  }
  return t;
}

std::size_t column_index(const CsvTable& t, const std::string& name) {
  auto it = std::find(t.header.begin(), t.header.end(), name);
  if (it == t.header.end()) throw Error(ErrorCode::kMissingColumn, name);
  return static_cast<std::size_t>(it - t.header.begin());
}

}  // namespace

std::optional<long> parse_iso_date(const std::string& s) {
  int y = 0;
  unsigned m = 0, d = 0;
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
  auto num = [&](std::size_t pos, std::size_t len, auto& out) {
    auto res = std::from_chars(s.data() + pos, s.data() + pos + len, out);
    return res.ec == std::errc() && res.ptr == s.data() + pos + len;
  };
  if (!num(0, 4, y) || !num(5, 2, m) || !num(8, 2, d)) return std::nullopt;
  using namespace std::chrono;
  const year_month_day ymd{year{y}, month{m}, day{d}};
  if (!ymd.ok()) return std::nullopt;
  return static_cast<long>(sys_days{ymd}.time_since_epoch().count());
}

CaseSeries ingest_case_csv(const std::filesystem::path& path, const std::string& date_column,
                           const std::string& value_column) {
  const CsvTable t = read_csv(path);
  const std::size_t dc = column_index(t, date_column);
  const std::size_t vc = column_index(t, value_column);
  Eigen::VectorXd values(static_cast<Eigen::Index>(t.rows.size()));
  std::optional<long> prev;
  for (std::size_t k = 0; k < t.rows.size(); ++k) {
    const auto& row = t.rows[k];
    const std::string row_id = "row " + std::to_string(k + 1);
    if (row.size() <= std::max(dc, vc)) throw Error(ErrorCode::kNonNumericValue, row_id, "short row");
    const auto day = parse_iso_date(row[dc]);
    if (!day) throw Error(ErrorCode::kNonContiguousDates, row_id, "bad date '" + row[dc] + "'");
    if (prev && *day != *prev + 1)
      throw Error(ErrorCode::kNonContiguousDates, row_id, row[dc] + " does not follow the previous day");
    prev = day;
    const auto v = parse_number(row[vc]);
    if (!v) throw Error(ErrorCode::kNonNumericValue, row_id, "'" + row[vc] + "'");
    values[static_cast<Eigen::Index>(k)] = *v;
  }
  std::optional<std::string> label;
  if (!t.rows.empty()) label = t.rows.front()[dc];
  return CaseSeries(std::move(values), label);
}

CaseSeries read_series_csv(const std::filesystem::path& path, const std::string& column) {
  const CsvTable t = read_csv(path);
  const std::size_t c = column_index(t, column);
  Eigen::VectorXd values(static_cast<Eigen::Index>(t.rows.size()));
  for (std::size_t k = 0; k < t.rows.size(); ++k) {
    const auto v = t.rows[k].size() > c ? parse_number(t.rows[k][c]) : std::nullopt;
    if (!v) throw Error(ErrorCode::kNonNumericValue, "row " + std::to_string(k + 1));
    values[static_cast<Eigen::Index>(k)] = *v;
  }
  return CaseSeries(std::move(values));
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, path.string(), "cannot write");
  out << text;
  if (!out) throw Error(ErrorCode::kIoError, path.string(), "write failed");
}

LogLevel log_level() {
  const char* env = std::getenv("SIRS_LOG");
  if (!env) return LogLevel::kWarn;
  const std::string v = env;
  if (v == "error") return LogLevel::kError;
  if (v == "info") return LogLevel::kInfo;
  if (v == "debug") return LogLevel::kDebug;
  return LogLevel::kWarn;
}

void log(LogLevel level, const std::string& msg) {
  static const LogLevel threshold = log_level();
  if (level > threshold) return;
  static const char* names[] = {"error", "warn", "info", "debug"};
  std::cerr << "[" << names[static_cast<int>(level)] << "] " << msg << '\n';
}

}  // namespace sirs
