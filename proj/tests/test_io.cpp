#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "sirs/experiments.hpp"
#include "sirs/io.hpp"

using namespace sirs;
namespace fs = std::filesystem;

namespace {

const fs::path kData = SIRS_TEST_DATA;
const fs::path kConfigs = SIRS_CONFIG_DIR;

std::string minimal(const std::string& extra = "") {
  return R"({"experiment": "population",
  "params": {"beta": 0.001, "gamma": 0.7, "alpha": 0.8, "lambda": 3, "revive_frac": 0.995},
  "seeds": [1])" + extra + "}";
}

template <typename Fn>
std::pair<ErrorCode, std::string> error_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return {e.code(), e.field()};
  }
  return {ErrorCode::kIoError, "<none>"};
}

RunConfig random_config(RandomSource& rs) {
  RunConfig c;
  c.experiment = static_cast<Experiment>(rs.uniform_index(5));
  c.params.beta = rs.uniform();
  c.params.gamma = rs.uniform();
  c.params.alpha = rs.uniform();
  c.params.lambda_in = rs.uniform() * 10.0;
  c.params.revive_frac = rs.uniform() * 0.99;
  c.params.protect_intensity = rs.uniform() * 3.0;
  c.ws.k_init = 1 + static_cast<int>(rs.uniform_index(6));
  c.ws.n0 = 2 * c.ws.k_init + 5 + static_cast<int>(rs.uniform_index(2000));
  c.ws.rewire_prob = rs.uniform();
  c.m_arrival = 1 + static_cast<int>(rs.uniform_index(8));
  c.mean_degree = 0.5 + rs.uniform() * 10.0;
  c.live_mean_degree = rs.bernoulli(0.5);
  c.t_end = 1.0 + rs.uniform() * 5000.0;
  c.burn_in = static_cast<int>(rs.uniform_index(100));
  c.steps = c.burn_in + 1 + static_cast<int>(rs.uniform_index(100));
  c.window.t_b = rs.uniform() * c.t_end * 0.5;
  c.window.t_e = c.window.t_b + (c.t_end - c.window.t_b) * (0.1 + 0.9 * rs.uniform());
  c.seeds.clear();
  for (std::size_t k = 0, n = 1 + rs.uniform_index(5); k < n; ++k) c.seeds.push_back(rs.engine()());
  c.output_dir = "out/" + std::to_string(rs.uniform_index(100));
  c.resample_dt = 0.01 + rs.uniform();
  c.init = {static_cast<std::int64_t>(rs.uniform_index(5)), 1, 0};
  c.extinction = rs.bernoulli(0.5) ? ExtinctionPolicy::kReseed : ExtinctionPolicy::kAbsorb;
  for (std::size_t k = 0, n = rs.uniform_index(3); k < n; ++k) c.protect_intensities.push_back(rs.uniform() * 2);
  if (rs.bernoulli(0.5)) c.k_init_values = {1, 2};
  c.oracle_cap = 1 + static_cast<int>(rs.uniform_index(40));
  c.bin_width = 1 + static_cast<int>(rs.uniform_index(10));
  c.write_events = rs.bernoulli(0.5);
  c.workers = static_cast<int>(rs.uniform_index(4));
  if (rs.bernoulli(0.5)) {
    CompareSettings cs;
    cs.obs_csv = "cases.csv";
    cs.shift = static_cast<int>(rs.uniform_index(10));
    if (rs.bernoulli(0.5)) {
      cs.beta_change_time = rs.uniform() * 10.0;
      cs.beta_after = rs.uniform();
    }
    c.compare = cs;
  }
  return c;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("paper-base config file") {
  const RunConfig c = load_config(kConfigs / "paper-base.json");
  CHECK(c.experiment == Experiment::kPopulation);
  CHECK(c.params.lambda_in == 3.0);
  CHECK(c.params.beta == 0.001);
  CHECK(c.params.gamma == 0.7);
  CHECK(c.params.alpha == 0.8);
  CHECK(c.params.revive_frac == 0.995);
  CHECK(c.mean_degree == 5.0);
  CHECK(c.t_end == 4000.0);
  CHECK(c.seeds.size() == 10);
}

TEST_CASE("every shipped config loads") {
  for (const auto& entry : fs::directory_iterator(kConfigs)) {
    CAPTURE(entry.path().string());
    CHECK_NOTHROW(load_config(entry.path()));
  }
}

TEST_CASE("validation errors name the field") {
  const std::string no_seeds = R"({"experiment": "population",
  "params": {"beta": 0.001, "gamma": 0.7, "alpha": 0.8, "lambda": 3, "revive_frac": 0.995}})";
  CHECK(error_of([&] { parse_config(no_seeds); }) == std::pair{ErrorCode::kValidationError, std::string("seeds")});
  CHECK(error_of([] { parse_config(minimal(R"(, "t_end": -5)")); }) ==
        std::pair{ErrorCode::kValidationError, std::string("t_end")});
  CHECK(error_of([] {
          parse_config(R"({"experiment": "population", "seeds": [],
            "params": {"beta": 0.1, "gamma": 0.7, "alpha": 0.8, "lambda": 3, "revive_frac": 0.5}})");
        }).second == "seeds");
  CHECK(error_of([] {
          parse_config(R"({"experiment": "population", "seeds": [1],
            "params": {"beta": 2, "gamma": 0.7, "alpha": 0.8, "lambda": 3, "revive_frac": 0.5}})");
        }) == std::pair{ErrorCode::kValidationError, std::string("params.beta")});
  CHECK(error_of([] { parse_config(minimal(R"(, "window": {"t_b": 10, "t_e": 5000})")); }).second == "window");
  CHECK(error_of([] { parse_config(minimal(R"(, "experiment2": 1)")); }) ==
        std::pair{ErrorCode::kParseError, std::string("experiment2")});
  CHECK(error_of([] { parse_config(minimal(R"(, "ws": {"n0": 100, "k": 2})")); }) ==
        std::pair{ErrorCode::kParseError, std::string("ws.k")});
  CHECK(error_of([] { parse_config(minimal(R"(, "t_end": "long")")); }) ==
        std::pair{ErrorCode::kParseError, std::string("t_end")});
  CHECK(error_of([] { parse_config("{\n\"experiment\": \"population\",\n oops}"); }) ==
        std::pair{ErrorCode::kParseError, std::string("line 3")});
  CHECK(error_of([] { load_config("/nonexistent/config.json"); }).first == ErrorCode::kIoError);
}

TEST_CASE("property: config round-trip") {
  RandomSource rs(501);
  for (int c = 0; c < 1000; ++c) {
    const RunConfig cfg = random_config(rs);
    validate_config(cfg);
    const RunConfig back = parse_config(write_config(cfg));
    REQUIRE(back == cfg);
  }
}

TEST_CASE("case series ingestion") {
  const CaseSeries s = ingest_case_csv(kData / "cases_23.csv", "date", "cases");
  CHECK(s.size() == 23);
  CHECK(s.t0_label == std::optional<std::string>("2021-08-06"));
  CHECK(s.values[22] == 40.0);

  CHECK(error_of([] { ingest_case_csv(kData / "cases_duplicate.csv", "date", "cases"); }).first ==
        ErrorCode::kNonContiguousDates);
  CHECK(error_of([] { ingest_case_csv(kData / "cases_gap.csv", "date", "cases"); }).first ==
        ErrorCode::kNonContiguousDates);
  CHECK(error_of([] { ingest_case_csv(kData / "empty.csv", "date", "cases"); }).first ==
        ErrorCode::kMissingColumn);
  CHECK(error_of([] { ingest_case_csv(kData / "cases_23.csv", "day", "cases"); }) ==
        std::pair{ErrorCode::kMissingColumn, std::string("day")});
  CHECK(error_of([] { ingest_case_csv(kData / "cases_bad_value.csv", "date", "cases"); }) ==
        std::pair{ErrorCode::kNonNumericValue, std::string("row 2")});
}

TEST_CASE("iso dates") {
  CHECK(parse_iso_date("1970-01-01") == 0L);
  CHECK(parse_iso_date("2021-03-01").value() - parse_iso_date("2021-02-28").value() == 1);
  CHECK(parse_iso_date("2020-03-01").value() - parse_iso_date("2020-02-28").value() == 2);
  CHECK(!parse_iso_date("2021-02-29"));
  CHECK(!parse_iso_date("2021/02/01"));
  CHECK(!parse_iso_date("21-02-01"));
}

TEST_CASE("population run is reproducible and complete") {
  const fs::path out = fs::temp_directory_path() / "sirs_io_test";
  fs::remove_all(out);
  RunConfig cfg = parse_config(minimal(R"(, "t_end": 60, "window": {"t_b": 30, "t_e": 60},
      "extinction": "reseed", "workers": 2)"));
  cfg.seeds = {3, 4};
  cfg.output_dir = (out / "a").string();
  const RunManifest a = run_experiment(cfg);
  cfg.output_dir = (out / "b").string();
  const RunManifest b = run_experiment(cfg);
  REQUIRE(a.ok());
  for (const auto& rec : a.seeds)
    for (const auto& f : rec.files) {
      CAPTURE(f);
      REQUIRE(fs::exists(out / "a" / f));
      CHECK(read_file(out / "a" / f) == read_file(out / "b" / f));
    }
  for (const auto& f : a.summary_files) CHECK(read_file(out / "a" / f) == read_file(out / "b" / f));
  const auto manifest = nlohmann::json::parse(read_file(out / "a" / "manifest.json"));
  CHECK(manifest.at("ok") == true);
  CHECK(manifest.at("version") == kVersion);
  CHECK(manifest.at("seeds").size() == 2);
  CHECK(fs::exists(out / "a" / "population" / "3" / "stats.csv"));
  fs::remove_all(out);
}

TEST_CASE("failed seeds fail the run") {
  const fs::path out = fs::temp_directory_path() / "sirs_io_fail";
  fs::remove_all(out);
  RunConfig cfg = parse_config(minimal(R"(, "t_end": 10, "window": {"t_b": 0, "t_e": 10})"));
  cfg.experiment = Experiment::kCompare;
  cfg.seeds = {1, 2};
  CompareSettings cs;
  cs.obs_csv = (kData / "cases_23.csv").string();
  cs.shift = 30;
  cfg.compare = cs;
  cfg.output_dir = out.string();
  const RunManifest m = run_experiment(cfg);
  CHECK(!m.ok());
  for (const auto& rec : m.seeds) {
    CHECK(!rec.ok);
    CHECK(rec.error.find("NoOverlap") != std::string::npos);
    // The simulated series was written before the comparison failed.
    CHECK(fs::exists(out / "compare" / std::to_string(rec.seed) / "sim_daily.csv"));
  }
  CHECK(fs::exists(out / "manifest.json"));
  fs::remove_all(out);
}
