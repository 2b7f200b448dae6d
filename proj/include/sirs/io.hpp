#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sirs/core.hpp"
#include "sirs/network.hpp"
#include "sirs/population_model.hpp"
#include "sirs/similarity.hpp"

namespace sirs {

inline constexpr const char* kVersion = "0.3.0";

enum class Experiment { kIndividual, kPopulation, kNetworkEvolve, kOracleCheck, kCompare };

const char* to_string(Experiment e);
Experiment experiment_from_string(const std::string& s);

struct Window {
  double t_b = 3000.0;
  double t_e = 4000.0;
  bool operator==(const Window&) const = default;
};

/// Observed-series comparison settings.
struct CompareSettings {
  std::string obs_csv;
  std::string date_column = "date";
  std::string value_column = "cases";
  int shift = 0;
  /// beta switches to `beta_after` at this time when set.
  std::optional<double> beta_change_time;
  std::optional<double> beta_after;

  bool operator==(const CompareSettings&) const = default;
};

struct RunConfig {
  Experiment experiment = Experiment::kPopulation;
  EpidemicParams params;
  WsConfig ws;
  int m_arrival = 4;
  double mean_degree = 5.0;
  bool live_mean_degree = false;
  double t_end = 4000.0;
  int steps = 1500;
  int burn_in = 500;
  Window window;
  std::vector<std::uint64_t> seeds;
  std::string output_dir = "out";
  double resample_dt = 1.0;
  CountState init{0, 1, 0};
  ExtinctionPolicy extinction = ExtinctionPolicy::kAbsorb;
  /// Individual experiment: protection intensities to compare; empty means
  /// just params.protect_intensity.
  std::vector<double> protect_intensities;
  /// Network-evolve experiment: per-side initial neighbour counts.
  std::vector<int> k_init_values;
  int oracle_cap = 15;
  int bin_width = 1;
  bool write_events = false;
  /// 0 picks the hardware concurrency.
  int workers = 0;
  std::optional<CompareSettings> compare;

  bool operator==(const RunConfig&) const = default;
};

/// Parses JSON text into a validated config. Unknown keys are rejected at
/// every level. Throws kParseError(<line or key>) and kValidationError(<field>).
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

/// Throws kValidationError(<field>) on the first invalid field.
void validate_config(const RunConfig& cfg);

/// Serialises every field; parse_config(write_config(c)) == c.
std::string write_config(const RunConfig& cfg);

/// Reads a daily case series; dates must be ISO yyyy-mm-dd and advance by
/// exactly one day per row.
CaseSeries ingest_case_csv(const std::filesystem::path& path, const std::string& date_column,
                           const std::string& value_column);

/// Reads one numeric column of a headed CSV (e.g. `i` from `t,s,i,r`).
CaseSeries read_series_csv(const std::filesystem::path& path, const std::string& column);

/// Days since 1970-01-01 for an ISO date; nullopt when malformed.
std::optional<long> parse_iso_date(const std::string& s);

void write_text_file(const std::filesystem::path& path, const std::string& text);

enum class LogLevel { kError = 0, kWarn = 1, kInfo = 2, kDebug = 3 };
/// Level from SIRS_LOG (error|warn|info|debug), default warn.
LogLevel log_level();
void log(LogLevel level, const std::string& msg);

}  // namespace sirs
