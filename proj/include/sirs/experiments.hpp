#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "sirs/individual_model.hpp"
#include "sirs/io.hpp"
#include "sirs/network.hpp"
#include "sirs/population_model.hpp"
#include "sirs/stats.hpp"

namespace sirs {

/// Degree classes averaged for the protection-ordering summary.
inline constexpr std::size_t kFig3DegreeLo = 6;
inline constexpr std::size_t kFig3DegreeHi = 16;

struct SeedRecord {
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  /// Paths relative to the output directory.
  std::vector<std::string> files;
  double wall_seconds = 0.0;
  std::map<std::string, double> metrics;
};

struct RunManifest {
  RunConfig config;
  std::string version = kVersion;
  std::vector<SeedRecord> seeds;
  std::vector<std::string> summary_files;
  /// Human-readable notes on anything that needs attention.
  std::vector<std::string> flags;

  bool ok() const;
};

std::string manifest_json(const RunManifest& m);

/// Dispatches on cfg.experiment, fans seeds out over a bounded worker pool,
/// then writes summaries and `<output_dir>/manifest.json`. A failing seed
/// is recorded, the others still run.
RunManifest run_experiment(const RunConfig& cfg);

// Single-seed building blocks. They write nothing.

struct PopulationSeedResult {
  std::array<StationaryStats, 3> stats;
  CountState final_state;
  std::uint64_t events = 0;
  ResampledSeries series;
};

/// Count-level run from cfg.init over [0, cfg.t_end] with the window
/// statistics streamed; `series` is filled at cfg.resample_dt when asked.
PopulationSeedResult simulate_population(const RunConfig& cfg, std::uint64_t seed,
                                         bool keep_series = false);

/// Initial graph for the evolving-network run: WS(ws) with node states drawn
/// from the stationary proportions, at least one node infected.
Network seeded_network(const WsConfig& ws, const EpidemicParams& params, double mean_degree,
                       RandomSource& rs);

struct EvolveSeedResult {
  int k_init = 0;
  DegreeHistogram degrees;
  CoupledResult run;
};

EvolveSeedResult simulate_network_evolve(const RunConfig& cfg, int k_init, std::uint64_t seed,
                                         Network* final_net = nullptr);

struct OracleComparison {
  TruncatedStationary oracle;
  Eigen::Vector3d sim_means = Eigen::Vector3d::Zero();
  Eigen::Vector3d rel_gap = Eigen::Vector3d::Zero();
  /// Total variation between the time-weighted joint occupancy over the
  /// window and the oracle; time spent outside the box counts fully.
  double tv = 0.0;
  double outside_fraction = 0.0;
  std::uint64_t events = 0;
};

OracleComparison compare_with_oracle(const RunConfig& cfg, std::uint64_t seed);

/// Daily samples t = 0, 1, ..., floor(t_end) of a count run whose beta
/// switches at compare.beta_change_time when set.
ResampledSeries simulate_compare_series(const RunConfig& cfg, std::uint64_t seed);

/// Degree histogram and edge list of WS(ws) for each k_init value; returns
/// the files written.
std::vector<std::string> write_network_stats(const RunConfig& cfg, const std::filesystem::path& out);

}  // namespace sirs
