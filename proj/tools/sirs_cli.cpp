#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sirs/experiments.hpp"
#include "sirs/io.hpp"
#include "sirs/similarity.hpp"

namespace {

int report(const sirs::RunManifest& m) {
  std::cout << "manifest: " << (std::filesystem::path(m.config.output_dir) / "manifest.json").string()
            << '\n';
  for (const auto& f : m.flags) std::cout << "flag: " << f << '\n';
  int failed = 0;
  for (const auto& s : m.seeds) failed += !s.ok;
  std::cout << m.seeds.size() - failed << "/" << m.seeds.size() << " seeds ok\n";
  return m.ok() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic SIRS epidemic simulator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", sirs::kVersion);

  std::string config_path, out_dir, seeds_override;
  auto* simulate = app.add_subcommand("simulate", "Run the experiment described by a config file");
  simulate->add_option("--config", config_path, "JSON config")->required()->check(CLI::ExistingFile);
  simulate->add_option("--seeds-override", seeds_override, "Comma-separated seeds");
  simulate->add_option("--out", out_dir, "Output directory");

  std::string sim_csv, obs_csv, sim_column = "i", date_column = "date", value_column = "cases";
  int shift = 0;
  auto* compare = app.add_subcommand("compare", "Similarity of a simulated and an observed series");
  compare->add_option("--sim", sim_csv, "Simulated CSV (t,s,i,r)")->required()->check(CLI::ExistingFile);
  compare->add_option("--obs", obs_csv, "Observed daily CSV")->required()->check(CLI::ExistingFile);
  compare->add_option("--shift", shift, "Delay of the simulated series in days")->required();
  compare->add_option("--sim-column", sim_column, "Column of the simulated CSV");
  compare->add_option("--date-column", date_column, "Date column of the observed CSV");
  compare->add_option("--value-column", value_column, "Value column of the observed CSV");

  int cap = 15;
  auto* oracle = app.add_subcommand("oracle-check", "Truncated-chain oracle against simulation");
  oracle->add_option("--config", config_path, "JSON config")->required()->check(CLI::ExistingFile);
  oracle->add_option("--cap", cap, "Per-component truncation cap")->required();
  oracle->add_option("--out", out_dir, "Output directory");

  bool evolve = false;
  auto* netstats = app.add_subcommand("network-stats", "Degree statistics of the configured graphs");
  netstats->add_option("--config", config_path, "JSON config")->required()->check(CLI::ExistingFile);
  netstats->add_option("--out", out_dir, "Output directory");
  netstats->add_flag("--evolve", evolve, "Run the evolving-network experiment");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*compare) {
      const sirs::CaseSeries sim = sirs::read_series_csv(sim_csv, sim_column);
      const sirs::CaseSeries obs = sirs::ingest_case_csv(obs_csv, date_column, value_column);
      std::cout << sirs::to_json(sirs::compare_series(sim, obs, shift)) << '\n';
      return 0;
    }

    sirs::RunConfig cfg = sirs::load_config(config_path);
    if (!out_dir.empty()) cfg.output_dir = out_dir;

    if (*simulate) {
      if (!seeds_override.empty()) {
        cfg.seeds.clear();
        std::stringstream ss(seeds_override);
        for (std::string tok; std::getline(ss, tok, ',');) {
          try {
            std::size_t used = 0;
            cfg.seeds.push_back(std::stoull(tok, &used));
            if (used != tok.size()) throw std::invalid_argument(tok);
          } catch (const std::exception&) {
            throw sirs::Error(sirs::ErrorCode::kValidationError, "seeds", "bad seed '" + tok + "'");
          }
        }
      }
      return report(sirs::run_experiment(cfg));
    }
    if (*oracle) {
      cfg.experiment = sirs::Experiment::kOracleCheck;
      cfg.oracle_cap = cap;
      return report(sirs::run_experiment(cfg));
    }
    if (*netstats) {
      if (evolve) {
        cfg.experiment = sirs::Experiment::kNetworkEvolve;
        return report(sirs::run_experiment(cfg));
      }
      for (const auto& f : sirs::write_network_stats(cfg, cfg.output_dir)) std::cout << f << '\n';
      return 0;
    }
  } catch (const sirs::Error& e) {
    std::cerr << "error [" << sirs::to_string(e.code()) << "]: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
