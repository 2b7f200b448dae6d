#include "sirs/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "sirs/similarity.hpp"

namespace sirs {

namespace fs = std::filesystem;

bool RunManifest::ok() const {
  return !seeds.empty() &&
         std::all_of(seeds.begin(), seeds.end(), [](const SeedRecord& r) { return r.ok; });
}

namespace {

constexpr NodeState kComponents[3] = {NodeState::kSusceptible, NodeState::kInfected,
                                      NodeState::kRecovered};

double nan() { return std::numeric_limits<double>::quiet_NaN(); }

nlohmann::ordered_json metrics_json(const std::map<std::string, double>& m) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& [k, v] : m) {
    if (std::isfinite(v))
      j[k] = v;
    else
      j[k] = nullptr;
  }
  return j;
}

// Writes a file under the run directory and remembers its relative path.
class OutputDir {
 public:
  OutputDir(fs::path root, fs::path rel) : root_(std::move(root)), rel_(std::move(rel)) {}

  template <typename Fn>
  void write(const std::string& name, std::vector<std::string>& files, Fn&& fn) const {
    std::ostringstream os;
    fn(os);
    write_text_file(root_ / rel_ / name, os.str());
    files.push_back((rel_ / name).generic_string());
  }

 private:
  fs::path root_, rel_;
};

std::string mu_tag(double mu) { return "mu" + format_double(mu); }

std::vector<double> intensities(const RunConfig& cfg) {
  if (!cfg.protect_intensities.empty()) return cfg.protect_intensities;
  return {cfg.params.protect_intensity};
}

std::vector<int> k_values(const RunConfig& cfg) {
  if (!cfg.k_init_values.empty()) return cfg.k_init_values;
  return {cfg.ws.k_init};
}

// ---- per-seed jobs -------------------------------------------------------

struct SeedPayload {
  std::array<StationaryStats, 3> window;  // population
  std::vector<EvolveSeedResult> evolve;   // network-evolve
};

void population_job(const RunConfig& cfg, std::uint64_t seed, const OutputDir& dir,
                    SeedRecord& rec, SeedPayload& payload) {
  PopulationSeedResult res = simulate_population(cfg, seed, true);
  payload.window = res.stats;
  dir.write("series.csv", rec.files, [&](std::ostream& os) { write_resampled_csv(os, res.series); });
  std::optional<StationaryExpectation> theory;
  try {
    theory = stationary_expectations(cfg.params, cfg.mean_degree);
  } catch (const Error&) {
  }
  dir.write("stats.csv", rec.files, [&](std::ostream& os) {
    write_stats_header(os);
    for (NodeState c : kComponents)
      write_stats_row(os, c, res.stats[index_of(c)], theory ? theory->get(c) : nan());
  });
  for (NodeState c : kComponents) {
    const std::string name = component_name(c);
    const auto& st = res.stats[index_of(c)];
    rec.metrics["mean_" + name] = st.mean;
    rec.metrics["std_tw_" + name] = st.std_timeweighted;
    rec.metrics["std_paper_" + name] = st.std_paper;
    if (theory) rec.metrics["rel_err_" + name] = relative_error(st.mean, theory->get(c));
  }
  rec.metrics["events"] = static_cast<double>(res.events);
}

void individual_job(const RunConfig& cfg, std::uint64_t seed, const OutputDir& dir,
                    SeedRecord& rec) {
  for (double mu : intensities(cfg)) {
    EpidemicParams p = cfg.params;
    p.protect_intensity = mu;
    // Same seed for every intensity: identical graph, only protection differs.
    RandomSource rs(seed);
    const DegreeClassStats st = run_fig3_experiment(cfg.ws, p, cfg.steps, cfg.burn_in, rs);
    const std::string tag = mu_tag(mu);
    dir.write("degree_stats_" + tag + ".csv", rec.files,
              [&](std::ostream& os) { write_degree_class_csv(os, st); });
    dir.write("density_" + tag + ".csv", rec.files, [&](std::ostream& os) {
      os << "step,infected_density\n";
      for (std::size_t k = 0; k < st.infected_density.size(); ++k)
        os << k << ',' << format_double(st.infected_density[k]) << '\n';
    });
    rec.metrics["mean_freq_" + tag] = st.mean_frequency(kFig3DegreeLo, kFig3DegreeHi);
    std::vector<double> deg(st.node_degree.begin(), st.node_degree.end());
    double rho = nan();
    try {
      rho = spearman(deg, st.node_frequency);
    } catch (const Error&) {
    }
    rec.metrics["spearman_" + tag] = rho;
    rec.metrics["valid_neighbors_measured_" + tag] = st.measured_valid_neighbors;
    rec.metrics["valid_neighbors_mean_field_" + tag] = st.mean_field_valid_neighbors;
  }
}

void evolve_job(const RunConfig& cfg, std::uint64_t seed, const OutputDir& dir, SeedRecord& rec,
                SeedPayload& payload) {
  for (int k : k_values(cfg)) {
    Network net;
    EvolveSeedResult res = simulate_network_evolve(cfg, k, seed, &net);
    const std::string tag = "k" + std::to_string(k);
    dir.write("degree_hist_" + tag + ".csv", rec.files,
              [&](std::ostream& os) { write_degree_histogram_csv(os, res.degrees); });
    dir.write("edges_" + tag + ".csv", rec.files, [&](std::ostream& os) { write_edge_list_csv(os, net); });
    dir.write("series_" + tag + ".csv", rec.files, [&](std::ostream& os) {
      os << "t,s,i,r,mean_degree\n";
      const auto& s = res.run.series;
      for (std::size_t j = 0; j < s.t.size(); ++j)
        os << format_double(s.t[j]) << ',' << s.states[j].s << ',' << s.states[j].i << ','
           << s.states[j].r << ',' << format_double(res.run.mean_degree_series[j]) << '\n';
    });
    rec.metrics["mean_degree_" + tag] = res.degrees.mean_degree;
    rec.metrics["nodes_" + tag] = static_cast<double>(res.degrees.total());
    payload.evolve.push_back(std::move(res));
  }
  dir.write("two_sample_tests.csv", rec.files, [&](std::ostream& os) {
    os << "k_a,k_b,statistic,dof,p_value,reject_1pct\n";
    const auto& ev = payload.evolve;
    for (std::size_t a = 0; a < ev.size(); ++a)
      for (std::size_t b = a + 1; b < ev.size(); ++b) {
        const ChiSquareResult t = chi_square_two_sample(ev[a].degrees.counts, ev[b].degrees.counts);
        os << ev[a].k_init << ',' << ev[b].k_init << ',' << format_double(t.statistic) << ','
           << t.dof << ',' << format_double(t.p_value) << ',' << (t.p_value < 0.01) << '\n';
        rec.metrics["p_value_k" + std::to_string(ev[a].k_init) + "_k" +
                    std::to_string(ev[b].k_init)] = t.p_value;
      }
  });
}

void oracle_job(const RunConfig& cfg, std::uint64_t seed, const OutputDir& dir, SeedRecord& rec) {
  const OracleComparison cmp = compare_with_oracle(cfg, seed);
  dir.write("oracle.csv", rec.files, [&](std::ostream& os) { write_oracle_csv(os, cmp.oracle); });
  dir.write("oracle_report.csv", rec.files, [&](std::ostream& os) {
    os << "component,oracle_mean,sim_mean,rel_gap\n";
    for (NodeState c : kComponents) {
      const int j = index_of(c);
      os << component_name(c) << ',' << format_double(cmp.oracle.means[j]) << ','
         << format_double(cmp.sim_means[j]) << ',' << format_double(cmp.rel_gap[j]) << '\n';
    }
  });
  for (NodeState c : kComponents)
    rec.metrics[std::string("rel_gap_") + component_name(c)] = cmp.rel_gap[index_of(c)];
  rec.metrics["tv"] = cmp.tv;
  rec.metrics["outside_fraction"] = cmp.outside_fraction;
  rec.metrics["boundary_mass"] = cmp.oracle.boundary_mass;
  rec.metrics["balance_residual"] = cmp.oracle.balance_residual;
}

void compare_job(const RunConfig& cfg, std::uint64_t seed, const OutputDir& dir, SeedRecord& rec,
                 const std::optional<CaseSeries>& obs) {
  const ResampledSeries sim = simulate_compare_series(cfg, seed);
  dir.write("sim_daily.csv", rec.files, [&](std::ostream& os) { write_resampled_csv(os, sim); });
  if (!obs) return;
  Eigen::VectorXd inf(static_cast<Eigen::Index>(sim.states.size()));
  for (std::size_t k = 0; k < sim.states.size(); ++k)
    inf[static_cast<Eigen::Index>(k)] = static_cast<double>(sim.states[k].i);
  const SimilarityReport r = compare_series(CaseSeries(inf), *obs, cfg.compare->shift);
  dir.write("metrics.json", rec.files, [&](std::ostream& os) { os << to_json(r) << '\n'; });
  rec.metrics["pearson"] = r.pearson;
  rec.metrics["cosine"] = r.cosine;
  rec.metrics["cort"] = r.cort;
}

// ---- summaries -----------------------------------------------------------

double mean_of(const std::vector<SeedRecord>& recs, const std::string& key) {
  double sum = 0.0;
  int n = 0;
  for (const auto& r : recs) {
    auto it = r.metrics.find(key);
    if (r.ok && it != r.metrics.end() && std::isfinite(it->second)) {
      sum += it->second;
      ++n;
    }
  }
  return n ? sum / n : nan();
}

void population_summary(const RunConfig& cfg, const std::vector<SeedRecord>& recs,
                        const std::vector<SeedPayload>& payloads, const OutputDir& dir,
                        RunManifest& m) {
  std::optional<StationaryExpectation> theory;
  try {
    theory = stationary_expectations(cfg.params, cfg.mean_degree);
  } catch (const Error& e) {
    m.flags.push_back(std::string("no closed-form expectations: ") + e.what());
  }
  dir.write("summary.csv", m.summary_files, [&](std::ostream& os) {
    os << "component,theory,mean,rel_err,std_tw,std_paper,seeds\n";
    for (NodeState c : kComponents) {
      const std::string name = component_name(c);
      const double mean = mean_of(recs, "mean_" + name);
      const double th = theory ? theory->get(c) : nan();
      int n = 0;
      for (const auto& r : recs) n += r.ok;
      os << name << ',' << format_double(th) << ',' << format_double(mean) << ','
         << format_double(theory ? relative_error(mean, th) : nan()) << ','
         << format_double(mean_of(recs, "std_tw_" + name)) << ','
         << format_double(mean_of(recs, "std_paper_" + name)) << ',' << n << '\n';
    }
  });
  for (NodeState c : kComponents) {
    std::vector<StationaryStats> windows;
    for (std::size_t k = 0; k < recs.size(); ++k)
      if (recs[k].ok) windows.push_back(payloads[k].window[index_of(c)]);
    if (windows.empty()) continue;
    const CountDistribution d = count_distribution(windows, cfg.bin_width);
    dir.write(std::string("distribution_") + component_name(c) + ".csv", m.summary_files,
              [&](std::ostream& os) { write_distribution_csv(os, d); });
  }
}

void individual_summary(const RunConfig& cfg, const std::vector<SeedRecord>& recs,
                        const OutputDir& dir, RunManifest& m) {
  const auto mus = intensities(cfg);
  dir.write("summary.csv", m.summary_files, [&](std::ostream& os) {
    os << "seed";
    for (double mu : mus) os << ",mean_freq_" << mu_tag(mu) << ",spearman_" << mu_tag(mu);
    os << ",ordered\n";
    for (const auto& r : recs) {
      if (!r.ok) continue;
      os << r.seed;
      bool ordered = true;
      double prev = std::numeric_limits<double>::infinity();
      for (double mu : mus) {
        const double f = r.metrics.at("mean_freq_" + mu_tag(mu));
        os << ',' << format_double(f) << ',' << format_double(r.metrics.at("spearman_" + mu_tag(mu)));
        ordered = ordered && f < prev;
        prev = f;
      }
      os << ',' << ordered << '\n';
    }
  });
  nlohmann::ordered_json meta;
  meta["ws_k_init_convention"] = "neighbours per side; initial degree 2*k_init";
  meta["ws"] = {{"n0", cfg.ws.n0}, {"k_init", cfg.ws.k_init}, {"rewire_prob", cfg.ws.rewire_prob}};
  meta["degree_range"] = {kFig3DegreeLo, kFig3DegreeHi};
  meta["steps"] = cfg.steps;
  meta["burn_in"] = cfg.burn_in;
  dir.write("metadata.json", m.summary_files, [&](std::ostream& os) { os << meta.dump(2) << '\n'; });
}

void evolve_summary(const RunConfig& cfg, const std::vector<SeedRecord>& recs, const OutputDir& dir,
                    RunManifest& m) {
  const auto ks = k_values(cfg);
  dir.write("summary.csv", m.summary_files, [&](std::ostream& os) {
    os << "seed,k_init,nodes,mean_degree\n";
    for (const auto& r : recs) {
      if (!r.ok) continue;
      for (int k : ks) {
        const std::string tag = "k" + std::to_string(k);
        const double md = r.metrics.at("mean_degree_" + tag);
        os << r.seed << ',' << k << ',' << r.metrics.at("nodes_" + tag) << ',' << format_double(md)
           << '\n';
        if (md < 4.0 || md > 6.0)
          m.flags.push_back("seed " + std::to_string(r.seed) + " k_init " + std::to_string(k) +
                            ": stationary mean degree " + format_double(md) +
                            " outside 5 +/- 1 (uniform departures drive it towards 2*m/2 = m)");
      }
    }
  });
  for (const auto& r : recs)
    for (const auto& [key, v] : r.metrics)
      if (key.rfind("p_value_", 0) == 0 && v < 0.01)
        m.flags.push_back("seed " + std::to_string(r.seed) + " " + key + " = " + format_double(v) +
                          " rejects identity at 1%");
}

void oracle_summary(const std::vector<SeedRecord>& recs, const OutputDir& dir, RunManifest& m) {
  dir.write("summary.csv", m.summary_files, [&](std::ostream& os) {
    os << "seed,rel_gap_S,rel_gap_I,rel_gap_R,tv,boundary_mass,balance_residual\n";
    for (const auto& r : recs) {
      if (!r.ok) continue;
      os << r.seed;
      for (const char* k : {"rel_gap_S", "rel_gap_I", "rel_gap_R", "tv", "boundary_mass",
                            "balance_residual"})
        os << ',' << format_double(r.metrics.at(k));
      os << '\n';
      if (r.metrics.at("boundary_mass") > 1e-6)
        m.flags.push_back("seed " + std::to_string(r.seed) + ": oracle boundary mass " +
                          format_double(r.metrics.at("boundary_mass")) + " > 1e-6; raise the cap");
    }
  });
}

void compare_summary(const std::vector<SeedRecord>& recs, const OutputDir& dir, RunManifest& m) {
  if (std::none_of(recs.begin(), recs.end(), [](const SeedRecord& r) { return r.metrics.count("pearson"); }))
    return;
  nlohmann::ordered_json j;
  for (const char* k : {"pearson", "cosine", "cort"}) j[k] = mean_of(recs, k);
  dir.write("metrics_mean.json", m.summary_files, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
}

}  // namespace

// ---- building blocks -----------------------------------------------------

PopulationSeedResult simulate_population(const RunConfig& cfg, std::uint64_t seed, bool keep_series) {
  RandomSource rs(seed);
  WindowAccumulator acc(cfg.window.t_b, cfg.window.t_e);
  acc.start(0.0, cfg.init);
  PopulationSeedResult res;
  CountState cur = cfg.init;
  double next_sample = 0.0;
  auto sample_until = [&](double t) {
    while (keep_series && next_sample <= t && next_sample <= cfg.t_end) {
      res.series.t.push_back(next_sample);
      res.series.states.push_back(cur);
      // Integer multiples avoid drift from repeated addition.
      next_sample = cfg.resample_dt * static_cast<double>(res.series.t.size());
    }
  };
  GillespieOptions opts{cfg.extinction};
  res.final_state = simulate_counts(cfg.init, cfg.params, cfg.mean_degree, cfg.t_end, rs, opts,
                                    [&](double t, const CountState& x, EventKind) {
                                      sample_until(std::nextafter(t, 0.0));
                                      cur = x;
                                      if (t <= cfg.window.t_e) acc.observe(t, x);
                                      ++res.events;
                                    });
  sample_until(cfg.t_end);
  acc.finish();
  for (NodeState c : kComponents) res.stats[index_of(c)] = acc.stats(c);
  return res;
}

Network seeded_network(const WsConfig& ws, const EpidemicParams& params, double mean_degree,
                       RandomSource& rs) {
  Network net = generate_ws(ws, rs);
  double w[3] = {0.0, 1.0, 0.0};
  try {
    const StationaryExpectation e = stationary_expectations(params, mean_degree);
    w[0] = e.e_s;
    w[1] = e.e_i;
    w[2] = e.e_r;
  } catch (const Error&) {
  }
  const double total = w[0] + w[1] + w[2];
  std::size_t infected = 0;
  for (std::size_t s = 0; s < net.node_count(); ++s) {
    const double u = rs.uniform() * total;
    const NodeState st = u < w[0] ? NodeState::kSusceptible
                         : u < w[0] + w[1] ? NodeState::kInfected
                                           : NodeState::kRecovered;
    net.set_state(net.node_at(s), st);
    net.set_protection(net.node_at(s),
                       static_cast<std::uint32_t>(sample_poisson(rs, params.protect_intensity)));
    infected += st == NodeState::kInfected;
  }
  if (!infected && net.node_count())
    net.set_state(net.node_at(rs.uniform_index(net.node_count())), NodeState::kInfected);
  return net;
}

EvolveSeedResult simulate_network_evolve(const RunConfig& cfg, int k_init, std::uint64_t seed,
                                         Network* final_net) {
  WsConfig ws = cfg.ws;
  ws.k_init = k_init;
  RandomSource rs(mix_seed(seed ^ mix_seed(static_cast<std::uint64_t>(k_init))));
  Network net = seeded_network(ws, cfg.params, cfg.mean_degree, rs);
  CoupledOptions opts;
  opts.m_arrival = cfg.m_arrival;
  opts.live_mean_degree = cfg.live_mean_degree;
  opts.extinction = cfg.extinction;
  opts.sample_dt = cfg.resample_dt;
  EvolveSeedResult res;
  res.k_init = k_init;
  res.run = simulate_coupled(net, cfg.params, cfg.mean_degree, cfg.t_end, rs, opts);
  res.degrees = degree_histogram(net);
  if (final_net) *final_net = std::move(net);
  return res;
}

OracleComparison compare_with_oracle(const RunConfig& cfg, std::uint64_t seed) {
  OracleComparison out;
  OracleOptions oo;
  oo.init = cfg.init;
  oo.extinction = cfg.extinction;
  out.oracle = solve_truncated_stationary(cfg.params, cfg.mean_degree, cfg.oracle_cap, oo);

  const int cap = cfg.oracle_cap;
  const double t_b = cfg.window.t_b, t_e = cfg.window.t_e;
  Eigen::VectorXd dwell = Eigen::VectorXd::Zero(out.oracle.prob.size());
  double outside = 0.0;
  Eigen::Vector3d weighted = Eigen::Vector3d::Zero();
  CountState last = cfg.init;
  double last_t = 0.0;
  auto credit = [&](double until) {
    const double lo = std::max(last_t, t_b), hi = std::min(until, t_e);
    if (hi <= lo) return;
    weighted += Eigen::Vector3d(last.s, last.i, last.r) * (hi - lo);
    if (last.s <= cap && last.i <= cap && last.r <= cap)
      dwell[out.oracle.index(last.s, last.i, last.r)] += hi - lo;
    else
      outside += hi - lo;
  };
  RandomSource rs(seed);
  simulate_counts(cfg.init, cfg.params, cfg.mean_degree, cfg.t_end, rs,
                  GillespieOptions{cfg.extinction}, [&](double t, const CountState& x, EventKind) {
                    credit(t);
                    last = x;
                    last_t = t;
                    ++out.events;
                  });
  credit(t_e);
  const double span = t_e - t_b;
  out.sim_means = weighted / span;
  for (int c = 0; c < 3; ++c)
    out.rel_gap[c] = out.oracle.means[c] != 0.0
                         ? std::abs(out.sim_means[c] - out.oracle.means[c]) / std::abs(out.oracle.means[c])
                         : std::abs(out.sim_means[c]);
  out.outside_fraction = outside / span;
  out.tv = 0.5 * ((dwell / span - out.oracle.prob).cwiseAbs().sum() + out.outside_fraction);
  return out;
}

ResampledSeries simulate_compare_series(const RunConfig& cfg, std::uint64_t seed) {
  RandomSource rs(seed);
  GillespieOptions opts{cfg.extinction};
  ResampledSeries out;
  CountState cur = cfg.init;
  double next_day = 0.0;
  auto sample_until = [&](double t) {
    while (next_day <= t && next_day <= cfg.t_end) {
      out.t.push_back(next_day);
      out.states.push_back(cur);
      next_day += 1.0;
    }
  };
  auto run_segment = [&](const EpidemicParams& p, double t0, double t1) {
    if (t1 <= t0) return;
    cur = simulate_counts(cur, p, cfg.mean_degree, t1 - t0, rs, opts,
                          [&](double t, const CountState& x, EventKind) {
                            sample_until(std::nextafter(t0 + t, 0.0));
                            cur = x;
                          });
    sample_until(t1);
  };
  const auto& cs = cfg.compare;
  if (cs && cs->beta_change_time && *cs->beta_change_time < cfg.t_end) {
    const double tc = std::max(0.0, *cs->beta_change_time);
    EpidemicParams after = cfg.params;
    after.beta = *cs->beta_after;
    run_segment(cfg.params, 0.0, tc);
    run_segment(after, tc, cfg.t_end);
  } else {
    run_segment(cfg.params, 0.0, cfg.t_end);
  }
  return out;
}

std::vector<std::string> write_network_stats(const RunConfig& cfg, const fs::path& out) {
  std::vector<std::string> files;
  const std::uint64_t seed = cfg.seeds.empty() ? 0 : cfg.seeds.front();
  OutputDir dir(out, "network-stats");
  for (int k : k_values(cfg)) {
    WsConfig ws = cfg.ws;
    ws.k_init = k;
    RandomSource rs(seed);
    const Network net = generate_ws(ws, rs);
    const DegreeHistogram h = degree_histogram(net);
    const std::string tag = "k" + std::to_string(k);
    dir.write("degree_hist_" + tag + ".csv", files,
              [&](std::ostream& os) { write_degree_histogram_csv(os, h); });
    dir.write("edges_" + tag + ".csv", files, [&](std::ostream& os) { write_edge_list_csv(os, net); });
  }
  return files;
}

// ---- orchestration -------------------------------------------------------

std::string manifest_json(const RunManifest& m) {
  nlohmann::ordered_json j;
  j["version"] = m.version;
  j["experiment"] = to_string(m.config.experiment);
  j["ok"] = m.ok();
  j["config"] = nlohmann::ordered_json::parse(write_config(m.config));
  j["seeds"] = nlohmann::ordered_json::array();
  for (const auto& r : m.seeds) {
    nlohmann::ordered_json s;
    s["seed"] = r.seed;
    s["ok"] = r.ok;
    if (!r.ok) s["error"] = r.error;
    s["files"] = r.files;
    s["wall_seconds"] = r.wall_seconds;
    s["metrics"] = metrics_json(r.metrics);
    j["seeds"].push_back(s);
  }
  j["summary_files"] = m.summary_files;
  j["flags"] = m.flags;
  return j.dump(2) + "\n";
}

RunManifest run_experiment(const RunConfig& cfg) {
  validate_config(cfg);
  RunManifest m;
  m.config = cfg;
  const fs::path root = cfg.output_dir;
  const fs::path exp_dir = to_string(cfg.experiment);

  std::optional<CaseSeries> obs;
  if (cfg.experiment == Experiment::kCompare) {
    if (!cfg.compare) throw Error(ErrorCode::kValidationError, "compare", "missing compare section");
    if (!cfg.compare->obs_csv.empty())
      obs = ingest_case_csv(cfg.compare->obs_csv, cfg.compare->date_column, cfg.compare->value_column);
  }

  const std::size_t n = cfg.seeds.size();
  m.seeds.resize(n);
  std::vector<SeedPayload> payloads(n);
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t k; (k = next.fetch_add(1)) < n;) {
      SeedRecord& rec = m.seeds[k];
      rec.seed = cfg.seeds[k];
      const OutputDir dir(root, exp_dir / std::to_string(rec.seed));
      const auto t0 = std::chrono::steady_clock::now();
      try {
        switch (cfg.experiment) {
          case Experiment::kPopulation: population_job(cfg, rec.seed, dir, rec, payloads[k]); break;
          case Experiment::kIndividual: individual_job(cfg, rec.seed, dir, rec); break;
          case Experiment::kNetworkEvolve: evolve_job(cfg, rec.seed, dir, rec, payloads[k]); break;
          case Experiment::kOracleCheck: oracle_job(cfg, rec.seed, dir, rec); break;
          case Experiment::kCompare: compare_job(cfg, rec.seed, dir, rec, obs); break;
        }
        rec.ok = true;
      } catch (const std::exception& e) {
        rec.ok = false;
        rec.error = e.what();
        log(LogLevel::kError, "seed " + std::to_string(rec.seed) + ": " + e.what());
      }
      rec.wall_seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      log(LogLevel::kInfo, "seed " + std::to_string(rec.seed) + " done");
    }
  };

  std::size_t workers = cfg.workers > 0 ? static_cast<std::size_t>(cfg.workers)
                                        : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, n);
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  const OutputDir dir(root, exp_dir);
  switch (cfg.experiment) {
    case Experiment::kPopulation: population_summary(cfg, m.seeds, payloads, dir, m); break;
    case Experiment::kIndividual: individual_summary(cfg, m.seeds, dir, m); break;
    case Experiment::kNetworkEvolve: evolve_summary(cfg, m.seeds, dir, m); break;
    case Experiment::kOracleCheck: oracle_summary(m.seeds, dir, m); break;
    case Experiment::kCompare: compare_summary(m.seeds, dir, m); break;
  }
  for (const auto& r : m.seeds)
    if (!r.ok) m.flags.push_back("seed " + std::to_string(r.seed) + " failed; outputs partial");
  write_text_file(root / "manifest.json", manifest_json(m));
  return m;
}

}  // namespace sirs
