#include "sirs/population_model.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <ostream>

namespace sirs {

const char* to_string(ExtinctionPolicy p) {
  return p == ExtinctionPolicy::kAbsorb ? "absorb" : "reseed";
}

ExtinctionPolicy extinction_policy_from_string(const std::string& s) {
  if (s == "absorb") return ExtinctionPolicy::kAbsorb;
  if (s == "reseed") return ExtinctionPolicy::kReseed;
  throw Error(ErrorCode::kValidationError, "extinction", "expected absorb or reseed, got " + s);
}

EventRates event_rates(const CountState& x, const EpidemicParams& params, double mean_degree) {
  if (!(mean_degree > 0.0) || !std::isfinite(mean_degree))
    throw Error(ErrorCode::kOutOfRange, "mean_degree", "must be > 0");
  const auto s = static_cast<double>(x.s);
  const auto i = static_cast<double>(x.i);
  const auto r = static_cast<double>(x.r);
  EventRates out;
  out.arrival = params.lambda_in;
  out.infection = s * i * mean_degree * params.beta;
  out.recovery = i * params.gamma;
  out.reflux = params.revive_frac * params.alpha * r;
  out.exit = (1.0 - params.revive_frac) * params.alpha * r;
  return out;
}

CountState apply_event(CountState x, EventKind e, ExtinctionPolicy policy) {
  switch (e) {
    case EventKind::kArrival:
      ++x.s;
      break;
    case EventKind::kInfection:
      --x.s;
      ++x.i;
      break;
    case EventKind::kRecovery:
      if (!(policy == ExtinctionPolicy::kReseed && x.i == 1)) --x.i;
      ++x.r;
      break;
    case EventKind::kReflux:
      --x.r;
      ++x.s;
      break;
    case EventKind::kExit:
      --x.r;
      break;
  }
  return x;
}

bool is_legal_move(const CountState& a, const CountState& b) {
  const auto ds = b.s - a.s, di = b.i - a.i, dr = b.r - a.r;
  const auto l1 = std::abs(ds) + std::abs(di) + std::abs(dr);
  if (l1 == 1) return true;
  if (l1 != 2) return false;
  return (ds == -1 && di == 1) || (di == -1 && dr == 1) || (dr == -1 && ds == 1);
}

CountState CountTrajectory::at(double t) const {
  auto it = std::upper_bound(times.begin(), times.end(), t);
  if (it == times.begin()) return states.front();
  return states[static_cast<std::size_t>(it - times.begin()) - 1];
}

bool CountTrajectory::is_legal() const {
  if (times.size() != states.size() || times.empty()) return false;
  for (std::size_t k = 1; k < times.size(); ++k) {
    if (!(times[k] > times[k - 1])) return false;
    if (!is_legal_move(states[k - 1], states[k])) return false;
  }
  return times.back() <= t_end;
}

CountTrajectory simulate_gillespie(const CountState& init, const EpidemicParams& params,
                                   double mean_degree, double t_end, RandomSource& rs,
                                   const GillespieOptions& opts) {
  if (!(t_end > 0.0)) throw Error(ErrorCode::kOutOfRange, "t_end", "must be > 0");
  CountTrajectory traj;
  traj.t_end = t_end;
  traj.times.push_back(0.0);
  traj.states.push_back(init);
  simulate_counts(init, params, mean_degree, t_end, rs, opts,
                  [&](double t, const CountState& x, EventKind) {
                    traj.times.push_back(t);
                    traj.states.push_back(x);
                  });
  return traj;
}

StationaryExpectation stationary_expectations(const EpidemicParams& params, double mean_degree) {
  validate_params(params);
  auto nonzero = [](double v, const char* name) {
    if (!(v > 0.0)) throw Error(ErrorCode::kDivisionByZero, name);
  };
  nonzero(params.beta, "beta");
  nonzero(mean_degree, "mean_degree");
  nonzero(params.gamma, "gamma");
  nonzero(params.alpha, "alpha");
  const double open = 1.0 - params.revive_frac;
  StationaryExpectation e;
  e.e_s = params.gamma / (params.beta * mean_degree);
  e.e_i = params.lambda_in / (params.gamma * open);
  e.e_r = params.lambda_in / (params.alpha * open);
  return e;
}

Eigen::Vector3d balance_residuals(const EpidemicParams& params, double mean_degree,
                                  const StationaryExpectation& e) {
  const double infection = e.e_s * e.e_i * params.beta * mean_degree;
  return {params.lambda_in + params.revive_frac * params.alpha * e.e_r - infection,
          infection - params.gamma * e.e_i,
          params.gamma * e.e_i - params.alpha * e.e_r};
}

namespace {

constexpr EventKind kAllEvents[] = {EventKind::kArrival, EventKind::kInfection,
                                    EventKind::kRecovery, EventKind::kReflux, EventKind::kExit};

double rate_of(const EventRates& r, EventKind e) {
  switch (e) {
    case EventKind::kArrival: return r.arrival;
    case EventKind::kInfection: return r.infection;
    case EventKind::kRecovery: return r.recovery;
    case EventKind::kReflux: return r.reflux;
    case EventKind::kExit: return r.exit;
  }
  return 0.0;
}

struct Edge {
  std::size_t to;
  double rate;
};

// Number of strongly connected components without outgoing edges
// (closed classes). Iterative Tarjan.
std::size_t count_closed_classes(const std::vector<std::vector<Edge>>& g) {
  const std::size_t n = g.size();
  constexpr std::size_t kUnset = static_cast<std::size_t>(-1);
  std::vector<std::size_t> index(n, kUnset), low(n, 0), comp(n, kUnset);
  std::vector<char> on_stack(n, 0);
  std::vector<std::size_t> stack;
  std::vector<std::pair<std::size_t, std::size_t>> call;  // (node, next edge)
  std::size_t counter = 0, ncomp = 0;

  for (std::size_t root = 0; root < n; ++root) {
    if (index[root] != kUnset) continue;
    call.emplace_back(root, 0);
    while (!call.empty()) {
      auto& [v, e] = call.back();
      if (e == 0 && index[v] == kUnset) {
        index[v] = low[v] = counter++;
        stack.push_back(v);
        on_stack[v] = 1;
      }
      if (e < g[v].size()) {
        const std::size_t w = g[v][e++].to;
        if (index[w] == kUnset) {
          call.emplace_back(w, 0);
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      if (low[v] == index[v]) {
        std::size_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = 0;
          comp[w] = ncomp;
        } while (w != v);
        ++ncomp;
      }
      const std::size_t done = v;
      call.pop_back();
      if (!call.empty()) {
        const std::size_t parent = call.back().first;
        low[parent] = std::min(low[parent], low[done]);
      }
    }
  }

  std::vector<char> leaks(ncomp, 0);
  for (std::size_t v = 0; v < n; ++v)
    for (const Edge& ed : g[v])
      if (comp[ed.to] != comp[v]) leaks[comp[v]] = 1;
  return static_cast<std::size_t>(std::count(leaks.begin(), leaks.end(), 0));
}

}  // namespace

TruncatedStationary solve_truncated_stationary(const EpidemicParams& params, double mean_degree,
                                               int cap, const OracleOptions& opts) {
  validate_params(params);
  if (cap < 1 || cap > 40) throw Error(ErrorCode::kConfigError, "cap", "must lie in [1, 40]");
  auto inside = [cap](const CountState& x) {
    return x.s >= 0 && x.i >= 0 && x.r >= 0 && x.s <= cap && x.i <= cap && x.r <= cap;
  };
  if (!inside(opts.init)) throw Error(ErrorCode::kConfigError, "init", "outside the box");

  TruncatedStationary out;
  out.cap = cap;
  const std::size_t box = static_cast<std::size_t>(cap + 1) * (cap + 1) * (cap + 1);
  auto box_index = [&](const CountState& x) {
    return out.index(static_cast<int>(x.s), static_cast<int>(x.i), static_cast<int>(x.r));
  };

  // Breadth-first reachability from init; compact ids in discovery order.
  constexpr std::size_t kUnset = static_cast<std::size_t>(-1);
  std::vector<std::size_t> compact(box, kUnset);
  std::vector<CountState> states{opts.init};
  std::vector<std::vector<Edge>> graph;
  compact[box_index(opts.init)] = 0;
  for (std::size_t head = 0; head < states.size(); ++head) {
    const CountState x = states[head];
    const EventRates r = event_rates(x, params, mean_degree);
    std::vector<Edge> edges;
    for (EventKind e : kAllEvents) {
      const double rate = rate_of(r, e);
      if (!(rate > 0.0)) continue;
      const CountState y = apply_event(x, e, opts.extinction);
      if (!inside(y) || y == x) continue;
      std::size_t& slot = compact[box_index(y)];
      if (slot == kUnset) {
        slot = states.size();
        states.push_back(y);
      }
      edges.push_back({slot, rate});
    }
    graph.push_back(std::move(edges));
  }
  const std::size_t n = states.size();
  out.reachable_states = n;

  if (count_closed_classes(graph) != 1)
    throw Error(ErrorCode::kSingularSystem, "closed_classes",
                "reachable chain has more than one closed class");

  // Q^T with the last equation replaced by the normalisation row.
  std::vector<Eigen::Triplet<double>> trip;
  for (std::size_t x = 0; x < n; ++x) {
    double out_rate = 0.0;
    for (const Edge& e : graph[x]) {
      out_rate += e.rate;
      if (e.to != n - 1) trip.emplace_back(static_cast<int>(e.to), static_cast<int>(x), e.rate);
    }
    if (x != n - 1) trip.emplace_back(static_cast<int>(x), static_cast<int>(x), -out_rate);
  }
  for (std::size_t x = 0; x < n; ++x)
    trip.emplace_back(static_cast<int>(n - 1), static_cast<int>(x), 1.0);
  Eigen::SparseMatrix<double> a(static_cast<int>(n), static_cast<int>(n));
  a.setFromTriplets(trip.begin(), trip.end());
  a.makeCompressed();

  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<int>(n));
  rhs[static_cast<int>(n - 1)] = 1.0;
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  lu.compute(a);
  if (lu.info() != Eigen::Success)
    throw Error(ErrorCode::kSingularSystem, "generator", lu.lastErrorMessage());
  const Eigen::VectorXd pi = lu.solve(rhs);
  if (lu.info() != Eigen::Success || !pi.allFinite())
    throw Error(ErrorCode::kSingularSystem, "generator", "solve failed");

  // Net flux per state, from the unmodified generator.
  Eigen::VectorXd flux = Eigen::VectorXd::Zero(static_cast<int>(n));
  for (std::size_t x = 0; x < n; ++x)
    for (const Edge& e : graph[x]) {
      flux[static_cast<int>(x)] -= pi[static_cast<int>(x)] * e.rate;
      flux[static_cast<int>(e.to)] += pi[static_cast<int>(x)] * e.rate;
    }
  out.balance_residual = flux.cwiseAbs().maxCoeff();

  out.prob = Eigen::VectorXd::Zero(static_cast<int>(box));
  for (std::size_t x = 0; x < n; ++x) {
    const double p = pi[static_cast<int>(x)];
    const CountState& st = states[x];
    out.prob[static_cast<int>(box_index(st))] = p;
    out.means += p * Eigen::Vector3d(st.s, st.i, st.r);
    if (st.s == cap || st.i == cap || st.r == cap) out.boundary_mass += p;
  }
  return out;
}

ResampledSeries resample(const CountTrajectory& traj, double dt) {
  if (!(dt > 0.0)) throw Error(ErrorCode::kOutOfRange, "resample_dt", "must be > 0");
  ResampledSeries out;
  std::size_t k = 0;
  for (std::size_t step = 0;; ++step) {
    const double t = static_cast<double>(step) * dt;
    if (t > traj.t_end) break;
    while (k + 1 < traj.times.size() && traj.times[k + 1] <= t) ++k;
    out.t.push_back(t);
    out.states.push_back(traj.states[k]);
  }
  return out;
}

void write_trajectory_csv(std::ostream& os, const CountTrajectory& traj) {
  os << "time,s,i,r\n";
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const auto& x = traj.states[k];
    os << format_double(traj.times[k]) << ',' << x.s << ',' << x.i << ',' << x.r << '\n';
  }
}

void write_resampled_csv(std::ostream& os, const ResampledSeries& series) {
  os << "t,s,i,r\n";
  for (std::size_t k = 0; k < series.t.size(); ++k) {
    const auto& x = series.states[k];
    os << format_double(series.t[k]) << ',' << x.s << ',' << x.i << ',' << x.r << '\n';
  }
}

void write_oracle_csv(std::ostream& os, const TruncatedStationary& pi) {
  os << "s,i,r,prob\n";
  for (int s = 0; s <= pi.cap; ++s)
    for (int i = 0; i <= pi.cap; ++i)
      for (int r = 0; r <= pi.cap; ++r) {
        const double p = pi.at(s, i, r);
        if (p != 0.0) os << s << ',' << i << ',' << r << ',' << format_double(p) << '\n';
      }
}

namespace {

// Members of one epidemic state with O(1) uniform pick and removal.
class StateBucket {
 public:
  void insert(NodeId id, std::vector<std::size_t>& pos) {
    if (pos.size() <= id) pos.resize(id + 1);
    pos[id] = ids_.size();
    ids_.push_back(id);
  }
  void erase(NodeId id, std::vector<std::size_t>& pos) {
    const std::size_t k = pos[id];
    ids_[k] = ids_.back();
    pos[ids_[k]] = k;
    ids_.pop_back();
  }
  NodeId pick(RandomSource& rs) const { return ids_[rs.uniform_index(ids_.size())]; }
  std::size_t size() const { return ids_.size(); }

 private:
  std::vector<NodeId> ids_;
};

}  // namespace

CoupledResult simulate_coupled(Network& net, const EpidemicParams& params, double mean_degree,
                               double t_end, RandomSource& rs, const CoupledOptions& opts) {
  validate_params(params);
  if (!(t_end > 0.0)) throw Error(ErrorCode::kOutOfRange, "t_end", "must be > 0");
  if (!opts.live_mean_degree && !(mean_degree > 0.0))
    throw Error(ErrorCode::kOutOfRange, "mean_degree", "must be > 0");

  std::vector<std::size_t> pos;
  StateBucket bucket[3];
  for (std::size_t s = 0; s < net.node_count(); ++s) {
    const NodeId id = net.node_at(s);
    bucket[index_of(net.state(id))].insert(id, pos);
  }
  auto counts = [&] {
    return CountState{static_cast<std::int64_t>(bucket[0].size()),
                      static_cast<std::int64_t>(bucket[1].size()),
                      static_cast<std::int64_t>(bucket[2].size())};
  };
  auto move = [&](NodeId id, NodeState from, NodeState to) {
    bucket[index_of(from)].erase(id, pos);
    bucket[index_of(to)].insert(id, pos);
    net.set_state(id, to);
  };
  auto live_k = [&] {
    return net.node_count() ? 2.0 * static_cast<double>(net.edge_count()) / net.node_count() : 0.0;
  };

  CoupledResult res;
  double next_sample = 0.0;
  auto record_until = [&](double t) {
    if (!(opts.sample_dt > 0.0)) return;
    while (next_sample <= t && next_sample <= t_end) {
      res.series.t.push_back(next_sample);
      res.series.states.push_back(counts());
      res.mean_degree_series.push_back(live_k());
      next_sample += opts.sample_dt;
    }
  };

  double t = 0.0;
  for (;;) {
    const double k = opts.live_mean_degree ? live_k() : mean_degree;
    EventRates r = event_rates(counts(), params, k > 0.0 ? k : 1.0);
    if (!(k > 0.0)) r.infection = 0.0;
    const double total = r.total();
    if (!(total > 0.0)) break;
    const double t_next = t + rs.exponential(total);
    if (t_next > t_end) break;
    record_until(t_next);
    t = t_next;

    const double w[5] = {r.infection, r.recovery, r.reflux, r.arrival, r.exit};
    const double pick = rs.uniform() * total;
    int kind = 0;
    for (double acc = w[0]; kind < 4 && !(pick < acc);) acc += w[++kind];
    while (w[kind] == 0.0) --kind;

    switch (kind) {
      case 0:
        move(bucket[0].pick(rs), NodeState::kSusceptible, NodeState::kInfected);
        break;
      case 1:
        move(bucket[1].pick(rs), NodeState::kInfected, NodeState::kRecovered);
        if (opts.extinction == ExtinctionPolicy::kReseed && bucket[1].size() == 0) {
          const NodeId id = node_arrival(net, opts.m_arrival, rs, params.protect_intensity);
          net.set_state(id, NodeState::kInfected);
          bucket[1].insert(id, pos);
          ++res.arrivals;
        }
        break;
      case 2:
        move(bucket[2].pick(rs), NodeState::kRecovered, NodeState::kSusceptible);
        break;
      case 3: {
        const NodeId id = node_arrival(net, opts.m_arrival, rs, params.protect_intensity);
        bucket[0].insert(id, pos);
        ++res.arrivals;
        break;
      }
      default: {
        const NodeId id = bucket[2].pick(rs);
        bucket[2].erase(id, pos);
        node_departure(net, id);
        ++res.departures;
        break;
      }
    }
    ++res.events;
  }
  record_until(t_end);
  res.final_state = counts();
  return res;
}

}  // namespace sirs
