#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "sirs/core.hpp"
#include "sirs/network.hpp"

namespace sirs {

struct CountState {
  std::int64_t s = 0;
  std::int64_t i = 0;
  std::int64_t r = 0;

  std::int64_t total() const { return s + i + r; }
  std::int64_t get(NodeState c) const {
    return c == NodeState::kSusceptible ? s : c == NodeState::kInfected ? i : r;
  }
  bool operator==(const CountState&) const = default;
};

/// The five competing Poisson clocks of the open SIRS queueing network.
/// R departures at rate r*alpha are split into `reflux` (fraction p, back to
/// S) and `exit` (fraction 1 - p, leave the system).
struct EventRates {
  double arrival = 0.0;    // lambda
  double infection = 0.0;  // s * i * <k> * beta
  double recovery = 0.0;   // i * gamma
  double reflux = 0.0;     // p * alpha * r
  double exit = 0.0;       // (1 - p) * alpha * r

  double s_up() const { return arrival + reflux; }
  double s_down() const { return infection; }
  double i_up() const { return infection; }
  double i_down() const { return recovery; }
  double r_up() const { return recovery; }
  double r_down() const { return reflux + exit; }
  double total() const { return arrival + infection + recovery + reflux + exit; }
};

enum class EventKind : std::uint8_t { kArrival, kInfection, kRecovery, kReflux, kExit };

/// What happens when the last infected individual recovers.
enum class ExtinctionPolicy : std::uint8_t {
  /// i = 0 is absorbing for I; the run continues with arrivals and R drain.
  kAbsorb,
  /// One infected individual is imported the moment i would reach 0, so the
  /// chain lives on {i >= 1}. Recovery at i = 1 then moves (s, 1, r+1).
  kReseed,
};

const char* to_string(ExtinctionPolicy p);
ExtinctionPolicy extinction_policy_from_string(const std::string& s);

/// Throws kOutOfRange(mean_degree) unless mean_degree > 0.
EventRates event_rates(const CountState& x, const EpidemicParams& params, double mean_degree);

/// Applies one event atomically.
CountState apply_event(CountState x, EventKind e, ExtinctionPolicy policy = ExtinctionPolicy::kAbsorb);

/// True when `b` follows `a` by one legal move: a unit change of one counter
/// or one of the coupled moves (S-1,I+1), (I-1,R+1), (R-1,S+1).
bool is_legal_move(const CountState& a, const CountState& b);

struct GillespieOptions {
  ExtinctionPolicy extinction = ExtinctionPolicy::kAbsorb;
};

/// Next-event simulation of the count chain on [0, t_end]. `on_event(t,
/// state, kind)` sees every event with t <= t_end, state already updated.
/// Returns the state at t_end.
template <typename Sink>
CountState simulate_counts(CountState x, const EpidemicParams& params, double mean_degree,
                           double t_end, RandomSource& rs, const GillespieOptions& opts,
                           Sink&& on_event) {
  validate_params(params);
  double t = 0.0;
  for (;;) {
    const EventRates r = event_rates(x, params, mean_degree);
    const double total = r.total();
    if (!(total > 0.0)) break;
    t += rs.exponential(total);
    if (t > t_end) break;
    constexpr EventKind kinds[5] = {EventKind::kInfection, EventKind::kRecovery,
                                    EventKind::kReflux, EventKind::kArrival, EventKind::kExit};
    const double w[5] = {r.infection, r.recovery, r.reflux, r.arrival, r.exit};
    const double pick = rs.uniform() * total;
    int k = 0;
    for (double acc = w[0]; k < 4 && !(pick < acc);) acc += w[++k];
    while (w[k] == 0.0) --k;  // rounding at the top end
    const EventKind e = kinds[k];
    x = apply_event(x, e, opts.extinction);
    on_event(t, x, e);
  }
  return x;
}

/// Piecewise-constant count path: states[k] holds on [times[k], times[k+1]),
/// the last one until t_end. times[0] == t_start.
struct CountTrajectory {
  std::vector<double> times;
  std::vector<CountState> states;
  double t_end = 0.0;

  std::size_t size() const { return times.size(); }
  /// State holding at time t (right-continuous).
  CountState at(double t) const;
  /// Every consecutive pair is a legal move and times strictly increase.
  bool is_legal() const;
};

CountTrajectory simulate_gillespie(const CountState& init, const EpidemicParams& params,
                                   double mean_degree, double t_end, RandomSource& rs,
                                   const GillespieOptions& opts = {});

/// Closed-form stationary means (E[S], E[I], E[R]).
struct StationaryExpectation {
  double e_s = 0.0;
  double e_i = 0.0;
  double e_r = 0.0;

  double get(NodeState c) const {
    return c == NodeState::kSusceptible ? e_s : c == NodeState::kInfected ? e_i : e_r;
  }
};

/// E[S] = gamma / (beta <k>), E[I] = lambda / (gamma (1-p)),
/// E[R] = lambda / (alpha (1-p)). Throws kDivisionByZero naming the zero
/// parameter (beta, mean_degree, gamma or alpha).
StationaryExpectation stationary_expectations(const EpidemicParams& params, double mean_degree);

/// Residuals of the three flow-balance relations at (e_s, e_i, e_r):
/// lambda + p alpha E[R] - E[S]E[I] beta <k>, E[S]E[I] beta <k> - gamma E[I],
/// gamma E[I] - alpha E[R].
Eigen::Vector3d balance_residuals(const EpidemicParams& params, double mean_degree,
                                  const StationaryExpectation& e);

/// Stationary law of the count chain restricted to the box [0, cap]^3.
struct TruncatedStationary {
  int cap = 0;
  /// Probability per box state, indexed by index(s, i, r); unreachable
  /// states carry 0.
  Eigen::VectorXd prob;
  Eigen::Vector3d means = Eigen::Vector3d::Zero();
  /// Mass on states with any coordinate equal to cap.
  double boundary_mass = 0.0;
  /// max over states of |(pi Q)_x|: net probability flux.
  double balance_residual = 0.0;
  std::size_t reachable_states = 0;

  std::size_t index(int s, int i, int r) const {
    return (static_cast<std::size_t>(s) * (cap + 1) + i) * (cap + 1) + r;
  }
  double at(int s, int i, int r) const { return prob[index(s, i, r)]; }
};

struct OracleOptions {
  CountState init{0, 1, 0};
  ExtinctionPolicy extinction = ExtinctionPolicy::kAbsorb;
};

/// Builds the generator over box states reachable from `opts.init`, with
/// every transition that would leave the box dropped, and solves pi Q = 0,
/// sum pi = 1 by sparse LU. Throws kSingularSystem when the reachable chain
/// has more than one closed class, kConfigError for cap outside [1, 40].
TruncatedStationary solve_truncated_stationary(const EpidemicParams& params, double mean_degree,
                                               int cap, const OracleOptions& opts = {});

/// Sample of the path at t = 0, dt, 2dt, ... <= t_end.
struct ResampledSeries {
  std::vector<double> t;
  std::vector<CountState> states;
};

ResampledSeries resample(const CountTrajectory& traj, double dt);

/// `time,s,i,r`, one row per event, starting with the initial state.
void write_trajectory_csv(std::ostream& os, const CountTrajectory& traj);
/// `t,s,i,r`.
void write_resampled_csv(std::ostream& os, const ResampledSeries& series);
/// `s,i,r,prob`, reachable states only, lexicographic order.
void write_oracle_csv(std::ostream& os, const TruncatedStationary& pi);

/// Agent-level run of the queueing network on an evolving graph: arrivals
/// join S through node_arrival(m), infections/recoveries/refluxes pick a
/// uniform node of the source state, exits call node_departure.
struct CoupledOptions {
  int m_arrival = 4;
  /// Use the live mean degree of the graph instead of `mean_degree`.
  bool live_mean_degree = false;
  ExtinctionPolicy extinction = ExtinctionPolicy::kAbsorb;
  /// Sampling interval of the recorded series; <= 0 disables it.
  double sample_dt = 0.0;
};

struct CoupledResult {
  CountState final_state;
  std::uint64_t events = 0;
  std::uint64_t departures = 0;
  std::uint64_t arrivals = 0;
  ResampledSeries series;
  std::vector<double> mean_degree_series;
};

/// Node states already on `net` provide the initial counts.
CoupledResult simulate_coupled(Network& net, const EpidemicParams& params, double mean_degree,
                               double t_end, RandomSource& rs, const CoupledOptions& opts = {});

}  // namespace sirs
