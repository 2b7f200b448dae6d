#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <vector>

#include "sirs/core.hpp"
#include "sirs/population_model.hpp"

namespace sirs {

/// Dwell-time statistics of one component over [t_b, t_e].
struct StationaryStats {
  /// Σ n t_n / (t_e - t_b).
  double mean = 0.0;
  /// sqrt(Σ (x_k - mean)^2) / N over the N records (state at t_b plus the
  /// state after every event in (t_b, t_e]).
  double std_paper = 0.0;
  /// sqrt(Σ t_n (n - mean)^2 / (t_e - t_b)).
  double std_timeweighted = 0.0;
  double t_b = 0.0;
  double t_e = 0.0;
  std::uint64_t records = 0;
  /// count n -> total dwell time t_n inside the window.
  std::map<std::int64_t, double> occupancy;
};

/// Streaming form of stationary_stats for runs too long to store. Feed the
/// initial state with start(), then every state change in time order.
class WindowAccumulator {
 public:
  WindowAccumulator(double t_b, double t_e);

  void start(double t0, const CountState& x);
  void observe(double t, const CountState& x);
  /// Closes the window; no further observations are accepted.
  void finish();

  StationaryStats stats(NodeState component) const;

 private:
  void credit(double until);
  void record(const CountState& x);

  double t_b_, t_e_;
  double last_t_ = 0.0;
  CountState last_{};
  bool started_ = false;
  bool finished_ = false;
  bool entered_ = false;
  std::vector<double> dwell_[3];
  // Running sums over the records (values at t_b and after events).
  std::uint64_t n_records_ = 0;
  double rec_sum_[3] = {0.0, 0.0, 0.0};
  double rec_sumsq_[3] = {0.0, 0.0, 0.0};
};

/// Throws kEmptyWindow unless 0 <= t_b < t_e <= trajectory end.
StationaryStats stationary_stats(const CountTrajectory& traj, NodeState component, double t_b,
                                 double t_e);

struct CountDistribution {
  /// lower bin edge -> probability mass.
  std::map<std::int64_t, double> bins;
  std::int64_t bin_width = 1;

  /// Heaviest bin: the count itself for unit bins, else the bin centre.
  double mode() const;
  /// Σ edge * mass, i.e. the mean for unit bins.
  double mean() const;
};

/// Pooled dwell-weighted histogram over the windows of all inputs.
/// Throws kEmptyWindow for an empty input or zero total dwell.
CountDistribution count_distribution(std::span<const StationaryStats> windows,
                                     std::int64_t bin_width = 1);
CountDistribution count_distribution(std::span<const CountTrajectory> trajs, NodeState component,
                                     double t_b, double t_e, std::int64_t bin_width = 1);

/// |observed - theoretical| / |theoretical|. Throws kDivisionByZero.
double relative_error(double observed, double theoretical);

struct ChiSquareResult {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 1.0;
};

/// Upper tail P(X >= x) of chi-square with `dof` degrees of freedom.
double chi_square_sf(double x, int dof);

/// Two-sample homogeneity test on count histograms. Adjacent categories are
/// merged, in key order, until every expected cell count is >= 5.
ChiSquareResult chi_square_two_sample(const std::map<std::size_t, std::size_t>& a,
                                      const std::map<std::size_t, std::size_t>& b);

/// Goodness of fit of observed counts to equal cell probabilities.
ChiSquareResult chi_square_uniform(std::span<const std::uint64_t> observed);

/// Spearman rank correlation with average ranks for ties. Throws
/// kLengthMismatch and kZeroVariance.
double spearman(std::span<const double> x, std::span<const double> y);

/// `component,mean,std_tw,std_paper,rel_err` header.
void write_stats_header(std::ostream& os);
void write_stats_row(std::ostream& os, NodeState component, const StationaryStats& st,
                     double theoretical);
/// `count,probability`.
void write_distribution_csv(std::ostream& os, const CountDistribution& d);

const char* component_name(NodeState c);

}  // namespace sirs
