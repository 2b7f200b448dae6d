#include "sirs/stats.hpp"

#include <unsupported/Eigen/SpecialFunctions>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

namespace sirs {

const char* component_name(NodeState c) {
  switch (c) {
    case NodeState::kSusceptible: return "S";
    case NodeState::kInfected: return "I";
    case NodeState::kRecovered: return "R";
  }
  return "?";
}

WindowAccumulator::WindowAccumulator(double t_b, double t_e) : t_b_(t_b), t_e_(t_e) {
  if (!(t_b >= 0.0 && t_b < t_e)) throw Error(ErrorCode::kEmptyWindow, "window");
}

void WindowAccumulator::start(double t0, const CountState& x) {
  last_t_ = t0;
  last_ = x;
  started_ = true;
  if (t0 >= t_b_) record(x);
}

void WindowAccumulator::record(const CountState& x) {
  entered_ = true;
  ++n_records_;
  for (int c = 0; c < 3; ++c) {
    const auto v = static_cast<double>(x.get(static_cast<NodeState>(c)));
    rec_sum_[c] += v;
    rec_sumsq_[c] += v * v;
  }
}

void WindowAccumulator::credit(double until) {
  const double lo = std::max(last_t_, t_b_);
  const double hi = std::min(until, t_e_);
  if (hi <= lo) return;
  for (int c = 0; c < 3; ++c) {
    const auto n = static_cast<std::size_t>(last_.get(static_cast<NodeState>(c)));
    if (dwell_[c].size() <= n) dwell_[c].resize(n + 1, 0.0);
    dwell_[c][n] += hi - lo;
  }
}

void WindowAccumulator::observe(double t, const CountState& x) {
  if (!started_ || finished_) throw Error(ErrorCode::kEmptyWindow, "accumulator");
  // Entering the window: the state holding at t_b is the first record.
  if (!entered_ && t > t_b_) record(last_);
  credit(t);
  last_t_ = t;
  last_ = x;
  if (t >= t_b_ && t <= t_e_) record(x);
}

void WindowAccumulator::finish() {
  if (!started_) throw Error(ErrorCode::kEmptyWindow, "accumulator");
  if (finished_) return;
  if (!entered_) record(last_);
  credit(t_e_);
  last_t_ = t_e_;
  finished_ = true;
}

StationaryStats WindowAccumulator::stats(NodeState component) const {
  const int c = index_of(component);
  StationaryStats st;
  st.t_b = t_b_;
  st.t_e = t_e_;
  const double span = t_e_ - t_b_;
  double total = 0.0, weighted = 0.0;
  for (std::size_t n = 0; n < dwell_[c].size(); ++n) {
    if (dwell_[c][n] <= 0.0) continue;
    st.occupancy[static_cast<std::int64_t>(n)] = dwell_[c][n];
    total += dwell_[c][n];
    weighted += static_cast<double>(n) * dwell_[c][n];
  }
  if (!(total > 0.0)) throw Error(ErrorCode::kEmptyWindow, "window", "no dwell time recorded");
  st.mean = weighted / span;
  double var = 0.0;
  for (const auto& [n, tn] : st.occupancy) var += tn * (n - st.mean) * (n - st.mean);
  st.std_timeweighted = std::sqrt(var / span);
  const double nr = static_cast<double>(n_records_);
  const double ss = std::max(
      0.0, rec_sumsq_[c] - 2.0 * st.mean * rec_sum_[c] + nr * st.mean * st.mean);
  st.records = n_records_;
  st.std_paper = st.records ? std::sqrt(ss) / static_cast<double>(st.records) : 0.0;
  return st;
}

StationaryStats stationary_stats(const CountTrajectory& traj, NodeState component, double t_b,
                                 double t_e) {
  if (traj.times.empty() || !(t_b >= 0.0 && t_b < t_e && t_e <= traj.t_end))
    throw Error(ErrorCode::kEmptyWindow, "window");
  WindowAccumulator acc(t_b, t_e);
  acc.start(traj.times.front(), traj.states.front());
  for (std::size_t k = 1; k < traj.size(); ++k) {
    if (traj.times[k] > t_e) break;
    acc.observe(traj.times[k], traj.states[k]);
  }
  acc.finish();
  return acc.stats(component);
}

double CountDistribution::mode() const {
  if (bins.empty()) return 0.0;
  auto best = std::max_element(bins.begin(), bins.end(),
                               [](const auto& a, const auto& b) { return a.second < b.second; });
  return static_cast<double>(best->first) + (bin_width > 1 ? 0.5 * bin_width : 0.0);
}

double CountDistribution::mean() const {
  double m = 0.0;
  for (const auto& [edge, mass] : bins) m += static_cast<double>(edge) * mass;
  return m;
}

CountDistribution count_distribution(std::span<const StationaryStats> windows,
                                     std::int64_t bin_width) {
  if (windows.empty()) throw Error(ErrorCode::kEmptyWindow, "trajectories");
  if (bin_width < 1) throw Error(ErrorCode::kOutOfRange, "bin_width");
  CountDistribution d;
  d.bin_width = bin_width;
  double total = 0.0;
  for (const auto& w : windows)
    for (const auto& [n, tn] : w.occupancy) {
      const std::int64_t edge = (n / bin_width) * bin_width;
      d.bins[edge] += tn;
      total += tn;
    }
  if (!(total > 0.0)) throw Error(ErrorCode::kEmptyWindow, "window");
  for (auto& [edge, mass] : d.bins) mass /= total;
  return d;
}

CountDistribution count_distribution(std::span<const CountTrajectory> trajs, NodeState component,
                                     double t_b, double t_e, std::int64_t bin_width) {
  if (trajs.empty()) throw Error(ErrorCode::kEmptyWindow, "trajectories");
  std::vector<StationaryStats> windows;
  windows.reserve(trajs.size());
  for (const auto& t : trajs) windows.push_back(stationary_stats(t, component, t_b, t_e));
  return count_distribution(windows, bin_width);
}

double relative_error(double observed, double theoretical) {
  if (theoretical == 0.0) throw Error(ErrorCode::kDivisionByZero, "theoretical");
  return std::abs(observed - theoretical) / std::abs(theoretical);
}

double chi_square_sf(double x, int dof) {
  if (dof < 1) return 1.0;
  if (!(x > 0.0)) return 1.0;
  return Eigen::numext::igammac(0.5 * dof, 0.5 * x);
}

ChiSquareResult chi_square_two_sample(const std::map<std::size_t, std::size_t>& a,
                                      const std::map<std::size_t, std::size_t>& b) {
  std::map<std::size_t, std::pair<double, double>> cells;
  double na = 0.0, nb = 0.0;
  for (const auto& [k, c] : a) {
    cells[k].first += static_cast<double>(c);
    na += static_cast<double>(c);
  }
  for (const auto& [k, c] : b) {
    cells[k].second += static_cast<double>(c);
    nb += static_cast<double>(c);
  }
  ChiSquareResult res;
  if (na == 0.0 || nb == 0.0) return res;
  const double n = na + nb;
  const double min_share = std::min(na, nb) / n;

  // Merge adjacent categories until each pooled cell expects >= 5 in the
  // smaller sample; a short tail is folded into the last full cell.
  std::vector<std::pair<double, double>> merged;
  std::pair<double, double> acc{0.0, 0.0};
  for (const auto& [k, ab] : cells) {
    acc.first += ab.first;
    acc.second += ab.second;
    if ((acc.first + acc.second) * min_share >= 5.0) {
      merged.push_back(acc);
      acc = {0.0, 0.0};
    }
  }
  if (acc.first + acc.second > 0.0) {
    if (merged.empty()) merged.push_back(acc);
    else {
      merged.back().first += acc.first;
      merged.back().second += acc.second;
    }
  }
  if (merged.size() < 2) return res;
  for (const auto& [oa, ob] : merged) {
    const double row = oa + ob;
    const double ea = row * na / n, eb = row * nb / n;
    res.statistic += (oa - ea) * (oa - ea) / ea + (ob - eb) * (ob - eb) / eb;
  }
  res.dof = static_cast<int>(merged.size()) - 1;
  res.p_value = chi_square_sf(res.statistic, res.dof);
  return res;
}

ChiSquareResult chi_square_uniform(std::span<const std::uint64_t> observed) {
  ChiSquareResult res;
  if (observed.size() < 2) return res;
  const double total = std::accumulate(observed.begin(), observed.end(), 0.0);
  const double expected = total / static_cast<double>(observed.size());
  for (auto o : observed) res.statistic += (o - expected) * (o - expected) / expected;
  res.dof = static_cast<int>(observed.size()) - 1;
  res.p_value = chi_square_sf(res.statistic, res.dof);
  return res;
}

namespace {

std::vector<double> average_ranks(std::span<const double> x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return x[a] < x[b]; });
  std::vector<double> rank(x.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && x[order[j + 1]] == x[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) rank[order[k]] = r;
    i = j + 1;
  }
  return rank;
}

}  // namespace

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error(ErrorCode::kLengthMismatch, "y");
  if (x.size() < 2) throw Error(ErrorCode::kZeroVariance, "x");
  const auto rx = average_ranks(x), ry = average_ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < rx.size(); ++k) {
    sxy += (rx[k] - mx) * (ry[k] - my);
    sxx += (rx[k] - mx) * (rx[k] - mx);
    syy += (ry[k] - my) * (ry[k] - my);
  }
  if (sxx == 0.0) throw Error(ErrorCode::kZeroVariance, "x");
  if (syy == 0.0) throw Error(ErrorCode::kZeroVariance, "y");
  return sxy / std::sqrt(sxx * syy);
}

void write_stats_header(std::ostream& os) { os << "component,mean,std_tw,std_paper,rel_err\n"; }

void write_stats_row(std::ostream& os, NodeState component, const StationaryStats& st,
                     double theoretical) {
  os << component_name(component) << ',' << format_double(st.mean) << ','
     << format_double(st.std_timeweighted) << ',' << format_double(st.std_paper) << ','
     << format_double(relative_error(st.mean, theoretical)) << '\n';
}

void write_distribution_csv(std::ostream& os, const CountDistribution& d) {
  os << "count,probability\n";
  for (const auto& [edge, mass] : d.bins) os << edge << ',' << format_double(mass) << '\n';
}

}  // namespace sirs
