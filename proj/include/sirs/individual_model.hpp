#pragma once

#include <Eigen/Core>
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "sirs/core.hpp"
#include "sirs/network.hpp"

namespace sirs {

// Row i of a transition matrix is the next-state law given state i, with
// states ordered (S, I, R).
template <typename Scalar>
using TransitionMatrixT = Eigen::Matrix<Scalar, 3, 3, Eigen::RowMajor>;
template <typename Scalar>
using StateDistributionT = Eigen::Matrix<Scalar, 1, 3>;

using TransitionMatrix = TransitionMatrixT<double>;
using StateDistribution = StateDistributionT<double>;

/// Protection-discounted infected-neighbour count e^{-u} * rho. Kept real.
template <typename Scalar = double>
Scalar valid_infected_neighbors(std::uint32_t protection, std::uint32_t infected_neighbors) {
  using std::exp;
  return exp(-static_cast<Scalar>(protection)) * static_cast<Scalar>(infected_neighbors);
}

/// 1 - (1 - beta)^d, with d = 0 mapping to exactly 0 (also for beta = 1).
template <typename Scalar>
Scalar infection_probability(Scalar beta, Scalar d) {
  using std::pow;
  if (d == Scalar(0)) return Scalar(0);
  return Scalar(1) - pow(Scalar(1) - beta, d);
}

/// Requires gamma, alpha <= 1 (they are per-step probabilities here) on top
/// of the usual parameter invariants.
void validate_discrete_params(const EpidemicParams& p);

template <typename Scalar = double>
TransitionMatrixT<Scalar> build_transition_matrix(const EpidemicParams& params, Scalar d) {
  validate_discrete_params(params);
  if (!(d >= Scalar(0))) throw Error(ErrorCode::kNegativeParameter, "d");
  const Scalar beta(params.beta);
  const Scalar gamma(params.gamma);
  const Scalar alpha(params.alpha);
  const Scalar infect = infection_probability(beta, d);
  TransitionMatrixT<Scalar> m;
  m << Scalar(1) - infect, infect, Scalar(0),
       Scalar(0), Scalar(1) - gamma, gamma,
       alpha, Scalar(0), Scalar(1) - alpha;
  return m;
}

/// pi0 * P(0) * P(1) * ... * P(n).
template <typename Scalar>
StateDistributionT<Scalar> evolve_distribution(
    const StateDistributionT<Scalar>& pi0,
    std::span<const TransitionMatrixT<Scalar>> mats) {
  StateDistributionT<Scalar> pi = pi0;
  for (const auto& m : mats) pi = (pi * m).eval();
  return pi;
}

template <typename Derived>
bool is_row_stochastic(const Eigen::MatrixBase<Derived>& m, double tol = 1e-12) {
  if ((m.array() < 0).any() || (m.array() > 1).any()) return false;
  return ((m.rowwise().sum().array() - 1).abs() <= tol).all();
}

template <typename Derived>
bool is_distribution(const Eigen::MatrixBase<Derived>& pi, double tol = 1e-12) {
  if ((pi.array() < 0).any() || (pi.array() > 1).any()) return false;
  return std::abs(pi.sum() - 1) <= tol;
}

/// E[d_j] = f * k_j * rho, the mean-field estimate of the valid infected
/// neighbour count for global infected density rho. Diagnostic only.
inline double mean_field_valid_neighbors(double f, double degree, double density) {
  return f * degree * density;
}

struct StepOptions {
  /// Redraw every node's protection degree before each step. Off by default:
  /// protection is a static per-node attribute.
  bool resample_protection = false;
};

/// Synchronous discrete-time chain on a frozen graph. States are updated
/// for all nodes from the time-n snapshot; each node consumes exactly one
/// uniform draw per step.
class IndividualChain {
 public:
  explicit IndividualChain(const Network& net);

  std::size_t size() const { return states_.size(); }
  std::span<const NodeState> states() const { return states_; }
  std::span<const std::uint32_t> protection() const { return protection_; }
  const SlotAdjacency& adjacency() const { return adj_; }

  void set_state(std::size_t slot, NodeState s) { states_[slot] = s; }
  void set_protection(std::size_t slot, std::uint32_t u) { protection_[slot] = u; }

  /// Number of infected neighbours of `slot` in the current snapshot.
  std::uint32_t infected_neighbors(std::size_t slot) const;

  /// Advances one step; returns how many nodes changed state.
  std::size_t step(const EpidemicParams& params, RandomSource& rs,
                   const StepOptions& opts = {});

  std::size_t count(NodeState s) const;

  /// Copies states (and protection) back onto the network, slot by slot.
  void write_back(Network& net) const;

 private:
  SlotAdjacency adj_;
  std::vector<NodeState> states_;
  std::vector<NodeState> next_;
  std::vector<std::uint32_t> protection_;
};

/// One synchronous step applied to `net` in place. Returns transition count.
std::size_t step_network(Network& net, const EpidemicParams& params, RandomSource& rs,
                         const StepOptions& opts = {});

struct DegreeClass {
  std::size_t node_count = 0;
  double infected_frequency = 0.0;
  /// Fewer than three nodes in the class.
  bool low_sample = false;
};

struct DegreeClassStats {
  std::map<std::size_t, DegreeClass> by_degree;

  /// Per-node degree and I-frequency over the recording window, slot order.
  std::vector<std::size_t> node_degree;
  std::vector<double> node_frequency;

  /// Global infected density after every step (index 0 = initial state).
  std::vector<double> infected_density;

  /// Window averages of measured d_j and of f * k_j * rho(n), over all
  /// susceptible node-steps.
  double measured_valid_neighbors = 0.0;
  double mean_field_valid_neighbors = 0.0;

  /// Node-weighted mean I-frequency over degree classes in [lo, hi].
  double mean_frequency(std::size_t lo, std::size_t hi) const;
};

struct Fig3Options {
  StepOptions step;
};

/// Builds WS(cfg), draws protection degrees Poisson(params.protect_intensity)
/// per node, infects one uniformly chosen node, runs `steps` synchronous
/// steps and aggregates each node's I-frequency over steps burn_in+1..steps
/// by exact degree. Throws kConfigError unless 0 <= burn_in < steps.
DegreeClassStats run_fig3_experiment(const WsConfig& cfg, const EpidemicParams& params,
                                     int steps, int burn_in, RandomSource& rs,
                                     const Fig3Options& opts = {});

/// `degree,count,infected_frequency` header then ascending degrees.
void write_degree_class_csv(std::ostream& os, const DegreeClassStats& stats);

}  // namespace sirs
