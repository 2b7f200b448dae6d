#include "sirs/individual_model.hpp"

#include <ostream>

namespace sirs {

void validate_discrete_params(const EpidemicParams& p) {
  validate_params(p);
  if (p.gamma > 1.0) throw Error(ErrorCode::kOutOfRange, "gamma", "per-step probability must be <= 1");
  if (p.alpha > 1.0) throw Error(ErrorCode::kOutOfRange, "alpha", "per-step probability must be <= 1");
}

IndividualChain::IndividualChain(const Network& net)
    : adj_(slot_adjacency(net)),
      states_(net.node_count()),
      next_(net.node_count()),
      protection_(net.node_count()) {
  for (std::size_t s = 0; s < net.node_count(); ++s) {
    states_[s] = net.state(net.node_at(s));
    protection_[s] = net.protection(net.node_at(s));
  }
}

std::uint32_t IndividualChain::infected_neighbors(std::size_t slot) const {
  std::uint32_t rho = 0;
  for (std::uint32_t t : adj_.row(slot)) rho += states_[t] == NodeState::kInfected;
  return rho;
}

std::size_t IndividualChain::step(const EpidemicParams& params, RandomSource& rs,
                                  const StepOptions& opts) {
  if (opts.resample_protection)
    for (auto& u : protection_)
      u = static_cast<std::uint32_t>(sample_poisson(rs, params.protect_intensity));

  std::size_t changed = 0;
  for (std::size_t s = 0; s < states_.size(); ++s) {
    const double u = rs.uniform();
    NodeState next = states_[s];
    switch (states_[s]) {
      case NodeState::kSusceptible: {
        const std::uint32_t rho = infected_neighbors(s);
        if (rho > 0) {
          const double d = valid_infected_neighbors(protection_[s], rho);
          if (u < infection_probability(params.beta, d)) next = NodeState::kInfected;
        }
        break;
      }
      case NodeState::kInfected:
        if (u < params.gamma) next = NodeState::kRecovered;
        break;
      case NodeState::kRecovered:
        if (u < params.alpha) next = NodeState::kSusceptible;
        break;
    }
    changed += next != states_[s];
    next_[s] = next;
  }
  states_.swap(next_);
  return changed;
}

std::size_t IndividualChain::count(NodeState s) const {
  std::size_t c = 0;
  for (NodeState x : states_) c += x == s;
  return c;
}

void IndividualChain::write_back(Network& net) const {
  for (std::size_t s = 0; s < states_.size(); ++s) {
    net.set_state(net.node_at(s), states_[s]);
    net.set_protection(net.node_at(s), protection_[s]);
  }
}

std::size_t step_network(Network& net, const EpidemicParams& params, RandomSource& rs,
                         const StepOptions& opts) {
  validate_discrete_params(params);
  IndividualChain chain(net);
  const std::size_t changed = chain.step(params, rs, opts);
  chain.write_back(net);
  return changed;
}

double DegreeClassStats::mean_frequency(std::size_t lo, std::size_t hi) const {
  double weighted = 0.0;
  std::size_t nodes = 0;
  for (auto it = by_degree.lower_bound(lo); it != by_degree.end() && it->first <= hi; ++it) {
    weighted += it->second.infected_frequency * static_cast<double>(it->second.node_count);
    nodes += it->second.node_count;
  }
  return nodes ? weighted / static_cast<double>(nodes) : 0.0;
}

DegreeClassStats run_fig3_experiment(const WsConfig& cfg, const EpidemicParams& params,
                                     int steps, int burn_in, RandomSource& rs,
                                     const Fig3Options& opts) {
  validate_discrete_params(params);
  if (burn_in < 0 || steps <= burn_in)
    throw Error(ErrorCode::kConfigError, "steps", "need 0 <= burn_in < steps");

  Network net = generate_ws(cfg, rs);
  for (std::size_t s = 0; s < net.node_count(); ++s)
    net.set_protection(net.node_at(s),
                       static_cast<std::uint32_t>(sample_poisson(rs, params.protect_intensity)));
  net.set_state(net.node_at(rs.uniform_index(net.node_count())), NodeState::kInfected);

  IndividualChain chain(net);
  const std::size_t n = chain.size();
  std::vector<std::uint32_t> infected_steps(n, 0);
  std::vector<std::size_t> degree(n);
  for (std::size_t s = 0; s < n; ++s) degree[s] = chain.adjacency().row(s).size();

  DegreeClassStats out;
  out.infected_density.reserve(steps + 1);
  out.infected_density.push_back(static_cast<double>(chain.count(NodeState::kInfected)) / n);

  double measured = 0.0, predicted = 0.0;
  std::size_t samples = 0;
  for (int step = 1; step <= steps; ++step) {
    if (step > burn_in) {
      // Diagnostic on the pre-step snapshot that drives this transition.
      const double rho = out.infected_density.back();
      for (std::size_t s = 0; s < n; ++s) {
        if (chain.states()[s] != NodeState::kSusceptible) continue;
        const double f = std::exp(-static_cast<double>(chain.protection()[s]));
        measured += valid_infected_neighbors(chain.protection()[s], chain.infected_neighbors(s));
        predicted += mean_field_valid_neighbors(f, static_cast<double>(degree[s]), rho);
        ++samples;
      }
    }
    chain.step(params, rs, opts.step);
    const auto states = chain.states();
    std::size_t infected = 0;
    for (std::size_t s = 0; s < n; ++s) {
      const bool inf = states[s] == NodeState::kInfected;
      infected += inf;
      if (step > burn_in) infected_steps[s] += inf;
    }
    out.infected_density.push_back(static_cast<double>(infected) / n);
  }
  if (samples) {
    out.measured_valid_neighbors = measured / samples;
    out.mean_field_valid_neighbors = predicted / samples;
  }

  const double window = steps - burn_in;
  out.node_degree = degree;
  out.node_frequency.resize(n);
  std::map<std::size_t, double> sums;
  for (std::size_t s = 0; s < n; ++s) {
    out.node_frequency[s] = infected_steps[s] / window;
    auto& cls = out.by_degree[degree[s]];
    ++cls.node_count;
    sums[degree[s]] += out.node_frequency[s];
  }
  for (auto& [d, cls] : out.by_degree) {
    cls.infected_frequency = sums[d] / static_cast<double>(cls.node_count);
    cls.low_sample = cls.node_count < 3;
  }
  return out;
}

void write_degree_class_csv(std::ostream& os, const DegreeClassStats& stats) {
  os << "degree,count,infected_frequency\n";
  for (const auto& [d, cls] : stats.by_degree)
    os << d << ',' << cls.node_count << ',' << format_double(cls.infected_frequency) << '\n';
}

}  // namespace sirs
