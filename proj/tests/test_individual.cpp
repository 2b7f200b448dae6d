#include "doctest.h"

#include <array>
#include <cmath>
#include <sstream>
#include <vector>

#include "sirs/individual_model.hpp"

using namespace sirs;

namespace {

EpidemicParams discrete(double beta, double gamma, double alpha) {
  EpidemicParams p;
  p.beta = beta;
  p.gamma = gamma;
  p.alpha = alpha;
  return p;
}

EpidemicParams random_discrete(RandomSource& rs) {
  return discrete(rs.uniform(), rs.uniform(), rs.uniform());
}

}  // namespace

TEST_CASE("valid infected neighbours") {
  CHECK(valid_infected_neighbors(0, 7) == 7.0);
  CHECK(valid_infected_neighbors(3, 0) == 0.0);
  CHECK(valid_infected_neighbors(1, 5) == doctest::Approx(1.8393972058572117).epsilon(1e-15));
}

TEST_CASE("transition matrix entries") {
  const TransitionMatrix m0 = build_transition_matrix(discrete(0.2, 0.3, 0.4), 0.0);
  CHECK(m0(0, 0) == 1.0);
  CHECK(m0(0, 1) == 0.0);
  CHECK(m0(0, 2) == 0.0);
  CHECK(m0(1, 1) == doctest::Approx(0.7));
  CHECK(m0(1, 2) == 0.3);
  CHECK(m0(2, 0) == 0.4);
  CHECK(m0(2, 2) == doctest::Approx(0.6));

  const TransitionMatrix m1 = build_transition_matrix(discrete(0.3, 0.3, 0.4), 1.0);
  CHECK(m1(0, 1) == doctest::Approx(0.3).epsilon(1e-15));

  const TransitionMatrix m2 = build_transition_matrix(discrete(0.1, 0.3, 0.4), 2.5);
  CHECK(std::abs(m2(0, 1) - 0.23156652857908377) < 1e-12);
  CHECK(std::abs(m2(0, 1) - (1.0 - std::pow(0.9, 2.5))) < 1e-15);

  CHECK_THROWS_AS(build_transition_matrix(discrete(0.1, 1.5, 0.4), 1.0), Error);
  CHECK_THROWS_AS(build_transition_matrix(discrete(0.1, 0.5, 1.01), 1.0), Error);
}

TEST_CASE("matrix is templated on the scalar") {
  const auto mf = build_transition_matrix<float>(discrete(0.1, 0.3, 0.4), 2.5f);
  CHECK(mf(0, 1) == doctest::Approx(0.2315665f).epsilon(1e-6));
  CHECK(is_row_stochastic(mf, 1e-6));
}

TEST_CASE("evolve distribution examples") {
  const StateDistribution s{1.0, 0.0, 0.0};
  CHECK(evolve_distribution(s, std::span<const TransitionMatrix>{}) == s);

  const TransitionMatrix cure = build_transition_matrix(discrete(0.0, 1.0, 0.0), 0.0);
  const StateDistribution r = evolve_distribution(StateDistribution{0.0, 1.0, 0.0}, {&cure, 1});
  CHECK(r(0) == 0.0);
  CHECK(r(1) == 0.0);
  CHECK(r(2) == 1.0);

  // Hand product for beta = gamma = alpha = 0.5, d = 1:
  // P = [[.5,.5,0],[0,.5,.5],[.5,0,.5]]; (1,0,0) P = (.5,.5,0); (.5,.5,0) P = (.25,.5,.25).
  const TransitionMatrix p = build_transition_matrix(discrete(0.5, 0.5, 0.5), 1.0);
  const std::array<TransitionMatrix, 2> seq{p, p};
  const StateDistribution two = evolve_distribution(StateDistribution{1.0, 0.0, 0.0}, std::span<const TransitionMatrix>(seq));
  CHECK(std::abs(two(0) - 0.25) < 1e-12);
  CHECK(std::abs(two(1) - 0.5) < 1e-12);
  CHECK(std::abs(two(2) - 0.25) < 1e-12);
}

TEST_CASE("property: generated matrices are row-stochastic") {
  RandomSource rs(101);
  for (int c = 0; c < 10000; ++c) {
    const EpidemicParams p = random_discrete(rs);
    const double d = rs.uniform() * 30.0;
    const TransitionMatrix m = build_transition_matrix(p, d);
    REQUIRE(is_row_stochastic(m));
    REQUIRE((m.array() >= 0.0).all());
    REQUIRE((m.array() <= 1.0).all());
  }
}

TEST_CASE("property: evolution stays on the simplex") {
  RandomSource rs(102);
  for (int c = 0; c < 2000; ++c) {
    StateDistribution pi;
    pi << rs.uniform(), rs.uniform(), rs.uniform();
    pi /= pi.sum();
    std::vector<TransitionMatrix> seq;
    const int len = 1 + static_cast<int>(rs.uniform_index(50));
    for (int k = 0; k < len; ++k) seq.push_back(build_transition_matrix(random_discrete(rs), rs.uniform() * 10.0));
    const StateDistribution out = evolve_distribution(pi, std::span<const TransitionMatrix>(seq));
    REQUIRE(is_distribution(out));
    REQUIRE((out.array() >= 0.0).all());
  }
}

TEST_CASE("property: infection probability monotone in protection and contacts") {
  RandomSource rs(103);
  for (int c = 0; c < 2000; ++c) {
    const double beta = 0.01 + 0.3 * rs.uniform();
    const auto u = static_cast<std::uint32_t>(rs.uniform_index(8));
    const auto rho = static_cast<std::uint32_t>(1 + rs.uniform_index(12));
    const double here = infection_probability(beta, valid_infected_neighbors(u, rho));
    REQUIRE(infection_probability(beta, valid_infected_neighbors(u + 1, rho)) < here);
    REQUIRE(infection_probability(beta, valid_infected_neighbors(u, rho + 1)) > here);
  }
}

TEST_CASE("step examples") {
  RandomSource rs(104);
  Network net = generate_ws({50, 2, 0.2}, rs);
  const EpidemicParams p = discrete(0.9, 0.5, 0.5);
  for (int k = 0; k < 100; ++k) REQUIRE(step_network(net, p, rs) == 0);

  Network path;
  const NodeId a = path.add_node(), b = path.add_node(NodeState::kInfected), c = path.add_node();
  path.add_edge(a, b);
  path.add_edge(b, c);
  CHECK(step_network(path, discrete(0.0, 1.0, 0.3), rs) == 1);
  CHECK(path.state(a) == NodeState::kSusceptible);
  CHECK(path.state(b) == NodeState::kRecovered);
  CHECK(path.state(c) == NodeState::kSusceptible);
}

TEST_CASE("property: beta = 0 never creates an infection") {
  RandomSource rs(105);
  for (int c = 0; c < 1000; ++c) {
    Network net = generate_ws({30, 2, 0.5}, rs);
    for (std::size_t s = 0; s < net.node_count(); ++s)
      net.set_state(net.node_at(s), static_cast<NodeState>(rs.uniform_index(3)));
    IndividualChain chain(net);
    const EpidemicParams p = discrete(0.0, rs.uniform(), rs.uniform());
    for (int step = 0; step < 10; ++step) {
      std::vector<NodeState> before(chain.states().begin(), chain.states().end());
      chain.step(p, rs);
      for (std::size_t s = 0; s < chain.size(); ++s)
        if (chain.states()[s] == NodeState::kInfected) REQUIRE(before[s] == NodeState::kInfected);
    }
  }
}

TEST_CASE("synchronous update uses the pre-step snapshot") {
  // Path a - b - c with b infected, beta = 1, gamma = 1: both ends catch it
  // from b even though b recovers in the same step.
  Network net;
  const NodeId a = net.add_node(), b = net.add_node(NodeState::kInfected), c = net.add_node();
  net.add_edge(a, b);
  net.add_edge(b, c);
  RandomSource rs(106);
  CHECK(step_network(net, discrete(1.0, 1.0, 0.0), rs) == 3);
  CHECK(net.state(a) == NodeState::kInfected);
  CHECK(net.state(b) == NodeState::kRecovered);
  CHECK(net.state(c) == NodeState::kInfected);
}

TEST_CASE("small graph agrees with the enumerated product chain") {
  // Triangle-free path 0 - 1 - 2, node 1 protected (u = 1).
  const EpidemicParams p = discrete(0.4, 0.3, 0.25);
  const std::array<std::uint32_t, 3> u{0, 1, 0};
  const std::array<std::vector<int>, 3> nb{std::vector<int>{1}, std::vector<int>{0, 2}, std::vector<int>{1}};
  constexpr int kStates = 27, kSteps = 5, kReps = 200000;

  auto digit = [](int code, int j) {
    for (int k = 0; k < j; ++k) code /= 3;
    return code % 3;
  };
  std::array<double, kStates> exact{};
  exact[1 * 3] = 1.0;  // node 1 infected, others susceptible
  for (int step = 0; step < kSteps; ++step) {
    std::array<double, kStates> next{};
    for (int x = 0; x < kStates; ++x) {
      if (exact[x] == 0.0) continue;
      for (int y = 0; y < kStates; ++y) {
        double prob = exact[x];
        for (int j = 0; j < 3; ++j) {
          const int from = digit(x, j), to = digit(y, j);
          int inf = 0;
          for (int v : nb[j]) inf += digit(x, v) == 1;
          const double q = 1.0 - std::pow(1.0 - p.beta, std::exp(-static_cast<double>(u[j])) * inf);
          double t = 0.0;
          if (from == 0) t = to == 0 ? 1.0 - q : to == 1 ? q : 0.0;
          if (from == 1) t = to == 1 ? 1.0 - p.gamma : to == 2 ? p.gamma : 0.0;
          if (from == 2) t = to == 2 ? 1.0 - p.alpha : to == 0 ? p.alpha : 0.0;
          prob *= t;
        }
        next[y] += prob;
      }
    }
    exact = next;
  }

  Network net;
  for (int j = 0; j < 3; ++j) net.add_node(j == 1 ? NodeState::kInfected : NodeState::kSusceptible, u[j]);
  net.add_edge(net.node_at(0), net.node_at(1));
  net.add_edge(net.node_at(1), net.node_at(2));
  const IndividualChain start(net);
  RandomSource rs(107);
  std::array<double, kStates> freq{};
  for (int rep = 0; rep < kReps; ++rep) {
    IndividualChain chain = start;
    for (int step = 0; step < kSteps; ++step) chain.step(p, rs);
    int code = 0;
    for (int j = 2; j >= 0; --j) code = code * 3 + index_of(chain.states()[j]);
    freq[code] += 1.0 / kReps;
  }
  double tv = 0.0;
  for (int x = 0; x < kStates; ++x) tv += 0.5 * std::abs(freq[x] - exact[x]);
  CHECK(tv < 0.02);
}

TEST_CASE("fig3 experiment bookkeeping") {
  RandomSource rs(108);
  CHECK_THROWS_AS(run_fig3_experiment({100, 2, 0.5}, discrete(0.3, 0.2, 0.1), 10, 10, rs), Error);
  CHECK_THROWS_AS(run_fig3_experiment({100, 2, 0.5}, discrete(0.3, 0.2, 0.1), 10, -1, rs), Error);

  const DegreeClassStats quiet = run_fig3_experiment({200, 3, 0.5}, discrete(0.0, 1.0, 0.2), 50, 1, rs);
  for (const auto& [d, cls] : quiet.by_degree) CHECK(cls.infected_frequency == 0.0);
  CHECK(quiet.infected_density.size() == 51);

  EpidemicParams p = discrete(0.3, 0.2, 0.1);
  p.protect_intensity = 1.0;
  const DegreeClassStats st = run_fig3_experiment({300, 3, 0.5}, p, 200, 100, rs);
  std::size_t nodes = 0;
  for (const auto& [d, cls] : st.by_degree) {
    nodes += cls.node_count;
    CHECK(cls.infected_frequency >= 0.0);
    CHECK(cls.infected_frequency <= 1.0);
    CHECK(cls.low_sample == (cls.node_count < 3));
  }
  CHECK(nodes == 300);
  std::ostringstream os;
  write_degree_class_csv(os, st);
  CHECK(os.str().rfind("degree,count,infected_frequency\n", 0) == 0);
}
