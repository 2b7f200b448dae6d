#include "sirs/network.hpp"

#include <algorithm>
#include <ostream>
#include <unordered_set>

namespace sirs {

void validate_ws(const WsConfig& cfg) {
  if (cfg.k_init < 1) throw Error(ErrorCode::kConfigError, "k_init", "must be >= 1");
  if (cfg.n0 <= 2 * cfg.k_init)
    throw Error(ErrorCode::kConfigError, "n0", "must exceed 2 * k_init");
  if (!(cfg.rewire_prob >= 0.0 && cfg.rewire_prob <= 1.0))
    throw Error(ErrorCode::kConfigError, "rewire_prob", "must lie in [0, 1]");
}

Network::Node& Network::node(NodeId id) {
  auto it = slot_.find(id);
  if (it == slot_.end()) throw Error(ErrorCode::kUnknownNode, std::to_string(id));
  return nodes_[it->second];
}

const Network::Node& Network::node(NodeId id) const {
  auto it = slot_.find(id);
  if (it == slot_.end()) throw Error(ErrorCode::kUnknownNode, std::to_string(id));
  return nodes_[it->second];
}

std::size_t Network::slot_of(NodeId id) const {
  auto it = slot_.find(id);
  if (it == slot_.end()) throw Error(ErrorCode::kUnknownNode, std::to_string(id));
  return it->second;
}

NodeId Network::add_node(NodeState state, std::uint32_t protection) {
  const NodeId id = next_id_++;
  slot_.emplace(id, nodes_.size());
  nodes_.push_back(Node{id, state, protection, {}});
  return id;
}

namespace {

bool erase_value(std::vector<NodeId>& v, NodeId x) {
  auto it = std::find(v.begin(), v.end(), x);
  if (it == v.end()) return false;
  *it = v.back();
  v.pop_back();
  return true;
}

}  // namespace

std::size_t Network::remove_node(NodeId id) {
  const std::size_t slot = slot_of(id);
  std::vector<NodeId> nbrs = std::move(nodes_[slot].nbrs);
  for (NodeId n : nbrs) erase_value(node(n).nbrs, id);
  edges_ -= nbrs.size();

  const std::size_t last = nodes_.size() - 1;
  if (slot != last) {
    nodes_[slot] = std::move(nodes_[last]);
    slot_[nodes_[slot].id] = slot;
  }
  nodes_.pop_back();
  slot_.erase(id);
  return nbrs.size();
}

bool Network::has_edge(NodeId a, NodeId b) const {
  const auto& na = node(a).nbrs;
  const auto& nb = node(b).nbrs;
  // Scan the shorter list.
  if (na.size() <= nb.size()) return std::find(na.begin(), na.end(), b) != na.end();
  return std::find(nb.begin(), nb.end(), a) != nb.end();
}

bool Network::add_edge(NodeId a, NodeId b) {
  if (a == b || has_edge(a, b)) return false;
  node(a).nbrs.push_back(b);
  node(b).nbrs.push_back(a);
  ++edges_;
  return true;
}

bool Network::remove_edge(NodeId a, NodeId b) {
  if (a == b || !erase_value(node(a).nbrs, b)) return false;
  erase_value(node(b).nbrs, a);
  --edges_;
  return true;
}

std::size_t Network::degree_sum() const {
  std::size_t sum = 0;
  for (const auto& n : nodes_) sum += n.nbrs.size();
  return sum;
}

bool Network::check_invariants() const {
  if (slot_.size() != nodes_.size()) return false;
  std::size_t sum = 0;
  for (std::size_t s = 0; s < nodes_.size(); ++s) {
    const Node& n = nodes_[s];
    auto it = slot_.find(n.id);
    if (it == slot_.end() || it->second != s || n.id >= next_id_) return false;
    std::unordered_set<NodeId> seen;
    for (NodeId m : n.nbrs) {
      if (m == n.id || !seen.insert(m).second || !contains(m)) return false;
      const auto& back = node(m).nbrs;
      if (std::find(back.begin(), back.end(), n.id) == back.end()) return false;
    }
    sum += n.nbrs.size();
  }
  return sum == 2 * edges_;
}

Network generate_ws(const WsConfig& cfg, RandomSource& rs) {
  validate_ws(cfg);
  Network net;
  const auto n = static_cast<std::size_t>(cfg.n0);
  for (std::size_t i = 0; i < n; ++i) net.add_node();
  // Fresh network: ids coincide with 0..n-1.
  for (int j = 1; j <= cfg.k_init; ++j)
    for (std::size_t u = 0; u < n; ++u) net.add_edge(u, (u + j) % n);

  for (int j = 1; j <= cfg.k_init; ++j) {
    for (std::size_t u = 0; u < n; ++u) {
      const NodeId v = (u + j) % n;
      if (!rs.bernoulli(cfg.rewire_prob)) continue;
      if (net.degree(u) >= n - 1) continue;  // no legal target
      NodeId w;
      do {
        w = rs.uniform_index(n);
      } while (w == u || net.has_edge(u, w));
      net.remove_edge(u, v);
      net.add_edge(u, w);
    }
  }
  return net;
}

NodeId node_arrival(Network& net, int m, RandomSource& rs,
                    double protect_intensity) {
  if (m < 1) throw Error(ErrorCode::kConfigError, "m", "must be >= 1");
  const std::size_t n = net.node_count();
  if (n < static_cast<std::size_t>(m))
    throw Error(ErrorCode::kTooFewNodes, "m",
                std::to_string(n) + " nodes available, " + std::to_string(m) +
                    " required");

  // Rejection sampling of m distinct slots; m is small relative to n.
  std::vector<NodeId> targets;
  targets.reserve(m);
  while (targets.size() < static_cast<std::size_t>(m)) {
    const NodeId t = net.node_at(rs.uniform_index(n));
    if (std::find(targets.begin(), targets.end(), t) == targets.end())
      targets.push_back(t);
  }
  const auto u = static_cast<std::uint32_t>(sample_poisson(rs, protect_intensity));
  const NodeId id = net.add_node(NodeState::kSusceptible, u);
  for (NodeId t : targets) net.add_edge(id, t);
  return id;
}

std::size_t node_departure(Network& net, NodeId id) { return net.remove_node(id); }

std::size_t DegreeHistogram::total() const {
  std::size_t t = 0;
  for (const auto& [d, c] : counts) t += c;
  return t;
}

DegreeHistogram degree_histogram(const Network& net) {
  DegreeHistogram h;
  std::size_t sum = 0;
  for (std::size_t s = 0; s < net.node_count(); ++s) {
    const std::size_t d = net.degree(net.node_at(s));
    ++h.counts[d];
    sum += d;
  }
  if (net.node_count() > 0)
    h.mean_degree = static_cast<double>(sum) / static_cast<double>(net.node_count());
  return h;
}

SlotAdjacency slot_adjacency(const Network& net) {
  SlotAdjacency adj;
  const std::size_t n = net.node_count();
  adj.offsets.resize(n + 1, 0);
  for (std::size_t s = 0; s < n; ++s)
    adj.offsets[s + 1] = adj.offsets[s] + net.degree(net.node_at(s));
  adj.targets.resize(adj.offsets[n]);
  for (std::size_t s = 0; s < n; ++s) {
    std::size_t k = adj.offsets[s];
    for (NodeId m : net.neighbors(net.node_at(s)))
      adj.targets[k++] = static_cast<std::uint32_t>(net.slot_of(m));
  }
  return adj;
}

void write_edge_list_csv(std::ostream& os, const Network& net) {
  os << "src,dst\n";
  for (std::size_t s = 0; s < net.node_count(); ++s) {
    const NodeId a = net.node_at(s);
    std::vector<NodeId> nbrs(net.neighbors(a).begin(), net.neighbors(a).end());
    std::sort(nbrs.begin(), nbrs.end());
    for (NodeId b : nbrs)
      if (a < b) os << a << ',' << b << '\n';
  }
}

void write_degree_histogram_csv(std::ostream& os, const DegreeHistogram& h) {
  os << "degree,count\n";
  for (const auto& [d, c] : h.counts) os << d << ',' << c << '\n';
}

}  // namespace sirs
