#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <unordered_map>
#include <vector>

#include "sirs/core.hpp"

namespace sirs {

using NodeId = std::uint64_t;

/// Watts-Strogatz parameters. `k_init` counts ring neighbours per side, so
/// the unrewired lattice has degree 2 * k_init.
struct WsConfig {
  int n0 = 1000;
  int k_init = 5;
  double rewire_prob = 0.5;

  bool operator==(const WsConfig&) const = default;
};

void validate_ws(const WsConfig& cfg);

/// Mutable undirected simple graph with per-node epidemic state and
/// protection degree. Ids are handed out monotonically and never reused.
///
/// Nodes live in a dense vector (swap-remove on departure), so `node_at(i)`
/// gives O(1) uniform selection; an id -> slot map resolves ids.
class Network {
 public:
  Network() = default;

  NodeId add_node(NodeState state = NodeState::kSusceptible,
                  std::uint32_t protection = 0);

  /// Removes the node and all incident edges; returns its former degree.
  std::size_t remove_node(NodeId id);

  /// Adds an undirected edge; false for self-loops or existing edges.
  bool add_edge(NodeId a, NodeId b);
  bool remove_edge(NodeId a, NodeId b);
  bool has_edge(NodeId a, NodeId b) const;

  bool contains(NodeId id) const { return slot_.count(id) != 0; }
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_; }
  NodeId next_id() const { return next_id_; }

  /// Slot-order access; slots are dense in [0, node_count()).
  NodeId node_at(std::size_t slot) const { return nodes_[slot].id; }
  std::size_t slot_of(NodeId id) const;

  std::size_t degree(NodeId id) const { return node(id).nbrs.size(); }
  std::span<const NodeId> neighbors(NodeId id) const { return node(id).nbrs; }

  NodeState state(NodeId id) const { return node(id).state; }
  void set_state(NodeId id, NodeState s) { node(id).state = s; }
  std::uint32_t protection(NodeId id) const { return node(id).protection; }
  void set_protection(NodeId id, std::uint32_t u) { node(id).protection = u; }

  /// Σ degree; equals 2 * edge_count() whenever the structure is intact.
  std::size_t degree_sum() const;

  /// Full structural self-check (symmetry, no loops, no duplicates,
  /// endpoints exist, edge counter consistent).
  bool check_invariants() const;

 private:
  struct Node {
    NodeId id;
    NodeState state;
    std::uint32_t protection;
    std::vector<NodeId> nbrs;
  };

  Node& node(NodeId id);
  const Node& node(NodeId id) const;

  std::vector<Node> nodes_;
  std::unordered_map<NodeId, std::size_t> slot_;
  NodeId next_id_ = 0;
  std::size_t edges_ = 0;
};

/// Ring lattice with k_init neighbours on each side, then every lattice edge
/// (u, u+j) rewired with probability rewire_prob to a uniform endpoint that
/// is neither u nor an existing neighbour of u. All nodes start Susceptible
/// with protection 0. Throws kConfigError when n0 <= 2 * k_init.
Network generate_ws(const WsConfig& cfg, RandomSource& rs);

/// Adds one Susceptible node with a Poisson(protect_intensity) protection
/// degree and links it to m distinct existing nodes chosen uniformly.
/// Throws kTooFewNodes when fewer than m nodes exist.
NodeId node_arrival(Network& net, int m, RandomSource& rs,
                    double protect_intensity = 0.0);

/// Throws kUnknownNode when the id is absent.
std::size_t node_departure(Network& net, NodeId id);

struct DegreeHistogram {
  std::map<std::size_t, std::size_t> counts;
  double mean_degree = 0.0;

  std::size_t total() const;
};

DegreeHistogram degree_histogram(const Network& net);

/// Compressed neighbour lists indexed by slot, for kernels that need a
/// frozen view of a static graph.
struct SlotAdjacency {
  std::vector<std::size_t> offsets;
  std::vector<std::uint32_t> targets;

  std::size_t size() const { return offsets.empty() ? 0 : offsets.size() - 1; }
  std::span<const std::uint32_t> row(std::size_t slot) const {
    return {targets.data() + offsets[slot], offsets[slot + 1] - offsets[slot]};
  }
};

SlotAdjacency slot_adjacency(const Network& net);

/// `src,dst` header then one line per edge, src < dst.
void write_edge_list_csv(std::ostream& os, const Network& net);
/// `degree,count` header then ascending degrees.
void write_degree_histogram_csv(std::ostream& os, const DegreeHistogram& h);

}  // namespace sirs
