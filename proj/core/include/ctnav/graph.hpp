#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ctnav/errors.hpp"

namespace ctnav {

using NodeId = int;

struct Vec2 {
  double x{};
  double y{};
};

inline double distance(Vec2 a, Vec2 b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

struct Edge {
  NodeId u{};
  NodeId v{};
  double length{};
  std::optional<double> rho;  // P(untraversable); present iff stochastic

  bool stochastic() const { return rho.has_value(); }
  NodeId other(NodeId n) const { return n == u ? v : u; }
};

// Undirected navigation graph with deterministic and stochastic edges.
// Node ids are strings in the input file, mapped to dense ints in input order.
class NavGraph {
 public:
  // Parses and validates the JSON graph file format.
  static NavGraph load(const std::string& text);

  // Builds from parts with full validation.
  static NavGraph build(std::vector<std::string> names, std::vector<Vec2> positions,
                        std::vector<Edge> edges);
  // Builds without invariant checks (test fixtures only, e.g. degenerate rho).
  static NavGraph build_unchecked(std::vector<std::string> names, std::vector<Vec2> positions,
                                  std::vector<Edge> edges);

  int node_count() const { return static_cast<int>(names_.size()); }
  const std::string& node_name(NodeId n) const { return names_[n]; }
  Vec2 node_pos(NodeId n) const { return positions_[n]; }
  std::optional<NodeId> find_node(const std::string& name) const;

  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(int e) const { return edges_[e]; }
  int edge_between(NodeId a, NodeId b) const;  // -1 if absent

  // Stochastic edges are indexed densely in edge order.
  int stoch_count() const { return static_cast<int>(stoch_edges_.size()); }
  int stoch_edge(int si) const { return stoch_edges_[si]; }
  int stoch_index(int edge) const { return stoch_index_of_edge_[edge]; }

  // (neighbor node, edge index) pairs, in edge input order.
  const std::vector<std::pair<NodeId, int>>& neighbors(NodeId n) const { return adj_[n]; }

 private:
  void finish(bool validate);

  std::vector<std::string> names_;
  std::vector<Vec2> positions_;
  std::vector<Edge> edges_;
  std::vector<int> stoch_edges_;
  std::vector<int> stoch_index_of_edge_;
  std::vector<std::vector<std::pair<NodeId, int>>> adj_;
};

enum class EdgeStatus : std::uint8_t { Unknown, KnownTraversable, KnownBlocked };

// Team knowledge about the stochastic edges, indexed by stochastic index.
struct EdgeBelief {
  std::vector<EdgeStatus> status;

  static EdgeBelief all_unknown(const NavGraph& g) {
    return EdgeBelief{std::vector<EdgeStatus>(g.stoch_count(), EdgeStatus::Unknown)};
  }

  int unknown_count() const;
  bool operator==(const EdgeBelief&) const = default;
};

// Ground truth for one trial; fixed for the trial's duration.
struct WorldSample {
  std::vector<bool> blocked;  // by stochastic index
  std::uint64_t seed{};
};

enum class PathMode { Optimistic, KnownOnly };

struct PathResult {
  std::vector<NodeId> path;
  double cost{};
};

// True when the edge may be traversed under the given belief and mode.
bool edge_admissible(const NavGraph& g, const EdgeBelief& b, PathMode mode, int edge);

// Belief-conditioned shortest path. Ties broken by fewer edges, then the
// lexicographically smallest node-id sequence. nullopt = unreachable.
std::optional<PathResult> shortest_path(const NavGraph& g, const EdgeBelief& b, PathMode mode,
                                        NodeId from, NodeId to);

// Samples per-edge ground truth consistent with the belief; deterministic in
// (graph, belief, seed).
WorldSample sample_world(const NavGraph& g, const EdgeBelief& b, std::uint64_t seed);

// Records an observation. Throws ObservationConflict if the edge is already
// known with the opposite status; idempotent otherwise.
void apply_observation(EdgeBelief& b, int stoch_idx, bool traversable);

}  // namespace ctnav
