#include "ctnav/graph.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <queue>
#include <random>
#include <set>

#include <nlohmann/json.hpp>

namespace ctnav {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kCostEps = 1e-9;
}  // namespace

std::optional<NodeId> NavGraph::find_node(const std::string& name) const {
  for (int i = 0; i < node_count(); ++i) {
    if (names_[i] == name) return i;
  }
  return std::nullopt;
}

int NavGraph::edge_between(NodeId a, NodeId b) const {
  for (const auto& [n, e] : adj_[a]) {
    if (n == b) return e;
  }
  return -1;
}

NavGraph NavGraph::build(std::vector<std::string> names, std::vector<Vec2> positions,
                         std::vector<Edge> edges) {
  NavGraph g;
  g.names_ = std::move(names);
  g.positions_ = std::move(positions);
  g.edges_ = std::move(edges);
  g.finish(/*validate=*/true);
  return g;
}

NavGraph NavGraph::build_unchecked(std::vector<std::string> names, std::vector<Vec2> positions,
                                   std::vector<Edge> edges) {
  NavGraph g;
  g.names_ = std::move(names);
  g.positions_ = std::move(positions);
  g.edges_ = std::move(edges);
  g.finish(/*validate=*/false);
  return g;
}

void NavGraph::finish(bool validate) {
  const int n = node_count();
  if (validate) {
    if (n == 0) throw ValidationError("graph has no nodes");
    std::set<std::string> seen;
    for (const auto& name : names_) {
      if (!seen.insert(name).second) {
        throw ValidationError("duplicate node id '" + name + "'");
      }
    }
    std::set<std::pair<NodeId, NodeId>> pairs;
    for (const Edge& e : edges_) {
      if (e.u < 0 || e.u >= n || e.v < 0 || e.v >= n) {
        throw ValidationError("edge references unknown node");
      }
      if (e.u == e.v) {
        throw ValidationError("self-loop at node '" + names_[e.u] + "'");
      }
      auto key = std::minmax(e.u, e.v);
      if (!pairs.insert(key).second) {
        throw ValidationError("duplicate edge " + names_[e.u] + "-" + names_[e.v]);
      }
      if (!(e.length > 0)) {
        throw ValidationError("non-positive length on edge " + names_[e.u] + "-" + names_[e.v]);
      }
      if (e.rho && !(*e.rho > 0.0 && *e.rho < 1.0)) {
        throw ValidationError("rho out of range on edge " + names_[e.u] + "-" + names_[e.v]);
      }
    }
  }

  stoch_index_of_edge_.assign(edges_.size(), -1);
  adj_.assign(n, {});
  for (int i = 0; i < static_cast<int>(edges_.size()); ++i) {
    const Edge& e = edges_[i];
    if (e.stochastic()) {
      stoch_index_of_edge_[i] = static_cast<int>(stoch_edges_.size());
      stoch_edges_.push_back(i);
    }
    adj_[e.u].emplace_back(e.v, i);
    adj_[e.v].emplace_back(e.u, i);
  }

  if (validate) {
    // Connectivity with every edge included.
    std::vector<char> reach(n, 0);
    std::vector<NodeId> stack{0};
    reach[0] = 1;
    while (!stack.empty()) {
      NodeId u = stack.back();
      stack.pop_back();
      for (const auto& [w, e] : adj_[u]) {
        if (!reach[w]) {
          reach[w] = 1;
          stack.push_back(w);
        }
      }
    }
    for (int i = 0; i < n; ++i) {
      if (!reach[i]) throw ValidationError("graph is disconnected at node '" + names_[i] + "'");
    }
  }
}

NavGraph NavGraph::load(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed graph file: ") + e.what());
  }

  std::vector<std::string> names;
  std::vector<Vec2> positions;
  std::vector<Edge> edges;
  try {
    if (!j.contains("nodes") || !j["nodes"].is_array()) {
      throw ParseError("graph file missing 'nodes' array");
    }
    std::map<std::string, NodeId> index;
    for (const auto& jn : j["nodes"]) {
      std::string id = jn.at("id").get<std::string>();
      Vec2 p{jn.at("x").get<double>(), jn.at("y").get<double>()};
      index.emplace(id, static_cast<NodeId>(names.size()));
      names.push_back(std::move(id));
      positions.push_back(p);
    }
    for (const auto& je : j.value("edges", nlohmann::json::array())) {
      std::string su = je.at("u").get<std::string>();
      std::string sv = je.at("v").get<std::string>();
      auto iu = index.find(su);
      auto iv = index.find(sv);
      if (iu == index.end()) throw ValidationError("unknown node " + su);
      if (iv == index.end()) throw ValidationError("unknown node " + sv);
      Edge e;
      e.u = iu->second;
      e.v = iv->second;
      e.length = je.contains("length") ? je["length"].get<double>()
                                       : distance(positions[e.u], positions[e.v]);
      if (je.contains("rho")) e.rho = je["rho"].get<double>();
      edges.push_back(e);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed graph file: ") + e.what());
  }
  return build(std::move(names), std::move(positions), std::move(edges));
}

int EdgeBelief::unknown_count() const {
  return static_cast<int>(std::count(status.begin(), status.end(), EdgeStatus::Unknown));
}

bool edge_admissible(const NavGraph& g, const EdgeBelief& b, PathMode mode, int edge) {
  const Edge& e = g.edge(edge);
  if (!e.stochastic()) return true;
  switch (b.status[g.stoch_index(edge)]) {
    case EdgeStatus::KnownTraversable:
      return true;
    case EdgeStatus::KnownBlocked:
      return false;
    case EdgeStatus::Unknown:
      return mode == PathMode::Optimistic;
  }
  return false;
}

std::optional<PathResult> shortest_path(const NavGraph& g, const EdgeBelief& b, PathMode mode,
                                        NodeId from, NodeId to) {
  const int n = g.node_count();
  // Backward Dijkstra from `to`, minimizing (cost, hops).
  std::vector<double> dist(n, kInf);
  std::vector<int> hops(n, std::numeric_limits<int>::max());
  using Label = std::tuple<double, int, NodeId>;
  std::priority_queue<Label, std::vector<Label>, std::greater<>> pq;
  dist[to] = 0.0;
  hops[to] = 0;
  pq.emplace(0.0, 0, to);
  while (!pq.empty()) {
    auto [d, h, u] = pq.top();
    pq.pop();
    if (d > dist[u] + kCostEps || (d > dist[u] - kCostEps && h > hops[u])) continue;
    for (const auto& [w, e] : g.neighbors(u)) {
      if (!edge_admissible(g, b, mode, e)) continue;
      double nd = d + g.edge(e).length;
      int nh = h + 1;
      if (nd < dist[w] - kCostEps || (nd < dist[w] + kCostEps && nh < hops[w])) {
        dist[w] = nd;
        hops[w] = nh;
        pq.emplace(nd, nh, w);
      }
    }
  }
  if (dist[from] == kInf) return std::nullopt;

  // Forward walk: hops strictly decrease, smallest next node id among
  // optimal successors, so the result is the lexicographically smallest
  // min-cost, min-hop path.
  PathResult res;
  NodeId u = from;
  res.path.push_back(u);
  while (u != to) {
    NodeId best = -1;
    int best_edge = -1;
    for (const auto& [w, e] : g.neighbors(u)) {
      if (!edge_admissible(g, b, mode, e)) continue;
      if (hops[w] != hops[u] - 1) continue;
      if (std::abs(g.edge(e).length + dist[w] - dist[u]) > kCostEps) continue;
      if (best == -1 || w < best) {
        best = w;
        best_edge = e;
      }
    }
    if (best == -1) return std::nullopt;  // numerically inconsistent; treat as unreachable
    res.cost += g.edge(best_edge).length;
    u = best;
    res.path.push_back(u);
  }
  return res;
}

WorldSample sample_world(const NavGraph& g, const EdgeBelief& b, std::uint64_t seed) {
  WorldSample w;
  w.seed = seed;
  w.blocked.resize(g.stoch_count());
  std::mt19937_64 rng(seed);
  for (int si = 0; si < g.stoch_count(); ++si) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    const double rho = g.edge(g.stoch_edge(si)).rho.value_or(0.0);
    switch (b.status[si]) {
      case EdgeStatus::KnownTraversable:
        w.blocked[si] = false;
        break;
      case EdgeStatus::KnownBlocked:
        w.blocked[si] = true;
        break;
      case EdgeStatus::Unknown:
        w.blocked[si] = u < rho;
        break;
    }
  }
  return w;
}

void apply_observation(EdgeBelief& b, int stoch_idx, bool traversable) {
  EdgeStatus next = traversable ? EdgeStatus::KnownTraversable : EdgeStatus::KnownBlocked;
  EdgeStatus& cur = b.status.at(stoch_idx);
  if (cur != EdgeStatus::Unknown && cur != next) {
    throw ObservationConflict("conflicting observation for stochastic edge " +
                              std::to_string(stoch_idx));
  }
  cur = next;
}

}  // namespace ctnav
