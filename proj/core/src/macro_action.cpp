#include "ctnav/macro_action.hpp"

#include <algorithm>
#include <limits>

namespace ctnav {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double optimistic_cost(const NavGraph& g, const EdgeBelief& b, NodeId from, NodeId to) {
  auto p = shortest_path(g, b, PathMode::Optimistic, from, to);
  return p ? p->cost : kInf;
}
}  // namespace

double path_length(const NavGraph& g, const std::vector<NodeId>& path) {
  double len = 0;
  for (std::size_t i = 1; i < path.size(); ++i) {
    int e = g.edge_between(path[i - 1], path[i]);
    len += g.edge(e).length;
  }
  return len;
}

double macro_path_length(const NavGraph& g, const MacroAction& m) {
  if (const auto* ng = std::get_if<NavigateGoal>(&m)) return path_length(g, ng->path);
  if (const auto* ns = std::get_if<NavigateAndSense>(&m)) return path_length(g, ns->path);
  return 0.0;
}

std::vector<MacroAction> enumerate_candidates(const NavGraph& g, const EdgeBelief& b,
                                              const AgentSpec& agent, NodeId at,
                                              double wait_quantum) {
  std::vector<MacroAction> out;
  if (at != agent.goal) {
    if (auto p = shortest_path(g, b, PathMode::KnownOnly, at, agent.goal)) {
      out.push_back(NavigateGoal{std::move(p->path)});
    }
  }

  bool any_unknown = false;
  for (int si = 0; si < g.stoch_count(); ++si) {
    if (b.status[si] != EdgeStatus::Unknown) continue;
    any_unknown = true;
    const Edge& e = g.edge(g.stoch_edge(si));
    struct Cand {
      NodeId endpoint;
      PathResult path;
    };
    std::vector<Cand> cands;
    for (NodeId w : {std::min(e.u, e.v), std::max(e.u, e.v)}) {
      if (auto p = shortest_path(g, b, PathMode::KnownOnly, at, w)) {
        cands.push_back({w, std::move(*p)});
      }
    }
    if (cands.size() == 2 && std::abs(cands[0].path.cost - cands[1].path.cost) <= 1e-9) {
      cands.pop_back();  // equal cost: keep the smaller endpoint id
    }
    std::sort(cands.begin(), cands.end(),
              [](const Cand& a, const Cand& c) { return a.endpoint < c.endpoint; });
    for (auto& c : cands) {
      out.push_back(NavigateAndSense{std::move(c.path.path), si});
    }
  }

  if (any_unknown) out.push_back(Wait{wait_quantum});
  return out;
}

double optimistic_bound(const MacroAction& m, const NavGraph& g, const EdgeBelief& b,
                        const AgentSpec& agent, NodeId at) {
  if (const auto* ng = std::get_if<NavigateGoal>(&m)) {
    return path_length(g, ng->path) / agent.speed;
  }
  if (const auto* ns = std::get_if<NavigateAndSense>(&m)) {
    NodeId endpoint = ns->path.back();
    double rest = optimistic_cost(g, b, endpoint, agent.goal);
    return path_length(g, ns->path) / agent.speed + agent.sense_duration + rest / agent.speed;
  }
  const auto& w = std::get<Wait>(m);
  return w.duration + optimistic_cost(g, b, at, agent.goal) / agent.speed;
}

std::set<int> relevant_unknown_edges(const NavGraph& g, const EdgeBelief& b,
                                     const std::vector<std::pair<AgentSpec, NodeId>>& team) {
  std::set<int> out;
  for (const auto& [agent, at] : team) {
    auto ko = shortest_path(g, b, PathMode::KnownOnly, at, agent.goal);
    double ko_cost = ko ? ko->cost : kInf;
    for (int si = 0; si < g.stoch_count(); ++si) {
      if (b.status[si] != EdgeStatus::Unknown || out.count(si)) continue;
      const Edge& e = g.edge(g.stoch_edge(si));
      double through = std::min(
          optimistic_cost(g, b, at, e.u) + e.length + optimistic_cost(g, b, e.v, agent.goal),
          optimistic_cost(g, b, at, e.v) + e.length + optimistic_cost(g, b, e.u, agent.goal));
      if (through < ko_cost - 1e-9) out.insert(si);
    }
  }
  return out;
}

std::vector<MacroAction> prune(std::vector<MacroAction> candidates, const NavGraph& g,
                               const EdgeBelief& b, const AgentSpec& agent, NodeId at,
                               const std::set<int>& relevant, double team_upper_bound) {
  std::vector<MacroAction> out;
  for (auto& m : candidates) {
    if (std::holds_alternative<NavigateGoal>(m)) {
      out.push_back(std::move(m));
      continue;
    }
    if (const auto* ns = std::get_if<NavigateAndSense>(&m)) {
      if (!relevant.count(ns->target)) continue;
    }
    if (optimistic_bound(m, g, b, agent, at) > team_upper_bound + 1e-9) continue;
    out.push_back(std::move(m));
  }
  return out;
}

}  // namespace ctnav
