#pragma once

// Seeded random-instance generator: small graphs (4-8 nodes) whose
// deterministic edges form a spanning tree (goals always reachable in the
// worst case) plus one or two stochastic shortcut edges, and two agents with
// a 2x-8x speed ratio.

#include <random>
#include <set>
#include <vector>

#include "ctnav/graph.hpp"
#include "ctnav/macro_action.hpp"

namespace testsupport {

struct Instance {
  ctnav::NavGraph graph;
  std::vector<ctnav::AgentSpec> agents;
};

inline Instance make_instance(std::uint64_t seed) {
  using namespace ctnav;
  std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ULL + 1);
  auto uniform = [&](double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  };
  auto pick = [&](int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); };

  int n = 4 + pick(5);  // 4..8 nodes
  std::vector<std::string> names;
  std::vector<Vec2> positions;
  for (int i = 0; i < n; ++i) {
    names.push_back("N" + std::to_string(i));
    positions.push_back({uniform(0.0, 100.0), uniform(0.0, 100.0)});
  }

  std::vector<Edge> edges;
  std::set<std::pair<int, int>> have;
  for (int i = 1; i < n; ++i) {
    int p = pick(i);
    edges.push_back(Edge{p, i, distance(positions[p], positions[i]), std::nullopt});
    have.insert({std::min(p, i), std::max(p, i)});
  }
  int shortcuts = 1 + pick(2);  // 1..2 stochastic edges
  for (int k = 0; k < shortcuts; ++k) {
    for (int attempt = 0; attempt < 20; ++attempt) {
      int a = pick(n), b = pick(n);
      if (a == b) continue;
      auto key = std::make_pair(std::min(a, b), std::max(a, b));
      if (have.count(key)) continue;
      have.insert(key);
      // A shortcut noticeably cheaper than the tree route keeps the decision
      // of whether to gamble on it interesting.
      double len = distance(positions[a], positions[b]);
      edges.push_back(Edge{key.first, key.second, std::max(len * 0.5, 1.0), uniform(0.2, 0.8)});
      break;
    }
  }

  Instance inst{NavGraph::build(std::move(names), std::move(positions), std::move(edges)), {}};
  int s0 = pick(n), g0 = pick(n), s1 = pick(n), g1 = pick(n);
  inst.agents.push_back(AgentSpec{"slow", 1.0, s0, g0, 0.0});
  inst.agents.push_back(AgentSpec{"fast", 2.0 + pick(7), s1, g1, 0.0});
  return inst;
}

}  // namespace testsupport
