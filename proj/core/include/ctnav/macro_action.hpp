#pragma once

#include <set>
#include <string>
#include <variant>
#include <vector>

#include "ctnav/graph.hpp"

namespace ctnav {

// Traverse `path` (KnownOnly-admissible) to the agent's goal.
struct NavigateGoal {
  std::vector<NodeId> path;
  bool operator==(const NavigateGoal&) const = default;
};

// Traverse `path` ending at a node adjacent to `target`, then observe it.
struct NavigateAndSense {
  std::vector<NodeId> path;
  int target{};  // stochastic index
  bool operator==(const NavigateAndSense&) const = default;
};

struct Wait {
  double duration{};
  bool operator==(const Wait&) const = default;
};

using MacroAction = std::variant<NavigateGoal, NavigateAndSense, Wait>;

struct AgentSpec {
  std::string id;
  double speed{1.0};  // meters/second
  NodeId start{};
  NodeId goal{};
  double sense_duration{0.0};  // seconds
};

inline bool is_wait(const MacroAction& m) { return std::holds_alternative<Wait>(m); }

double path_length(const NavGraph& g, const std::vector<NodeId>& path);
double macro_path_length(const NavGraph& g, const MacroAction& m);

// Candidate order: NavigateGoal, then NavigateAndSense by (stochastic index,
// endpoint id), then Wait. Empty when the agent is at its goal and no Unknown
// edge remains.
std::vector<MacroAction> enumerate_candidates(const NavGraph& g, const EdgeBelief& b,
                                              const AgentSpec& agent, NodeId at,
                                              double wait_quantum);

// Lower bound on the agent's own time-to-goal when executing `m` and assuming
// everything thereafter is optimally favorable. +inf when the goal is
// optimistically unreachable.
double optimistic_bound(const MacroAction& m, const NavGraph& g, const EdgeBelief& b,
                        const AgentSpec& agent, NodeId at);

// Unknown edges whose revelation as traversable could strictly reduce some
// agent's KnownOnly cost: an edge is kept when the optimistic cost routed
// through it beats the agent's current KnownOnly cost.
std::set<int> relevant_unknown_edges(const NavGraph& g, const EdgeBelief& b,
                                     const std::vector<std::pair<AgentSpec, NodeId>>& team);

// Drops senses of irrelevant edges and candidates whose optimistic bound
// exceeds the team upper bound. NavigateGoal always survives; order preserved.
std::vector<MacroAction> prune(std::vector<MacroAction> candidates, const NavGraph& g,
                               const EdgeBelief& b, const AgentSpec& agent, NodeId at,
                               const std::set<int>& relevant, double team_upper_bound);

}  // namespace ctnav
