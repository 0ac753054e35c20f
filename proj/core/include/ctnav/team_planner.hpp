#pragma once

#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "ctnav/executor.hpp"
#include "ctnav/macro_action.hpp"

namespace ctnav {

struct AgentState {
  AgentSpec spec;
  NodeId current{};
  double elapsed{};  // wall time consumed so far (seconds)
  bool done{};
};

struct TeamState {
  std::vector<AgentState> agents;
  EdgeBelief belief;
};

enum class PlannerMode { Collaborative, Independent };

struct PlannerParams {
  int rollout_count{256};
  double wait_quantum{10.0};
  std::uint64_t seed{0};
  PlannerMode mode{PlannerMode::Collaborative};
  int threads{1};  // candidate evaluation only; never changes the result
};

// One macro per agent, aligned with TeamState::agents; nullopt = no action
// (done agents).
using JointAssignment = std::vector<std::optional<MacroAction>>;

// Centralized expected-makespan-minimizing joint plan via common-random-number
// Monte Carlo rollouts. Throws PlanningStuckError on infeasible instances.
JointAssignment plan_joint(const NavGraph& g, const TeamState& s, const PlannerParams& p);

// Non-collaborative baseline: each agent plans alone, no Wait, senses only
// edges relevant to its own routes.
JointAssignment plan_independent(const NavGraph& g, const TeamState& s, const PlannerParams& p);

// Team makespan estimate for one sampled world: executes the joint assignment
// at graph fidelity until the first macro completes, applies interrupt
// cut-point semantics, then continues every agent with the optimistic
// replanning base policy (free adjacent sensing) until all goals are reached.
double rollout_value(const NavGraph& g, const TeamState& s, const JointAssignment& joint,
                     const WorldSample& w, const PlannerParams& p);

// True when refining the belief from `before` to `after` could change this
// agent's best remaining plan from `node`. Moving agents only react to
// improvements (a cheaper optimistic or certain route); a waiting agent is
// idle precisely to hear news, so any cost change recalls it.
bool report_warrants_interrupt(const NavGraph& g, const EdgeBelief& before,
                               const EdgeBelief& after, NodeId node, NodeId goal, bool waiting);

struct OracleLimits {
  int max_unknown{2};
  int max_nodes{8};
};

struct PolicyNode {
  EdgeBelief belief;
  std::vector<NodeId> nodes;
  JointAssignment joint;
  // Children keyed by the epoch's revealed observations (sorted by edge).
  std::vector<std::pair<std::vector<std::pair<int, bool>>, std::shared_ptr<PolicyNode>>> children;
};

struct OracleResult {
  double value{};
  std::shared_ptr<PolicyNode> policy;
};

// Exact optimal expected makespan by exhaustive world enumeration and full
// joint-macro-action decision-tree search. Throws LimitExceeded outside the
// stated limits.
OracleResult oracle_expected_makespan(const NavGraph& g, const TeamState& s,
                                      const OracleLimits& limits = {},
                                      double wait_quantum = 10.0);

namespace detail {

// One decision epoch at graph fidelity and zero message delay: all assigned
// macros start together; the first natural completion interrupts the rest.
struct EpochAgent {
  bool active{};
  double end_time{};
  NodeId node{};
  double distance{};
  double wait_time{};
  std::vector<std::pair<int, bool>> observations;
  std::vector<double> goal_arrivals;
};

struct EpochResult {
  std::vector<EpochAgent> agents;
  double epoch_end{};
  int first_reporter{-1};  // active agent whose macro completes first
};

// With `interrupts` false every macro runs to its natural end instead of
// being cut at the first completion.
EpochResult simulate_epoch(const NavGraph& g, const EdgeBelief& b, const WorldSample& w,
                           const std::vector<AgentState>& agents, const JointAssignment& joint,
                           bool interrupts = true);

}  // namespace detail

}  // namespace ctnav
