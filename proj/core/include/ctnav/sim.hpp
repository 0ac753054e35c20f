#pragma once

#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "ctnav/executor.hpp"
#include "ctnav/team_planner.hpp"
#include "ctnav/world2d.hpp"

namespace ctnav {

enum class Fidelity { Graph, Continuous };
enum class ConflictPolicy { Halt, TrustLatest };

struct TrialConfig {
  NavGraph graph;
  std::optional<Scene> scene;  // required at continuous fidelity
  std::vector<AgentSpec> agents;
  PlannerParams planner;
  Fidelity fidelity{Fidelity::Graph};
  double message_delay{0.0};
  std::uint64_t world_seed{0};
  ConflictPolicy conflict_policy{ConflictPolicy::Halt};
  // Forces the ground truth instead of sampling (by stochastic index).
  std::optional<std::vector<bool>> world_override;

  double dt{0.1};
  double grid_resolution{0.25};
  double inflation{0.5};
  double goal_radius{3.0};
  double sense_lookahead{20.0};
  double sense_threshold{1.2};
  double retry_delta{0.5};
  long step_budget{1000000};
};

struct TrialEvent {
  double t{};
  long seq{};
  std::string kind;   // assign|report|interrupt|observe|primitive_start|primitive_end|replan
  std::string agent;  // empty for base-station events
  std::string detail_json;
};

struct AgentMetrics {
  std::string id;
  double graph_distance{};
  double wait_time{};
  NodeId final_node{};
  bool reached_goal{};
  double completion_time{};
};

struct TrialResult {
  enum class Outcome { Complete, Failed };
  Outcome outcome{Outcome::Complete};
  std::string fail_reason;
  double makespan{};
  std::vector<AgentMetrics> agents;
  std::vector<TrialEvent> events;
  std::vector<std::tuple<double, std::string, Vec2>> trajectory;  // continuous fidelity
};

// Runs one deterministic trial: plan, dispatch, execute, interrupt, replan,
// until all agents are at their goals or the trial fails.
TrialResult run_trial(const TrialConfig& cfg);

// Probability-weighted closed-loop expected makespan over all world
// realizations (graph fidelity, <= 2 unknown edges). +inf when some
// realization fails.
double exact_policy_makespan(const TrialConfig& cfg, PlannerMode mode);

// Writes <trial>_metrics.csv, <trial>_events.ndjson and, at continuous
// fidelity, <trial>_trajectory.csv into `dir`.
void write_outputs(const TrialResult& result, const TrialConfig& cfg, const std::string& dir,
                   const std::string& trial_name);

// Merges macro-report observations into the shared belief. Halt throws
// ObservationConflict; TrustLatest overwrites in report order.
void merge_observations(EdgeBelief& belief, const std::vector<MacroResult>& reports,
                        ConflictPolicy policy);

std::string planner_mode_name(PlannerMode mode);

}  // namespace ctnav
