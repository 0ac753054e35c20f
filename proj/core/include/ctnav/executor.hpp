#pragma once

#include <array>
#include <cstddef>
#include <variant>
#include <vector>

#include "ctnav/macro_action.hpp"

namespace ctnav {

struct NavigateEdgePrim {
  NodeId from{};
  NodeId to{};
  int edge{};
  bool operator==(const NavigateEdgePrim&) const = default;
};

struct ObserveEdgePrim {
  int target{};  // stochastic index
  NodeId from{};
  bool operator==(const ObserveEdgePrim&) const = default;
};

struct WaitForPrim {
  double duration{};
  bool operator==(const WaitForPrim&) const = default;
};

using Primitive = std::variant<NavigateEdgePrim, ObserveEdgePrim, WaitForPrim>;

// Expands a macro-action into its primitive sequence. After each edge
// traversal whose destination is adjacent to Unknown edges, ObserveEdge
// primitives are inserted for those edges in ascending edge order.
std::vector<Primitive> expand(const MacroAction& m, const NavGraph& g, const EdgeBelief& b);

// The four retry goals around (x, y), in fixed order.
std::array<Vec2, 4> alternative_goals(Vec2 target, double delta = 0.5);

enum class MacroOutcome { Success, Failure };

struct MacroResult {
  int agent_index{};
  MacroOutcome outcome{MacroOutcome::Success};
  int failed_primitive{-1};
  NodeId final_node{};
  std::vector<std::pair<int, bool>> observations;  // (stochastic index, traversable)
  double distance_traveled{};
  double wait_time{};
};

// Per-agent macro-action execution state machine. The simulation loop owns
// one AgentExec per in-flight macro and drives it through begin_primitive /
// on_primitive_result / on_interrupt.
class AgentExec {
 public:
  AgentExec(const NavGraph& g, const AgentSpec& spec, int agent_index, NodeId at, MacroAction m,
            const EdgeBelief& b);

  const MacroAction& macro() const { return macro_; }
  const std::vector<Primitive>& queue() const { return queue_; }
  std::size_t cursor() const { return cursor_; }
  NodeId node() const { return node_; }
  bool finished() const { return finished_; }
  bool interrupted() const { return interrupt_latched_; }
  int retry_attempt() const { return fails_; }

  // Next primitive to execute, or nullptr at queue end.
  const Primitive* current() const;
  // Marks the current primitive as in flight.
  void begin_primitive();
  bool primitive_in_flight() const { return in_flight_; }

  struct Continue {};
  struct Retry {
    int attempt{};  // 1-based failure count
    Vec2 alt_goal{};
  };
  struct Done {};
  using Decision = std::variant<Continue, Retry, Done>;

  // Reports the in-flight primitive's outcome. NavFailure is only meaningful
  // for NavigateEdge primitives (continuous fidelity).
  Decision on_primitive_result(bool success);

  struct CutPlan {
    bool cancel_wait{};   // in-flight WaitFor: truncate now
    bool at_boundary{};   // no primitive in flight: terminate now
  };
  // Latches the interrupt; a second call during the same macro is a no-op
  // returning the same classification.
  CutPlan on_interrupt();

  // Accounting hooks, driven by the simulation loop.
  void add_distance(double meters) { result_.distance_traveled += meters; }
  void add_wait(double seconds) { result_.wait_time += seconds; }
  // Throws ObservationConflict on a contradictory re-observation unless
  // trust_latest is set, in which case the newer status wins.
  void record_observation(int stoch_idx, bool traversable, bool trust_latest = false);

  MacroResult take_result();

 private:
  const NavGraph& graph_;
  AgentSpec spec_;
  MacroAction macro_;
  std::vector<Primitive> queue_;
  std::size_t cursor_{0};
  int fails_{0};
  bool interrupt_latched_{false};
  bool in_flight_{false};
  bool finished_{false};
  NodeId node_;
  MacroResult result_;
};

}  // namespace ctnav
