#include "ctnav/executor.hpp"

#include <algorithm>

#include "ctnav/errors.hpp"

namespace ctnav {

namespace {

void append_nav_with_observes(const NavGraph& g, const EdgeBelief& b,
                              const std::vector<NodeId>& path, std::vector<Primitive>& out) {
  for (std::size_t i = 1; i < path.size(); ++i) {
    NodeId from = path[i - 1];
    NodeId to = path[i];
    out.push_back(NavigateEdgePrim{from, to, g.edge_between(from, to)});
    for (const auto& [w, e] : g.neighbors(to)) {
      (void)w;
      int si = g.stoch_index(e);
      if (si >= 0 && b.status[si] == EdgeStatus::Unknown) {
        out.push_back(ObserveEdgePrim{si, to});
      }
    }
  }
}

}  // namespace

std::vector<Primitive> expand(const MacroAction& m, const NavGraph& g, const EdgeBelief& b) {
  std::vector<Primitive> out;
  if (const auto* ng = std::get_if<NavigateGoal>(&m)) {
    append_nav_with_observes(g, b, ng->path, out);
  } else if (const auto* ns = std::get_if<NavigateAndSense>(&m)) {
    append_nav_with_observes(g, b, ns->path, out);
    NodeId end = ns->path.back();
    ObserveEdgePrim terminal{ns->target, end};
    // The opportunistic pass may already observe the target at the last node.
    bool covered = false;
    for (auto it = out.rbegin(); it != out.rend(); ++it) {
      const auto* obs = std::get_if<ObserveEdgePrim>(&*it);
      if (!obs) break;
      if (*obs == terminal) covered = true;
    }
    if (!covered) out.push_back(terminal);
  } else {
    out.push_back(WaitForPrim{std::get<Wait>(m).duration});
  }
  return out;
}

std::array<Vec2, 4> alternative_goals(Vec2 t, double delta) {
  if (!(delta > 0)) throw ValidationError("alternative goal offset must be positive");
  return {Vec2{t.x + delta, t.y}, Vec2{t.x - delta, t.y}, Vec2{t.x, t.y + delta},
          Vec2{t.x, t.y - delta}};
}

AgentExec::AgentExec(const NavGraph& g, const AgentSpec& spec, int agent_index, NodeId at,
                     MacroAction m, const EdgeBelief& b)
    : graph_(g), spec_(spec), macro_(std::move(m)), node_(at) {
  queue_ = expand(macro_, g, b);
  result_.agent_index = agent_index;
  result_.final_node = at;
}

const Primitive* AgentExec::current() const {
  if (finished_ || cursor_ >= queue_.size()) return nullptr;
  return &queue_[cursor_];
}

void AgentExec::begin_primitive() {
  if (finished_ || cursor_ >= queue_.size()) throw ProtocolError("no primitive to begin");
  in_flight_ = true;
}

void AgentExec::record_observation(int stoch_idx, bool traversable, bool trust_latest) {
  for (auto& [si, tr] : result_.observations) {
    if (si == stoch_idx) {
      if (tr != traversable) {
        if (!trust_latest) throw ObservationConflict("conflicting observation within macro");
        tr = traversable;
      }
      return;
    }
  }
  result_.observations.emplace_back(stoch_idx, traversable);
}

AgentExec::Decision AgentExec::on_primitive_result(bool success) {
  if (!in_flight_) throw ProtocolError("no primitive in flight");
  const Primitive& prim = queue_[cursor_];
  in_flight_ = false;

  if (!success) {
    const auto* nav = std::get_if<NavigateEdgePrim>(&prim);
    if (!nav) throw ProtocolError("failure reported for non-navigation primitive");
    ++fails_;
    if (fails_ <= 4) {
      in_flight_ = true;  // the retry attempt continues the same primitive
      Vec2 target = graph_.node_pos(nav->to);
      return Retry{fails_, alternative_goals(target)[fails_ - 1]};
    }
    result_.outcome = MacroOutcome::Failure;
    result_.failed_primitive = static_cast<int>(cursor_);
    result_.final_node = node_;
    finished_ = true;
    return Done{};
  }

  fails_ = 0;
  if (const auto* nav = std::get_if<NavigateEdgePrim>(&prim)) {
    node_ = nav->to;
  }
  ++cursor_;

  if (interrupt_latched_) {
    // Only observation actions directly succeeding the finished primitive
    // survive the cut; a truncated wait terminates outright.
    bool chain = !std::holds_alternative<WaitForPrim>(prim) && cursor_ < queue_.size() &&
                 std::holds_alternative<ObserveEdgePrim>(queue_[cursor_]);
    if (!chain) {
      result_.final_node = node_;
      finished_ = true;
      return Done{};
    }
    return Continue{};
  }

  if (cursor_ >= queue_.size()) {
    result_.final_node = node_;
    finished_ = true;
    return Done{};
  }
  return Continue{};
}

AgentExec::CutPlan AgentExec::on_interrupt() {
  if (finished_) throw ProtocolError("interrupt delivered with no macro in flight");
  interrupt_latched_ = true;
  CutPlan plan;
  if (!in_flight_) {
    plan.at_boundary = true;
    return plan;
  }
  if (std::holds_alternative<WaitForPrim>(queue_[cursor_])) {
    plan.cancel_wait = true;
  }
  return plan;
}

MacroResult AgentExec::take_result() {
  if (!finished_) {
    // Boundary termination: the caller decided the macro ends here.
    result_.final_node = node_;
    finished_ = true;
  }
  return result_;
}

}  // namespace ctnav
