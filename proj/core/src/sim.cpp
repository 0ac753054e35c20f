#include "ctnav/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <memory>
#include <queue>
#include <variant>

#include <nlohmann/json.hpp>

namespace ctnav {

namespace {

using json = nlohmann::json;

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fidelity_name(Fidelity f) {
  return f == Fidelity::Graph ? "graph" : "continuous";
}

struct DeliverAssign {
  int agent{};
  MacroAction macro;
};
struct DeliverReport {
  int agent{};
  MacroResult result;
};
struct DeliverInterrupt {
  int agent{};
};
struct PrimEnd {
  int agent{};
  long token{};
  bool success{};
};

using EventBody = std::variant<DeliverAssign, DeliverReport, DeliverInterrupt, PrimEnd>;

struct Event {
  double t{};
  long seq{};
  EventBody body;
};

struct EventLater {
  bool operator()(const Event& a, const Event& b) const {
    if (a.t != b.t) return a.t > b.t;
    return a.seq > b.seq;
  }
};

class Engine {
 public:
  explicit Engine(const TrialConfig& cfg) : cfg_(cfg), g_(cfg.graph) {
    if (cfg_.agents.empty()) throw ConfigError("trial has no agents");
    for (const auto& a : cfg_.agents) {
      if (a.start < 0 || a.start >= g_.node_count() || a.goal < 0 || a.goal >= g_.node_count())
        throw ConfigError("agent '" + a.id + "' references an invalid node");
      if (a.speed <= 0.0) throw ConfigError("agent '" + a.id + "' has non-positive speed");
    }
    belief_ = EdgeBelief::all_unknown(g_);
    if (cfg_.world_override) {
      if (static_cast<int>(cfg_.world_override->size()) != g_.stoch_count())
        throw ConfigError("world override size does not match the stochastic edge count");
      world_ = WorldSample{*cfg_.world_override, cfg_.world_seed};
    } else {
      world_ = sample_world(g_, belief_, cfg_.world_seed);
    }
    if (cfg_.fidelity == Fidelity::Continuous) {
      if (!cfg_.scene) throw ConfigError("continuous fidelity requires a scene");
      grid_ = rasterize(*cfg_.scene, g_, world_, cfg_.grid_resolution, cfg_.inflation);
    }
    ags_.resize(cfg_.agents.size());
    for (std::size_t i = 0; i < ags_.size(); ++i) {
      ags_[i].node = cfg_.agents[i].start;
      ags_[i].pose = g_.node_pos(cfg_.agents[i].start);
      if (cfg_.planner.mode == PlannerMode::Independent)
        ags_[i].belief = EdgeBelief::all_unknown(g_);
    }
  }

  TrialResult run() {
    sense_start_adjacency();
    if (cfg_.planner.mode == PlannerMode::Collaborative) {
      replan_team(0.0);
    } else {
      for (std::size_t i = 0; i < ags_.size(); ++i) replan_solo(static_cast<int>(i), 0.0);
    }
    while (!pq_.empty() && !complete_ && !failed_) {
      Event ev = pq_.top();
      pq_.pop();
      if (++steps_ > cfg_.step_budget) {
        fail("step budget exceeded");
        break;
      }
      std::visit([&](auto& body) { handle(ev.t, body); }, ev.body);
    }
    if (!complete_ && !failed_) fail("event queue drained before completion");
    finalize();
    return std::move(res_);
  }

 private:
  struct Ag {
    NodeId node{};
    Vec2 pose{};
    std::unique_ptr<AgentExec> exec;
    long token{0};
    bool outstanding{false};      // assigned this epoch, report not yet in
    bool interrupt_sent{false};
    bool finished{false};         // independent mode: idle at goal
    double completion{0.0};       // wall time of the last goal arrival
    double wait_start{0.0};
    double graph_distance{0.0};
    double wait_time{0.0};
    NavOutcome attempt;           // continuous fidelity, current navigation
    EdgeBelief belief;            // independent mode private belief
  };

  // -- event plumbing ------------------------------------------------------

  void schedule(double t, EventBody body) {
    pq_.push(Event{t, seq_alloc_++, std::move(body)});
  }

  void log(double t, const std::string& kind, int agent, json detail) {
    res_.events.push_back(TrialEvent{t, log_seq_++, kind,
                                     agent < 0 ? std::string{} : cfg_.agents[agent].id,
                                     detail.dump()});
  }

  void fail(const std::string& reason) {
    failed_ = true;
    fail_reason_ = reason;
  }

  std::string edge_name(int si) const {
    const Edge& e = g_.edge(g_.stoch_edge(si));
    return g_.node_name(e.u) + "-" + g_.node_name(e.v);
  }

  json macro_json(const MacroAction& m) const {
    json d;
    if (const auto* ng = std::get_if<NavigateGoal>(&m)) {
      d["type"] = "navigate_goal";
      json path = json::array();
      for (NodeId n : ng->path) path.push_back(g_.node_name(n));
      d["path"] = path;
    } else if (const auto* ns = std::get_if<NavigateAndSense>(&m)) {
      d["type"] = "navigate_and_sense";
      json path = json::array();
      for (NodeId n : ns->path) path.push_back(g_.node_name(n));
      d["path"] = path;
      d["edge"] = edge_name(ns->target);
    } else {
      d["type"] = "wait";
      d["duration"] = std::get<Wait>(m).duration;
    }
    return d;
  }

  json prim_json(const Primitive& p) const {
    json d;
    if (const auto* nav = std::get_if<NavigateEdgePrim>(&p)) {
      d["type"] = "navigate_edge";
      d["from"] = g_.node_name(nav->from);
      d["to"] = g_.node_name(nav->to);
    } else if (const auto* obs = std::get_if<ObserveEdgePrim>(&p)) {
      d["type"] = "observe";
      d["edge"] = edge_name(obs->target);
    } else {
      d["type"] = "wait";
      d["duration"] = std::get<WaitForPrim>(p).duration;
    }
    return d;
  }

  // -- planning ------------------------------------------------------------

  const EdgeBelief& belief_of(int i) const {
    return cfg_.planner.mode == PlannerMode::Independent ? ags_[i].belief : belief_;
  }

  bool agent_done(int i, const EdgeBelief& b) const {
    return ags_[i].node == cfg_.agents[i].goal &&
           enumerate_candidates(g_, b, cfg_.agents[i], ags_[i].node, cfg_.planner.wait_quantum)
               .empty();
  }

  // A stochastic edge is observable from an adjacent node, so an agent that
  // starts next to one knows its status before the first plan is drawn up.
  void sense_start_adjacency() {
    for (std::size_t i = 0; i < ags_.size(); ++i) {
      const NodeId n = ags_[i].node;
      for (const auto& [other, ei] : g_.neighbors(n)) {
        const int si = g_.stoch_index(ei);
        if (si < 0) continue;
        EdgeBelief& b = cfg_.planner.mode == PlannerMode::Independent
                            ? ags_[i].belief
                            : belief_;
        if (b.status[si] != EdgeStatus::Unknown) continue;
        bool traversable;
        if (cfg_.fidelity == Fidelity::Graph) {
          traversable = !world_.blocked[si];
        } else {
          traversable = observe_edge_traversable(*grid_, ags_[i].pose, g_.node_pos(n),
                                                 g_.node_pos(other), cfg_.sense_lookahead,
                                                 cfg_.sense_threshold);
        }
        b.status[si] =
            traversable ? EdgeStatus::KnownTraversable : EdgeStatus::KnownBlocked;
        log(0.0, "observe", static_cast<int>(i),
            json{{"edge", edge_name(si)}, {"traversable", traversable}, {"initial", true}});
      }
    }
  }

  void replan_team(double t) {
    bool all_at_goal = true;
    for (std::size_t i = 0; i < ags_.size(); ++i)
      if (ags_[i].node != cfg_.agents[i].goal) all_at_goal = false;
    if (all_at_goal) {
      complete_ = true;
      return;
    }

    TeamState s;
    s.belief = belief_;
    for (std::size_t i = 0; i < ags_.size(); ++i) {
      AgentState as;
      as.spec = cfg_.agents[i];
      as.current = ags_[i].node;
      as.elapsed = ags_[i].node == cfg_.agents[i].goal ? ags_[i].completion : t;
      as.done = agent_done(static_cast<int>(i), belief_);
      s.agents.push_back(as);
    }
    log(t, "replan", -1, json{{"epoch", epoch_++}});
    JointAssignment joint;
    try {
      joint = plan_joint(g_, s, cfg_.planner);
    } catch (const PlanningStuckError& e) {
      fail(std::string("planning stuck: ") + e.what());
      return;
    }
    for (std::size_t i = 0; i < ags_.size(); ++i) {
      ags_[i].outstanding = false;
      ags_[i].interrupt_sent = false;
      if (joint[i]) {
        ags_[i].outstanding = true;
        schedule(t + cfg_.message_delay, DeliverAssign{static_cast<int>(i), *joint[i]});
      }
    }
  }

  void replan_solo(int i, double t) {
    Ag& ag = ags_[i];
    if (ag.node == cfg_.agents[i].goal) {
      ag.finished = true;
      if (std::all_of(ags_.begin(), ags_.end(), [](const Ag& a) { return a.finished; }))
        complete_ = true;
      return;
    }
    log(t, "replan", i, json{{"epoch", epoch_++}});
    TeamState s;
    s.belief = ag.belief;
    AgentState as;
    as.spec = cfg_.agents[i];
    as.current = ag.node;
    as.elapsed = t;
    s.agents.push_back(as);
    JointAssignment joint;
    try {
      joint = plan_independent(g_, s, cfg_.planner);
    } catch (const PlanningStuckError& e) {
      fail("planning stuck for agent '" + cfg_.agents[i].id + "': " + e.what());
      return;
    }
    if (!joint[0]) {
      fail("planner returned no action for agent '" + cfg_.agents[i].id + "'");
      return;
    }
    schedule(t + cfg_.message_delay, DeliverAssign{i, *joint[0]});
  }

  // Could agent j's best remaining plan change now that the shared belief
  // advanced from `before` to the current one?
  bool news_matters_to(std::size_t j, const EdgeBelief& before) const {
    const Ag& other = ags_[j];
    NodeId u = other.node;
    bool waiting = false;
    if (other.exec) {
      if (const auto* ns = std::get_if<NavigateAndSense>(&other.exec->macro())) {
        // The report resolved the very edge this agent is out to sense.
        if (before.status[ns->target] == EdgeStatus::Unknown &&
            belief_.status[ns->target] != EdgeStatus::Unknown)
          return true;
      }
      if (const Primitive* p = other.exec->current()) {
        if (const auto* nav = std::get_if<NavigateEdgePrim>(p)) u = nav->to;
        waiting = std::holds_alternative<WaitForPrim>(*p);
      }
    }
    return report_warrants_interrupt(g_, before, belief_, u, cfg_.agents[j].goal, waiting);
  }

  // Continuation for a reporter whose news interrupted nobody: it plans its
  // next macro alone against the shared belief.
  void replan_alone(int i, double t) {
    Ag& ag = ags_[i];
    log(t, "replan", i, json{{"epoch", epoch_++}});
    TeamState s;
    s.belief = belief_;
    AgentState as;
    as.spec = cfg_.agents[i];
    as.current = ag.node;
    as.elapsed = t;
    s.agents.push_back(as);
    JointAssignment joint;
    try {
      joint = plan_independent(g_, s, cfg_.planner);
    } catch (const PlanningStuckError& e) {
      fail("planning stuck for agent '" + cfg_.agents[i].id + "': " + e.what());
      return;
    }
    if (!joint[0]) {
      fail("planner returned no action for agent '" + cfg_.agents[i].id + "'");
      return;
    }
    ag.outstanding = true;
    schedule(t + cfg_.message_delay, DeliverAssign{i, *joint[0]});
  }

  // -- primitive execution -------------------------------------------------

  void start_next(int i, double t) {
    Ag& ag = ags_[i];
    const Primitive* p = ag.exec->current();
    if (!p) {
      // Defensive: Done decisions normally end the macro before this point.
      finish_macro(i, t);
      return;
    }
    ag.exec->begin_primitive();
    log(t, "primitive_start", i, prim_json(*p));
    if (const auto* nav = std::get_if<NavigateEdgePrim>(p)) {
      if (cfg_.fidelity == Fidelity::Graph) {
        double dur = g_.edge(nav->edge).length / cfg_.agents[i].speed;
        schedule(t + dur, PrimEnd{i, ag.token, true});
      } else {
        start_nav_attempt(i, t, g_.node_pos(nav->to));
      }
    } else if (std::holds_alternative<ObserveEdgePrim>(*p)) {
      schedule(t + cfg_.agents[i].sense_duration, PrimEnd{i, ag.token, true});
    } else {
      ag.wait_start = t;
      schedule(t + std::get<WaitForPrim>(*p).duration, PrimEnd{i, ag.token, true});
    }
  }

  void start_nav_attempt(int i, double t, Vec2 target) {
    Ag& ag = ags_[i];
    ag.attempt = navigate_action(*grid_, ag.pose, target, cfg_.agents[i].speed, cfg_.dt,
                                 cfg_.goal_radius);
    for (std::size_t k = 0; k < ag.attempt.poses.size(); ++k)
      res_.trajectory.emplace_back(t + (static_cast<double>(k) + 1.0) * cfg_.dt,
                                   cfg_.agents[i].id, ag.attempt.poses[k]);
    schedule(t + ag.attempt.elapsed, PrimEnd{i, ag.token, ag.attempt.arrived});
  }

  void apply_decision(int i, double t, AgentExec::Decision d) {
    if (std::holds_alternative<AgentExec::Continue>(d)) {
      start_next(i, t);
    } else if (const auto* retry = std::get_if<AgentExec::Retry>(&d)) {
      log(t, "primitive_start", i, json{{"type", "navigate_retry"}, {"attempt", retry->attempt}});
      start_nav_attempt(i, t, retry->alt_goal);
    } else {
      finish_macro(i, t);
    }
  }

  void handle(double t, PrimEnd& ev) {
    Ag& ag = ags_[ev.agent];
    if (!ag.exec || ev.token != ag.token) return;  // cancelled
    const Primitive prim = *ag.exec->current();
    if (const auto* nav = std::get_if<NavigateEdgePrim>(&prim)) {
      if (cfg_.fidelity == Fidelity::Graph) {
        ag.exec->add_distance(g_.edge(nav->edge).length);
        ag.pose = g_.node_pos(nav->to);
      } else {
        ag.exec->add_distance(ag.attempt.distance);
        ag.pose = ag.attempt.final_pose;
      }
      if (ev.success) {
        ag.node = nav->to;
        if (nav->to == cfg_.agents[ev.agent].goal) ag.completion = t;
      }
      log(t, "primitive_end", ev.agent,
          json{{"type", "navigate_edge"}, {"to", g_.node_name(nav->to)}, {"success", ev.success}});
    } else if (const auto* obs = std::get_if<ObserveEdgePrim>(&prim)) {
      bool traversable;
      if (cfg_.fidelity == Fidelity::Graph) {
        traversable = !world_.blocked[obs->target];
      } else {
        const Edge& e = g_.edge(g_.stoch_edge(obs->target));
        NodeId far = e.other(obs->from);
        traversable = observe_edge_traversable(*grid_, ag.pose, g_.node_pos(obs->from),
                                               g_.node_pos(far), cfg_.sense_lookahead,
                                               cfg_.sense_threshold);
      }
      try {
        ag.exec->record_observation(obs->target, traversable,
                                    cfg_.conflict_policy == ConflictPolicy::TrustLatest);
      } catch (const ObservationConflict& e) {
        fail(std::string("observation conflict: ") + e.what());
        return;
      }
      log(t, "observe", ev.agent,
          json{{"edge", edge_name(obs->target)}, {"traversable", traversable}});
      log(t, "primitive_end", ev.agent, json{{"type", "observe"}, {"success", true}});
    } else {
      ag.exec->add_wait(std::get<WaitForPrim>(prim).duration);
      log(t, "primitive_end", ev.agent, json{{"type", "wait"}, {"success", true}});
    }
    apply_decision(ev.agent, t, ag.exec->on_primitive_result(ev.success));
  }

  void handle(double t, DeliverAssign& ev) {
    Ag& ag = ags_[ev.agent];
    log(t, "assign", ev.agent, macro_json(ev.macro));
    ag.exec = std::make_unique<AgentExec>(g_, cfg_.agents[ev.agent], ev.agent, ag.node, ev.macro,
                                          belief_of(ev.agent));
    ++ag.token;
    if (!ag.exec->current()) {
      finish_macro(ev.agent, t);  // degenerate macro (e.g. already at path end)
      return;
    }
    start_next(ev.agent, t);
  }

  void handle(double t, DeliverInterrupt& ev) {
    Ag& ag = ags_[ev.agent];
    // The agent completed while the interrupt was in flight; it is dropped in
    // transit and never delivered to an idle agent.
    if (!ag.exec) return;
    log(t, "interrupt", ev.agent, json::object());
    AgentExec::CutPlan cut = ag.exec->on_interrupt();
    if (cut.cancel_wait) {
      ag.exec->add_wait(t - ag.wait_start);
      ++ag.token;  // drop the scheduled natural end of the wait
      log(t, "primitive_end", ev.agent, json{{"type", "wait"}, {"success", true}});
      apply_decision(ev.agent, t, ag.exec->on_primitive_result(true));
    } else if (cut.at_boundary) {
      finish_macro(ev.agent, t);
    }
    // Otherwise the in-flight primitive finishes naturally and the latched
    // interrupt cuts the queue there.
  }

  void finish_macro(int i, double t) {
    Ag& ag = ags_[i];
    MacroResult r = ag.exec->take_result();
    ag.exec.reset();
    ++ag.token;
    ag.graph_distance += r.distance_traveled;
    ag.wait_time += r.wait_time;
    schedule(t + cfg_.message_delay, DeliverReport{i, std::move(r)});
  }

  void handle(double t, DeliverReport& ev) {
    const MacroResult& r = ev.result;
    json obs = json::array();
    for (const auto& [si, tr] : r.observations) obs.push_back(json{{"edge", edge_name(si)}, {"traversable", tr}});
    log(t, "report", ev.agent,
        json{{"outcome", r.outcome == MacroOutcome::Success ? "success" : "failure"},
             {"final_node", g_.node_name(r.final_node)},
             {"distance", r.distance_traveled},
             {"wait", r.wait_time},
             {"observations", obs}});
    if (r.outcome == MacroOutcome::Failure) {
      fail("agent '" + cfg_.agents[ev.agent].id + "' failed a navigation primitive");
      return;
    }

    if (cfg_.planner.mode == PlannerMode::Independent) {
      try {
        merge_observations(ags_[ev.agent].belief, {r}, cfg_.conflict_policy);
      } catch (const ObservationConflict& e) {
        fail(std::string("observation conflict: ") + e.what());
        return;
      }
      replan_solo(ev.agent, t);
      return;
    }

    // Fold the report into the shared belief, recall any teammate whose plan
    // its news could change, and put the reporter straight back to work; each
    // recalled agent terminates, reports, and is replanned the same way.
    const EdgeBelief before = belief_;
    try {
      merge_observations(belief_, {r}, cfg_.conflict_policy);
    } catch (const ObservationConflict& e) {
      fail(std::string("observation conflict: ") + e.what());
      return;
    }
    ags_[ev.agent].outstanding = false;
    ags_[ev.agent].interrupt_sent = false;
    for (std::size_t j = 0; j < ags_.size(); ++j) {
      Ag& other = ags_[j];
      if (static_cast<int>(j) == ev.agent) continue;
      if (!other.outstanding || other.interrupt_sent) continue;
      if (news_matters_to(j, before)) {
        other.interrupt_sent = true;
        schedule(t + cfg_.message_delay, DeliverInterrupt{static_cast<int>(j)});
      }
    }
    if (ags_[ev.agent].node == cfg_.agents[ev.agent].goal) {
      bool all_goal = true;
      bool any_out = false;
      for (std::size_t j = 0; j < ags_.size(); ++j) {
        if (ags_[j].node != cfg_.agents[j].goal) all_goal = false;
        if (ags_[j].outstanding) any_out = true;
      }
      if (all_goal) {
        complete_ = true;
      } else if (!any_out) {
        replan_team(t);  // everyone idle yet not all home: replan as a team
      }
      return;
    }
    replan_alone(ev.agent, t);
  }

  void finalize() {
    res_.outcome = failed_ ? TrialResult::Outcome::Failed : TrialResult::Outcome::Complete;
    res_.fail_reason = fail_reason_;
    double makespan = 0.0;
    for (std::size_t i = 0; i < ags_.size(); ++i) {
      AgentMetrics m;
      m.id = cfg_.agents[i].id;
      m.graph_distance = ags_[i].graph_distance;
      m.wait_time = ags_[i].wait_time;
      m.final_node = ags_[i].node;
      m.reached_goal = ags_[i].node == cfg_.agents[i].goal;
      m.completion_time = ags_[i].completion;
      makespan = std::max(makespan, ags_[i].completion);
      res_.agents.push_back(m);
    }
    res_.makespan = failed_ ? kInf : makespan;
  }

  const TrialConfig& cfg_;
  const NavGraph& g_;
  WorldSample world_;
  EdgeBelief belief_;
  std::optional<OccupancyGrid> grid_;
  std::vector<Ag> ags_;
  std::priority_queue<Event, std::vector<Event>, EventLater> pq_;
  long seq_alloc_{0};
  long log_seq_{0};
  long steps_{0};
  int epoch_{0};
  bool complete_{false};
  bool failed_{false};
  std::string fail_reason_;
  TrialResult res_;
};

}  // namespace

TrialResult run_trial(const TrialConfig& cfg) {
  Engine e(cfg);
  return e.run();
}

void merge_observations(EdgeBelief& belief, const std::vector<MacroResult>& reports,
                        ConflictPolicy policy) {
  for (const auto& r : reports) {
    for (const auto& [si, tr] : r.observations) {
      if (policy == ConflictPolicy::TrustLatest) {
        belief.status[si] = tr ? EdgeStatus::KnownTraversable : EdgeStatus::KnownBlocked;
      } else {
        apply_observation(belief, si, tr);
      }
    }
  }
}

double exact_policy_makespan(const TrialConfig& cfg, PlannerMode mode) {
  const NavGraph& g = cfg.graph;
  int k = g.stoch_count();
  if (k > 2) throw LimitExceeded("exact policy evaluation supports at most 2 stochastic edges");
  double total = 0.0;
  for (int mask = 0; mask < (1 << k); ++mask) {
    std::vector<bool> blocked(k);
    double prob = 1.0;
    for (int si = 0; si < k; ++si) {
      double rho = *g.edge(g.stoch_edge(si)).rho;
      blocked[si] = (mask >> si) & 1;
      prob *= blocked[si] ? rho : 1.0 - rho;
    }
    TrialConfig c = cfg;
    c.world_override = blocked;
    c.planner.mode = mode;
    TrialResult r = run_trial(c);
    if (r.outcome != TrialResult::Outcome::Complete) return kInf;
    total += prob * r.makespan;
  }
  return total;
}

std::string planner_mode_name(PlannerMode mode) {
  return mode == PlannerMode::Collaborative ? "collaborative" : "independent";
}

namespace {

std::string fmt6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

void write_outputs(const TrialResult& result, const TrialConfig& cfg, const std::string& dir,
                   const std::string& trial_name) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const std::string planner = planner_mode_name(cfg.planner.mode);
  const std::string fidelity = fidelity_name(cfg.fidelity);
  std::string outcome = "complete";
  if (result.outcome != TrialResult::Outcome::Complete) {
    std::string reason = result.fail_reason;
    std::replace(reason.begin(), reason.end(), ',', ';');
    outcome = "failed(" + reason + ")";
  }

  {
    std::ofstream f(fs::path(dir) / (trial_name + "_metrics.csv"));
    if (!f) throw IoError("cannot write metrics for " + trial_name);
    f << "trial,planner,fidelity,world_seed,agent,graph_distance_m,wait_time_s,reached_goal,"
         "makespan_s,outcome\n";
    double dist = 0.0, wait = 0.0;
    bool all = true;
    for (const auto& a : result.agents) {
      f << trial_name << ',' << planner << ',' << fidelity << ',' << cfg.world_seed << ',' << a.id
        << ',' << fmt6(a.graph_distance) << ',' << fmt6(a.wait_time) << ','
        << (a.reached_goal ? 1 : 0) << ',' << fmt6(a.completion_time) << ',' << outcome << '\n';
      dist += a.graph_distance;
      wait += a.wait_time;
      all = all && a.reached_goal;
    }
    f << trial_name << ',' << planner << ',' << fidelity << ',' << cfg.world_seed << ",TEAM,"
      << fmt6(dist) << ',' << fmt6(wait) << ',' << (all ? 1 : 0) << ','
      << fmt6(std::isinf(result.makespan) ? -1.0 : result.makespan) << ',' << outcome << '\n';
  }

  {
    std::ofstream f(fs::path(dir) / (trial_name + "_events.ndjson"));
    if (!f) throw IoError("cannot write events for " + trial_name);
    for (const auto& ev : result.events) {
      f << "{\"t\":" << nlohmann::json(ev.t).dump() << ",\"seq\":" << ev.seq << ",\"kind\":\""
        << ev.kind << "\",\"agent\":\"" << ev.agent << "\",\"detail\":" << ev.detail_json
        << "}\n";
    }
  }

  if (cfg.fidelity == Fidelity::Continuous) {
    std::ofstream f(fs::path(dir) / (trial_name + "_trajectory.csv"));
    if (!f) throw IoError("cannot write trajectory for " + trial_name);
    f << "t,agent,x,y\n";
    auto traj = result.trajectory;
    std::stable_sort(traj.begin(), traj.end(), [](const auto& a, const auto& b) {
      return std::get<0>(a) < std::get<0>(b) ||
             (std::get<0>(a) == std::get<0>(b) && std::get<1>(a) < std::get<1>(b));
    });
    for (const auto& [t, id, p] : traj)
      f << fmt6(t) << ',' << id << ',' << fmt6(p.x) << ',' << fmt6(p.y) << '\n';
  }
}

}  // namespace ctnav
