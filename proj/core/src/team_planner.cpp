#include "ctnav/team_planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <queue>
#include <set>
#include <sstream>
#include <thread>

#include "ctnav/errors.hpp"

namespace ctnav {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEps = 1e-9;
}  // namespace

namespace detail {

EpochResult simulate_epoch(const NavGraph& g, const EdgeBelief& b, const WorldSample& w,
                           const std::vector<AgentState>& agents, const JointAssignment& joint,
                           bool interrupts) {
  const int n = static_cast<int>(agents.size());
  EpochResult res;
  res.agents.resize(n);

  struct Span {
    double start, end;
    Primitive prim;
  };
  std::vector<std::vector<Span>> spans(n);
  std::vector<double> natural_end(n, kInf);

  for (int i = 0; i < n; ++i) {
    EpochAgent& ea = res.agents[i];
    ea.node = agents[i].current;
    if (!joint[i]) continue;
    ea.active = true;
    const AgentSpec& spec = agents[i].spec;
    auto prims = expand(*joint[i], g, b);
    double t = 0;
    for (const Primitive& pr : prims) {
      double dur = 0;
      if (const auto* nav = std::get_if<NavigateEdgePrim>(&pr)) {
        dur = g.edge(nav->edge).length / spec.speed;
      } else if (std::holds_alternative<ObserveEdgePrim>(pr)) {
        dur = spec.sense_duration;
      } else {
        dur = std::get<WaitForPrim>(pr).duration;
      }
      spans[i].push_back({t, t + dur, pr});
      t += dur;
    }
    natural_end[i] = t;
  }

  double t_star = kInf;
  for (int i = 0; i < n; ++i) {
    if (natural_end[i] < t_star - kEps) {
      t_star = natural_end[i];
      res.first_reporter = i;
    }
  }
  if (!interrupts) t_star = kInf;

  auto exec_prim = [&](int i, const Span& sp, double wait_until) {
    EpochAgent& ea = res.agents[i];
    if (const auto* nav = std::get_if<NavigateEdgePrim>(&sp.prim)) {
      ea.distance += g.edge(nav->edge).length;
      ea.node = nav->to;
      if (nav->to == agents[i].spec.goal) ea.goal_arrivals.push_back(sp.end);
    } else if (const auto* obs = std::get_if<ObserveEdgePrim>(&sp.prim)) {
      bool traversable = !w.blocked[obs->target];
      auto rec = std::make_pair(obs->target, traversable);
      if (std::find(ea.observations.begin(), ea.observations.end(), rec) ==
          ea.observations.end()) {
        ea.observations.push_back(rec);
      }
    } else {
      ea.wait_time += std::min(sp.end, wait_until) - sp.start;
    }
  };

  for (int i = 0; i < n; ++i) {
    if (!res.agents[i].active) continue;
    EpochAgent& ea = res.agents[i];
    if (natural_end[i] <= t_star + kEps) {
      for (const Span& sp : spans[i]) exec_prim(i, sp, kInf);
      ea.end_time = natural_end[i];
    } else {
      // Interrupted at t_star: executed prefix, then the in-flight primitive
      // (unless a wait, which is canceled) and directly succeeding observes.
      std::size_t k = 0;
      double term = t_star;
      while (k < spans[i].size() && spans[i][k].end <= t_star + kEps) {
        exec_prim(i, spans[i][k], kInf);
        ++k;
      }
      // A primitive starting exactly at the interrupt instant is already in
      // flight: primitive-start events precede the interrupt's delivery at
      // equal timestamps.
      if (k < spans[i].size() && spans[i][k].start <= t_star + kEps) {
        const Span& inflight = spans[i][k];
        if (std::holds_alternative<WaitForPrim>(inflight.prim)) {
          exec_prim(i, inflight, t_star);  // truncated wait
          term = t_star;
        } else {
          exec_prim(i, inflight, kInf);
          term = inflight.end;
          ++k;
          while (k < spans[i].size() && std::holds_alternative<ObserveEdgePrim>(spans[i][k].prim)) {
            exec_prim(i, spans[i][k], kInf);
            term = spans[i][k].end;
            ++k;
          }
        }
      }
      ea.end_time = term;
    }
    res.epoch_end = std::max(res.epoch_end, ea.end_time);
  }
  return res;
}

}  // namespace detail

bool report_warrants_interrupt(const NavGraph& g, const EdgeBelief& before,
                               const EdgeBelief& after, NodeId node, NodeId goal, bool waiting) {
  auto cost = [&](const EdgeBelief& b, PathMode m) {
    auto r = shortest_path(g, b, m, node, goal);
    return r ? r->cost : kInf;
  };
  const double po0 = cost(before, PathMode::Optimistic);
  const double po1 = cost(after, PathMode::Optimistic);
  const double ko0 = cost(before, PathMode::KnownOnly);
  const double ko1 = cost(after, PathMode::KnownOnly);
  if (po1 < po0 - kEps || ko1 < ko0 - kEps) return true;
  if (waiting && (std::abs(po1 - po0) > kEps || std::abs(ko1 - ko0) > kEps)) return true;
  return false;
}

double rollout_value(const NavGraph& g, const TeamState& s, const JointAssignment& joint,
                     const WorldSample& w, const PlannerParams& p) {
  (void)p;
  const int n = static_cast<int>(s.agents.size());
  auto cut = detail::simulate_epoch(g, s.belief, w, s.agents, joint);

  // The first completed macro's report triggers a synchronized team replan
  // only if its news could change some other agent's plan; otherwise the
  // reporter carries on alone and nobody else is cut short.
  bool team_replan = false;
  if (cut.first_reporter >= 0) {
    const int r = cut.first_reporter;
    EdgeBelief nb = s.belief;
    for (const auto& [si, tr] : cut.agents[r].observations) apply_observation(nb, si, tr);
    for (int j = 0; j < n && !team_replan; ++j) {
      if (j == r || !cut.agents[j].active || s.agents[j].done) continue;
      if (cut.agents[j].node == s.agents[j].spec.goal) continue;
      if (const auto* ns = std::get_if<NavigateAndSense>(&*joint[j])) {
        // The report resolved the very edge this agent is out to sense.
        if (s.belief.status[ns->target] == EdgeStatus::Unknown &&
            nb.status[ns->target] != EdgeStatus::Unknown) {
          team_replan = true;
          break;
        }
      }
      const bool waiting = std::holds_alternative<Wait>(*joint[j]);
      if (report_warrants_interrupt(g, s.belief, nb, cut.agents[j].node,
                                    s.agents[j].spec.goal, waiting))
        team_replan = true;
    }
  }
  const auto epoch =
      team_replan ? cut : detail::simulate_epoch(g, s.belief, w, s.agents, joint, false);

  EdgeBelief belief = s.belief;
  std::vector<bool> merged(n, false);
  if (team_replan) {
    // The cut happened because of the first report, so its observations are
    // public before anyone resumes.
    const int r = cut.first_reporter;
    for (const auto& [si, tr] : epoch.agents[r].observations) apply_observation(belief, si, tr);
    merged[r] = true;
  }

  std::vector<double> completion(n, 0.0);
  for (int i = 0; i < n; ++i) {
    if (!epoch.agents[i].goal_arrivals.empty()) {
      completion[i] = epoch.agents[i].goal_arrivals.back();
    }
  }

  // Base-policy continuation: optimistic replanning with free adjacent
  // sensing, shared belief, event-ordered by (time, agent). Every agent is
  // replanned at its own report instant; nobody idles for teammates.
  using Ev = std::pair<double, int>;
  std::priority_queue<Ev, std::vector<Ev>, std::greater<>> pq;
  std::vector<NodeId> at(n);
  for (int i = 0; i < n; ++i) {
    at[i] = epoch.agents[i].node;
    if (s.agents[i].done) continue;
    pq.emplace(epoch.agents[i].active ? epoch.agents[i].end_time : 0.0, i);
  }
  while (!pq.empty()) {
    auto [t, i] = pq.top();
    pq.pop();
    if (!merged[i]) {
      // Without a team replan, an agent's own macro observations reach the
      // shared belief when its report comes in, i.e. at its natural end.
      for (const auto& [si, tr] : epoch.agents[i].observations) apply_observation(belief, si, tr);
      merged[i] = true;
    }
    NodeId u = at[i];
    for (const auto& [nb, e] : g.neighbors(u)) {
      (void)nb;
      int si = g.stoch_index(e);
      if (si >= 0 && belief.status[si] == EdgeStatus::Unknown) {
        apply_observation(belief, si, !w.blocked[si]);
      }
    }
    if (u == s.agents[i].spec.goal) {
      completion[i] = std::max(completion[i], t);
      continue;
    }
    NodeId goal = s.agents[i].spec.goal;
    auto po = shortest_path(g, belief, PathMode::Optimistic, u, goal);
    if (!po) return kInf;
    const std::vector<NodeId>* route = &po->path;
    auto ko = shortest_path(g, belief, PathMode::KnownOnly, u, goal);
    if (ko && ko->cost > po->cost + kEps) {
      // The optimistic route gambles on an unknown edge. Weight the gamble by
      // the edge's blocking probability (detour from the reveal point if it
      // turns out blocked) and only take it when it beats the certain route.
      double prefix = 0;
      double expected = po->cost;
      for (std::size_t k = 1; k < po->path.size(); ++k) {
        int e = g.edge_between(po->path[k - 1], po->path[k]);
        int si = g.stoch_index(e);
        if (si >= 0 && belief.status[si] == EdgeStatus::Unknown) {
          double rho = g.edge(e).rho.value_or(0.0);
          EdgeBelief nb = belief;
          nb.status[si] = EdgeStatus::KnownBlocked;
          auto back = shortest_path(g, nb, PathMode::KnownOnly, po->path[k - 1], goal);
          double blocked = back ? prefix + back->cost : kInf;
          expected = (1 - rho) * po->cost + rho * blocked;
          break;
        }
        prefix += g.edge(e).length;
      }
      if (ko->cost <= expected + kEps) route = &ko->path;
    }
    int e = g.edge_between((*route)[0], (*route)[1]);
    at[i] = (*route)[1];
    pq.emplace(t + g.edge(e).length / s.agents[i].spec.speed, i);
  }

  double value = 0;
  for (int i = 0; i < n; ++i) value = std::max(value, s.agents[i].elapsed + completion[i]);
  return value;
}

namespace {

struct CandidateSets {
  // Per agent: empty vector means idle (done or at goal with nothing to do).
  std::vector<std::vector<MacroAction>> per_agent;
};

// Candidates for one agent; `collaborative` keeps Wait and team-relevant
// senses, the baseline drops Wait and restricts to its own relevant edges.
std::vector<MacroAction> agent_candidates(const NavGraph& g, const EdgeBelief& b,
                                          const AgentState& a, const PlannerParams& p,
                                          const std::set<int>& relevant, double upper,
                                          bool collaborative) {
  auto cands = enumerate_candidates(g, b, a.spec, a.current, p.wait_quantum);
  if (!collaborative) {
    std::erase_if(cands, [](const MacroAction& m) { return is_wait(m); });
  }
  auto pruned = prune(std::move(cands), g, b, a.spec, a.current, relevant, upper);
  if (pruned.empty() && collaborative && b.unknown_count() > 0) {
    pruned.push_back(Wait{p.wait_quantum});  // progress fallback
  }
  return pruned;
}

struct Evaluated {
  double value{};
  int wait_count{};
  double total_len{};
};

struct WeightedWorld {
  WorldSample world;
  double prob;
};

std::vector<WeightedWorld> enumerate_worlds(const NavGraph& g, const EdgeBelief& b) {
  std::vector<int> unknown;
  for (int si = 0; si < g.stoch_count(); ++si) {
    if (b.status[si] == EdgeStatus::Unknown) unknown.push_back(si);
  }
  std::vector<WeightedWorld> out;
  for (std::uint64_t mask = 0; mask < (1ull << unknown.size()); ++mask) {
    WorldSample w;
    w.blocked.resize(g.stoch_count());
    double prob = 1.0;
    for (int si = 0; si < g.stoch_count(); ++si) {
      w.blocked[si] = b.status[si] == EdgeStatus::KnownBlocked;
    }
    for (std::size_t k = 0; k < unknown.size(); ++k) {
      bool blocked = (mask >> k) & 1;
      double rho = g.edge(g.stoch_edge(unknown[k])).rho.value_or(0.0);
      w.blocked[unknown[k]] = blocked;
      prob *= blocked ? rho : 1.0 - rho;
    }
    out.push_back({std::move(w), prob});
  }
  return out;
}

bool better(const Evaluated& a, const Evaluated& b) {
  double tol = kEps * std::max({1.0, std::abs(a.value), std::abs(b.value)});
  if (a.value < b.value - tol) return true;
  if (a.value > b.value + tol) return false;
  if (a.wait_count != b.wait_count) return a.wait_count < b.wait_count;
  return a.total_len < b.total_len - kEps;
}

JointAssignment plan_common(const NavGraph& g, const TeamState& s, const PlannerParams& p,
                            bool collaborative) {
  const int n = static_cast<int>(s.agents.size());

  std::vector<std::pair<AgentSpec, NodeId>> team;
  for (const auto& a : s.agents) {
    if (!a.done) team.emplace_back(a.spec, a.current);
  }
  if (team.empty()) throw PlanningStuckError("no agents left to plan for");

  // Upper bound: makespan of the all-NavigateGoal joint plan.
  double upper = 0;
  for (const auto& a : s.agents) {
    if (a.done) continue;
    if (a.current == a.spec.goal) continue;
    auto ko = shortest_path(g, s.belief, PathMode::KnownOnly, a.current, a.spec.goal);
    upper = std::max(upper, a.elapsed + (ko ? ko->cost / a.spec.speed : kInf));
  }

  std::set<int> relevant;
  if (collaborative) {
    relevant = relevant_unknown_edges(g, s.belief, team);
  }

  CandidateSets sets;
  sets.per_agent.resize(n);
  std::vector<int> planned;  // agent indices with candidates
  for (int i = 0; i < n; ++i) {
    const AgentState& a = s.agents[i];
    if (a.done) continue;
    if (a.current != a.spec.goal &&
        !shortest_path(g, s.belief, PathMode::Optimistic, a.current, a.spec.goal)) {
      throw PlanningStuckError("agent " + a.spec.id + " cannot reach its goal");
    }
    std::set<int> own_relevant =
        collaborative ? relevant : relevant_unknown_edges(g, s.belief, {{a.spec, a.current}});
    double own_upper = upper;
    if (!collaborative) {
      auto ko = shortest_path(g, s.belief, PathMode::KnownOnly, a.current, a.spec.goal);
      own_upper = a.elapsed + (ko ? ko->cost / a.spec.speed : kInf);
    }
    auto cands = agent_candidates(g, s.belief, a, p, own_relevant, own_upper, collaborative);
    if (cands.empty()) {
      if (a.current == a.spec.goal) continue;  // nothing useful to do, idle
      throw PlanningStuckError("agent " + a.spec.id + " has no candidate macro-actions");
    }
    sets.per_agent[i] = std::move(cands);
    planned.push_back(i);
  }
  if (planned.empty()) throw PlanningStuckError("no candidate macro-actions for any agent");

  // Joint candidates: cross product in lexicographic candidate-index order,
  // excluding all-Wait assignments.
  std::vector<std::vector<int>> joints;
  std::vector<int> idx(planned.size(), 0);
  constexpr std::size_t kJointCap = 10000;
  while (true) {
    bool all_wait = true;
    for (std::size_t k = 0; k < planned.size(); ++k) {
      if (!is_wait(sets.per_agent[planned[k]][idx[k]])) all_wait = false;
    }
    if (!all_wait) {
      joints.push_back(idx);
      if (joints.size() > kJointCap) throw Error("joint candidate cap exceeded");
    }
    int k = static_cast<int>(planned.size()) - 1;
    while (k >= 0 && idx[k] + 1 >= static_cast<int>(sets.per_agent[planned[k]].size())) {
      idx[k] = 0;
      --k;
    }
    if (k < 0) break;
    ++idx[k];
  }
  if (joints.empty()) throw PlanningStuckError("only all-Wait joint assignments available");

  // When the unknown-edge space fits inside the rollout budget, weight every
  // world by its exact probability instead of sampling; otherwise Monte Carlo
  // with common random numbers across all candidates.
  int unknown_count = 0;
  for (int si = 0; si < g.stoch_count(); ++si) {
    if (s.belief.status[si] == EdgeStatus::Unknown) ++unknown_count;
  }
  std::vector<WeightedWorld> worlds;
  if (unknown_count < 63 &&
      (1ull << unknown_count) <= static_cast<std::uint64_t>(std::max(1, p.rollout_count))) {
    worlds = enumerate_worlds(g, s.belief);
  } else {
    worlds.reserve(p.rollout_count);
    const double uniform = 1.0 / static_cast<double>(p.rollout_count);
    for (int i = 0; i < p.rollout_count; ++i) {
      worlds.push_back(
          {sample_world(g, s.belief, p.seed + static_cast<std::uint64_t>(i)), uniform});
    }
  }

  auto build_joint = [&](const std::vector<int>& jidx) {
    JointAssignment joint(n);
    for (std::size_t k = 0; k < planned.size(); ++k) {
      joint[planned[k]] = sets.per_agent[planned[k]][jidx[k]];
    }
    return joint;
  };

  std::vector<Evaluated> evals(joints.size());
  auto evaluate_range = [&](std::size_t lo, std::size_t hi) {
    for (std::size_t j = lo; j < hi; ++j) {
      JointAssignment joint = build_joint(joints[j]);
      double sum = 0;
      for (const WeightedWorld& w : worlds) sum += w.prob * rollout_value(g, s, joint, w.world, p);
      Evaluated ev;
      ev.value = sum;
      for (const auto& m : joint) {
        if (m && is_wait(*m)) ++ev.wait_count;
        if (m) ev.total_len += macro_path_length(g, *m);
      }
      evals[j] = ev;
    }
  };

  int threads = std::max(1, p.threads);
  if (threads == 1 || joints.size() < 2) {
    evaluate_range(0, joints.size());
  } else {
    std::vector<std::thread> pool;
    std::size_t chunk = (joints.size() + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
      std::size_t lo = t * chunk;
      std::size_t hi = std::min(joints.size(), lo + chunk);
      if (lo >= hi) break;
      pool.emplace_back(evaluate_range, lo, hi);
    }
    for (auto& th : pool) th.join();
  }

  std::size_t best = 0;
  for (std::size_t j = 1; j < joints.size(); ++j) {
    if (better(evals[j], evals[best])) best = j;
  }
  return build_joint(joints[best]);
}

}  // namespace

JointAssignment plan_joint(const NavGraph& g, const TeamState& s, const PlannerParams& p) {
  return plan_common(g, s, p, /*collaborative=*/true);
}

JointAssignment plan_independent(const NavGraph& g, const TeamState& s, const PlannerParams& p) {
  // Each agent plans as a team of one; no cross-agent coupling.
  const int n = static_cast<int>(s.agents.size());
  JointAssignment out(n);
  for (int i = 0; i < n; ++i) {
    if (s.agents[i].done) continue;
    TeamState solo{{s.agents[i]}, s.belief};
    auto plan = plan_common(g, solo, p, /*collaborative=*/false);
    out[i] = plan[0];
  }
  return out;
}

namespace {

struct OracleCtx {
  const NavGraph& g;
  std::vector<AgentSpec> specs;
  std::vector<bool> always_done;
  double quantum;
  std::map<std::string, std::pair<double, std::shared_ptr<PolicyNode>>> memo;
  std::set<std::string> on_stack;
};

std::string state_key(const EdgeBelief& b, const std::vector<NodeId>& nodes) {
  std::ostringstream os;
  for (auto s : b.status) os << static_cast<int>(s);
  os << '|';
  for (auto nd : nodes) os << nd << ',';
  return os.str();
}

// Expected max future goal-arrival time relative to the epoch start; -inf at
// terminal states (everyone already at goal).
double oracle_solve(OracleCtx& ctx, const EdgeBelief& belief, const std::vector<NodeId>& nodes,
                    std::shared_ptr<PolicyNode>* out) {
  const int n = static_cast<int>(nodes.size());
  bool terminal = true;
  for (int i = 0; i < n; ++i) {
    if (!ctx.always_done[i] && nodes[i] != ctx.specs[i].goal) terminal = false;
  }
  if (terminal) return -kInf;

  std::string key = state_key(belief, nodes);
  if (auto it = ctx.memo.find(key); it != ctx.memo.end()) {
    if (out) *out = it->second.second;
    return it->second.first;
  }
  if (!ctx.on_stack.insert(key).second) return kInf;  // policy cycle

  std::vector<std::vector<std::optional<MacroAction>>> options(n);
  for (int i = 0; i < n; ++i) {
    if (ctx.always_done[i]) {
      options[i] = {std::nullopt};
      continue;
    }
    auto cands = enumerate_candidates(ctx.g, belief, ctx.specs[i], nodes[i], ctx.quantum);
    if (cands.empty()) {
      if (nodes[i] != ctx.specs[i].goal) {
        ctx.on_stack.erase(key);
        ctx.memo[key] = {kInf, nullptr};
        return kInf;
      }
      options[i] = {std::nullopt};
      continue;
    }
    for (auto& m : cands) options[i].emplace_back(std::move(m));
  }

  auto worlds = enumerate_worlds(ctx.g, belief);
  double total_prob = 0;
  for (const auto& ww : worlds) total_prob += ww.prob;

  std::vector<AgentState> agents(n);
  for (int i = 0; i < n; ++i) {
    agents[i] = {ctx.specs[i], nodes[i], 0.0, ctx.always_done[i]};
  }

  double best_value = kInf;
  JointAssignment best_joint;
  std::vector<std::pair<std::vector<std::pair<int, bool>>, std::shared_ptr<PolicyNode>>>
      best_children;

  std::vector<int> idx(n, 0);
  while (true) {
    JointAssignment joint(n);
    bool any_action = false, all_wait = true;
    for (int i = 0; i < n; ++i) {
      joint[i] = options[i][idx[i]];
      if (joint[i]) {
        any_action = true;
        if (!is_wait(*joint[i])) all_wait = false;
      }
    }
    if (any_action && !all_wait) {
      // Group worlds by revealed observations; identical groups share the
      // epoch outcome and successor state.
      std::map<std::vector<std::pair<int, bool>>,
               std::pair<double, detail::EpochResult>>
          groups;
      for (const auto& ww : worlds) {
        auto epoch = detail::simulate_epoch(ctx.g, belief, ww.world, agents, joint);
        std::vector<std::pair<int, bool>> sig;
        for (const auto& ea : epoch.agents) {
          for (const auto& ob : ea.observations) {
            if (std::find(sig.begin(), sig.end(), ob) == sig.end()) sig.push_back(ob);
          }
        }
        std::sort(sig.begin(), sig.end());
        auto [it, inserted] = groups.emplace(sig, std::make_pair(0.0, epoch));
        it->second.first += ww.prob;
      }

      double expect = 0;
      std::vector<std::pair<std::vector<std::pair<int, bool>>, std::shared_ptr<PolicyNode>>>
          children;
      for (auto& [sig, pe] : groups) {
        auto& [prob, epoch] = pe;
        EdgeBelief nb = belief;
        for (const auto& [si, tr] : sig) apply_observation(nb, si, tr);
        std::vector<NodeId> nn(n);
        double arrivals = -kInf;
        for (int i = 0; i < n; ++i) {
          nn[i] = epoch.agents[i].node;
          for (double a : epoch.agents[i].goal_arrivals) arrivals = std::max(arrivals, a);
        }
        std::shared_ptr<PolicyNode> child;
        double future = oracle_solve(ctx, nb, nn, &child);
        double m;
        if (std::isinf(future) && future > 0) {
          m = kInf;
        } else if (std::isinf(future)) {
          m = std::isinf(arrivals) ? epoch.epoch_end : arrivals;
        } else {
          m = std::max(arrivals, epoch.epoch_end + future);
        }
        expect += prob / total_prob * m;
        children.emplace_back(sig, std::move(child));
      }
      if (expect < best_value - kEps) {
        best_value = expect;
        best_joint = joint;
        best_children = std::move(children);
      }
    }

    int k = n - 1;
    while (k >= 0 && idx[k] + 1 >= static_cast<int>(options[k].size())) {
      idx[k] = 0;
      --k;
    }
    if (k < 0) break;
    ++idx[k];
  }

  ctx.on_stack.erase(key);
  auto node = std::make_shared<PolicyNode>();
  node->belief = belief;
  node->nodes = nodes;
  node->joint = best_joint;
  node->children = std::move(best_children);
  ctx.memo[key] = {best_value, node};
  if (out) *out = node;
  return best_value;
}

}  // namespace

OracleResult oracle_expected_makespan(const NavGraph& g, const TeamState& s,
                                      const OracleLimits& limits, double wait_quantum) {
  if (g.node_count() > limits.max_nodes) {
    throw LimitExceeded("graph exceeds oracle node limit");
  }
  if (s.belief.unknown_count() > limits.max_unknown) {
    throw LimitExceeded("instance exceeds oracle unknown-edge limit");
  }
  OracleCtx ctx{g, {}, {}, wait_quantum, {}, {}};
  for (const auto& a : s.agents) {
    ctx.specs.push_back(a.spec);
    ctx.always_done.push_back(a.done);
  }
  std::vector<NodeId> nodes;
  for (const auto& a : s.agents) nodes.push_back(a.current);
  std::shared_ptr<PolicyNode> root;
  double v = oracle_solve(ctx, s.belief, nodes, &root);
  if (std::isinf(v) && v < 0) v = 0.0;  // everyone starts at its goal
  return {std::max(v, 0.0), root};
}

}  // namespace ctnav
