// End-to-end acceptance checks for the navigation stack. Each criterion
// prints exactly one PASS/FAIL line; the process exits nonzero if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "ctnav/executor.hpp"
#include "ctnav/sim.hpp"
#include "ctnav/team_planner.hpp"
#include "ctnav/world2d.hpp"

#define REQUIRE(x)                                            \
  do {                                                        \
    if (!(x)) throw std::runtime_error("requirement: " #x);   \
  } while (0)

#include "support/corpus.hpp"
#include "support/fixtures.hpp"

using namespace ctnav;
namespace fs = std::filesystem;

namespace {

struct Checker {
  bool ok{true};
  std::string why;

  void expect(bool cond, const std::string& msg) {
    if (cond) return;
    ok = false;
    if (!why.empty()) why += "; ";
    why += msg;
  }
};

bool approx(double a, double b, double eps = 1e-9) { return std::abs(a - b) <= eps; }

// Derived quantities of the two-route fixture (two_route data files): the fast
// agent reaches the sensing spot after sqrt(40^2+30^2)/8 seconds.
const double kSenseArrival = std::sqrt(1000.0) / 8.0;
const double kMakespanBlocked = 260.0 + kSenseArrival;
const double kJackalDistance = std::sqrt(1000.0) + std::sqrt(3400.0);

TrialConfig two_route_config(PlannerMode mode, std::optional<std::vector<bool>> override_world) {
  TrialConfig cfg;
  cfg.graph = testsupport::two_route_graph();
  Scenario sc = testsupport::two_route_scenario(cfg.graph);
  cfg.agents = sc.agents;
  cfg.planner = sc.planner;
  cfg.planner.mode = mode;
  cfg.world_override = std::move(override_world);
  return cfg;
}

const AgentMetrics& metrics_for(const TrialResult& r, const std::string& id) {
  for (const auto& a : r.agents) {
    if (a.id == id) return a;
  }
  throw std::runtime_error("no metrics for agent " + id);
}

// First assign event's macro type for one agent ("wait", "navigate_goal", ...).
std::string first_assign_type(const TrialResult& r, const std::string& agent) {
  for (const auto& e : r.events) {
    if (e.kind != "assign" || e.agent != agent) continue;
    auto pos = e.detail_json.find("\"type\":\"");
    if (pos == std::string::npos) return "";
    pos += 8;
    return e.detail_json.substr(pos, e.detail_json.find('"', pos) - pos);
  }
  return "";
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  REQUIRE(f.good());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// --- criterion 1: collaborative sensing on the two-route instance ----------

void criterion_team_sensing(Checker& c) {
  TrialResult collab = run_trial(two_route_config(PlannerMode::Collaborative, {{true}}));
  TrialResult indep = run_trial(two_route_config(PlannerMode::Independent, {{true}}));
  c.expect(collab.outcome == TrialResult::Outcome::Complete, "collaborative trial failed");
  c.expect(indep.outcome == TrialResult::Outcome::Complete, "independent trial failed");
  if (!c.ok) return;

  // The team plan: the fast agent scouts, the slow agent holds.
  c.expect(first_assign_type(collab, "jackal") == "navigate_and_sense",
           "fast agent was not assigned a sensing macro");
  c.expect(first_assign_type(collab, "husky") == "wait", "slow agent was not assigned a wait");

  const auto& ch = metrics_for(collab, "husky");
  const auto& cj = metrics_for(collab, "jackal");
  const auto& ih = metrics_for(indep, "husky");
  const auto& ij = metrics_for(indep, "jackal");
  c.expect(approx(ch.graph_distance, 260.0, 1e-6), "team slow-agent distance != 260");
  c.expect(approx(ih.graph_distance, 360.0, 1e-6), "solo slow-agent distance != 360");
  c.expect(ch.graph_distance < ih.graph_distance, "slow agent drove no less with teamwork");
  c.expect(approx(cj.graph_distance, kJackalDistance, 1e-6), "scout detour distance wrong");
  c.expect(cj.graph_distance > ij.graph_distance, "scout drove no more with teamwork");
  c.expect(ch.wait_time > 0.0, "slow agent never waited under teamwork");
  c.expect(approx(ih.wait_time, 0.0), "solo slow agent waited");
  c.expect(approx(collab.makespan, kMakespanBlocked, 1e-6), "team makespan wrong");
  c.expect(collab.makespan < indep.makespan, "teamwork did not reduce the makespan");
}

// --- criterion 2: planner quality on the randomized corpus -----------------

void criterion_corpus_quality(Checker& c) {
  int near = 0, dominated = 0;
  const int n = 200;
  for (unsigned seed = 0; seed < n; ++seed) {
    testsupport::Instance inst = testsupport::make_instance(seed);
    TrialConfig cfg;
    cfg.graph = inst.graph;
    cfg.agents = inst.agents;
    cfg.planner.rollout_count = 256;
    cfg.planner.seed = 7;
    TeamState st;
    st.belief = EdgeBelief::all_unknown(cfg.graph);
    for (const auto& a : cfg.agents) st.agents.push_back(AgentState{a, a.start, 0.0, false});
    double optimum = oracle_expected_makespan(cfg.graph, st).value;
    double collab = exact_policy_makespan(cfg, PlannerMode::Collaborative);
    double indep = exact_policy_makespan(cfg, PlannerMode::Independent);
    if (collab <= 1.10 * optimum + 1e-9) ++near;
    if (collab <= indep + 1e-9) ++dominated;
  }
  c.expect(near >= 9 * n / 10, "within 10% of optimal on only " + std::to_string(near) + "/200");
  c.expect(dominated == n,
           "beaten by the independent baseline on " + std::to_string(n - dominated) + "/200");
}

// --- criterion 3: interrupt cut-point semantics -----------------------------

void criterion_interrupts(Checker& c) {
  NavGraph line = testsupport::line_graph();
  EdgeBelief unknown = EdgeBelief::all_unknown(line);
  AgentSpec spec{"a", 1.0, 0, 3, 0.0};

  {  // Interrupt while driving the first edge: stop at its far node, no sensing.
    AgentExec ex(line, spec, 0, 0, NavigateAndSense{{0, 1, 2}, 0}, unknown);
    ex.begin_primitive();
    ex.on_interrupt();
    auto d = ex.on_primitive_result(true);
    c.expect(std::holds_alternative<AgentExec::Done>(d), "mid-edge interrupt did not terminate");
    MacroResult r = ex.take_result();
    c.expect(r.final_node == 1, "mid-edge interrupt did not stop at the next node");
    c.expect(r.observations.empty(), "interrupted before the target yet it was observed");
  }
  {  // Interrupt on the final approach: the adjacent observation still runs.
    AgentExec ex(line, spec, 0, 0, NavigateAndSense{{0, 1, 2}, 0}, unknown);
    ex.begin_primitive();
    ex.on_primitive_result(true);
    ex.begin_primitive();
    ex.on_interrupt();
    auto d = ex.on_primitive_result(true);
    c.expect(std::holds_alternative<AgentExec::Continue>(d), "trailing observation was dropped");
    if (std::holds_alternative<AgentExec::Continue>(d)) {
      ex.begin_primitive();
      ex.record_observation(0, false);
      ex.on_primitive_result(true);
    }
    MacroResult r = ex.take_result();
    c.expect(r.final_node == 2, "final-approach interrupt stopped at the wrong node");
    c.expect(r.observations == std::vector<std::pair<int, bool>>{{0, false}},
             "observation missing from the report");
  }
  {  // Interrupting a wait cancels it.
    AgentExec ex(line, spec, 0, 0, Wait{10.0}, unknown);
    ex.begin_primitive();
    c.expect(ex.on_interrupt().cancel_wait, "wait interrupt did not cancel the wait");
  }

  // Randomized interrupt times: the reported cut node is always the node the
  // agent actually stands at.
  std::mt19937_64 rng(2026);
  auto pick = [&](int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); };
  int trials_ok = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    testsupport::Instance inst = testsupport::make_instance(trial % 100);
    const NavGraph& g = inst.graph;
    std::vector<NodeId> path{pick(g.node_count())};
    for (int hops = 1 + pick(5); hops > 0; --hops) {
      const auto& nb = g.neighbors(path.back());
      path.push_back(nb[pick(static_cast<int>(nb.size()))].first);
    }
    MacroAction macro = NavigateGoal{path};
    for (const auto& [nbr, e] : g.neighbors(path.back())) {
      if (g.stoch_index(e) >= 0 && pick(2) == 0) {
        macro = NavigateAndSense{path, g.stoch_index(e)};
        break;
      }
    }
    EdgeBelief b = EdgeBelief::all_unknown(g);
    WorldSample world = sample_world(g, b, static_cast<std::uint64_t>(trial));
    AgentSpec a{"a", 1.0, path.front(), path.back(), 0.0};
    AgentExec ex(g, a, 0, path.front(), macro, b);
    const int cut = pick(static_cast<int>(ex.queue().size()) * 2 + 1);

    NodeId at = path.front();
    int step = 0;
    bool fine = true;
    while (!ex.finished()) {
      const Primitive* pr = ex.current();
      if (pr == nullptr) break;
      if (2 * step == cut && !ex.interrupted() && ex.on_interrupt().at_boundary) break;
      ex.begin_primitive();
      if (2 * step + 1 == cut && !ex.interrupted()) ex.on_interrupt();
      if (const auto* ob = std::get_if<ObserveEdgePrim>(pr)) {
        ex.record_observation(ob->target, !world.blocked[ob->target]);
      }
      auto d = ex.on_primitive_result(true);
      if (const auto* nav = std::get_if<NavigateEdgePrim>(pr)) at = nav->to;
      ++step;
      if (std::holds_alternative<AgentExec::Done>(d)) break;
      if (std::holds_alternative<AgentExec::Retry>(d)) {
        fine = false;
        break;
      }
    }
    MacroResult r = ex.take_result();
    fine = fine && r.outcome == MacroOutcome::Success && r.final_node == at &&
           r.final_node >= 0 && r.final_node < g.node_count();
    for (const auto& [si, tv] : r.observations) {
      fine = fine && si >= 0 && si < g.stoch_count();
    }
    trials_ok += fine;
  }
  c.expect(trials_ok == 1000, "randomized interrupt trials: " + std::to_string(1000 - trials_ok) +
                                  "/1000 ended at an inconsistent node");
}

// --- criterion 4: goal retries -----------------------------------------------

void criterion_retries(Checker& c) {
  NavGraph line = testsupport::line_graph();
  EdgeBelief b = EdgeBelief::all_unknown(line);
  b.status[0] = EdgeStatus::KnownTraversable;
  AgentSpec spec{"a", 1.0, 0, 3, 0.0};

  // Fixed probe order around a blocked target.
  auto alts = alternative_goals({10, 0}, 0.5);
  c.expect(approx(alts[0].x, 10.5) && approx(alts[0].y, 0.0) && approx(alts[1].x, 9.5) &&
               approx(alts[2].y, 0.5) && approx(alts[3].y, -0.5),
           "alternative goals out of order");

  {  // Target cell blocked, (x, y+0.5) free: the fourth attempt lands it.
    AgentExec ex(line, spec, 0, 0, NavigateGoal{{0, 1, 2, 3}}, b);
    ex.begin_primitive();
    int attempt = 0;
    Vec2 last{};
    for (int i = 0; i < 3; ++i) {  // original goal and the two x-offsets blocked
      auto d = ex.on_primitive_result(false);
      if (const auto* r = std::get_if<AgentExec::Retry>(&d)) {
        attempt = r->attempt;
        last = r->alt_goal;
      }
    }
    c.expect(attempt == 3 && approx(last.x, 10.0) && approx(last.y, 0.5),
             "third retry is not (x, y+0.5)");
    auto d = ex.on_primitive_result(true);  // fourth attempt overall succeeds
    c.expect(std::holds_alternative<AgentExec::Continue>(d), "successful retry did not continue");
    c.expect(ex.node() == 1, "retry success did not count as arrival");
  }
  {  // All five spots blocked: the macro fails cleanly.
    AgentExec ex(line, spec, 0, 0, NavigateGoal{{0, 1, 2, 3}}, b);
    ex.begin_primitive();
    for (int i = 0; i < 4; ++i) ex.on_primitive_result(false);
    auto d = ex.on_primitive_result(false);
    c.expect(std::holds_alternative<AgentExec::Done>(d), "fifth failure did not end the macro");
    MacroResult r = ex.take_result();
    c.expect(r.outcome == MacroOutcome::Failure, "exhausted retries not reported as failure");
    c.expect(r.final_node == 0, "failed macro moved the agent");
  }

  // Continuous trial against an unreachable goal: the trial fails, never crashes.
  std::vector<Edge> edges;
  edges.push_back(Edge{0, 1, 30.0, std::nullopt});
  TrialConfig cfg;
  cfg.graph = NavGraph::build({"A", "G"}, {{0, 0}, {30, 0}}, edges);
  cfg.agents = {AgentSpec{"a", 1.0, 0, 1, 0.0}};
  cfg.fidelity = Fidelity::Continuous;
  Scene s;
  s.bounds = RectObstacle{-5, -10, 45, 10};
  s.obstacles.push_back(RectObstacle{24, -6, 25, 6});  // box walls around G=(30,0)
  s.obstacles.push_back(RectObstacle{35, -6, 36, 6});
  s.obstacles.push_back(RectObstacle{24, -6, 36, -5});
  s.obstacles.push_back(RectObstacle{24, 5, 36, 6});
  cfg.scene = s;
  TrialResult r = run_trial(cfg);
  c.expect(r.outcome == TrialResult::Outcome::Failed, "walled-in goal did not fail the trial");
  c.expect(!r.fail_reason.empty(), "failed trial carries no reason");
}

// --- criterion 5: look-ahead observation and conflicting reports -------------

void criterion_observation(Checker& c) {
  auto span = [](Vec2 a, Vec2 b) {
    std::vector<Edge> edges;
    edges.push_back(Edge{0, 1, distance(a, b), 0.5});
    return NavGraph::build({"A", "B"}, {a, b}, edges);
  };
  auto empty_scene = [](double x0, double y0, double x1, double y1) {
    Scene s;
    s.bounds = RectObstacle{x0, y0, x1, y1};
    return s;
  };

  {  // A clear edge reads traversable.
    NavGraph g = span({1, 8}, {41, 8});
    OccupancyGrid grid = rasterize(empty_scene(0, 0, 42, 16), g, WorldSample{{false}, 0}, 0.25, 0.25);
    c.expect(observe_edge_traversable(grid, {1, 8}, {1, 8}, {41, 8}), "clear edge read blocked");
  }
  {  // A wall forcing a >20% detour inside the look-ahead reads blocked.
    NavGraph g = span({1, 8}, {41, 8});
    Scene s = empty_scene(0, 0, 42, 16);
    s.obstacles.push_back(RectObstacle{15.5, 2, 16.5, 14});
    OccupancyGrid grid = rasterize(s, g, WorldSample{{false}, 0}, 0.25, 0.25);
    c.expect(!observe_edge_traversable(grid, {1, 8}, {1, 8}, {41, 8}),
             "in-range wall read traversable");
  }
  {  // A wall beyond the look-ahead is mis-sensed from one end only; merging
    // the two reports under the halt policy raises a conflict.
    NavGraph g = span({1, 8}, {61, 8});
    Scene s = empty_scene(0, 0, 62, 16);
    s.obstacles.push_back(RectObstacle{45.5, 0, 46.5, 16});  // 44.5 m from A, 14.5 m from B
    OccupancyGrid grid = rasterize(s, g, WorldSample{{false}, 0}, 0.25, 0.25);
    bool from_near = observe_edge_traversable(grid, {1, 8}, {1, 8}, {61, 8});
    bool from_far = observe_edge_traversable(grid, {61, 8}, {61, 8}, {1, 8});
    c.expect(from_near, "distant wall should be invisible to the 20 m look-ahead");
    c.expect(!from_far, "nearby wall should be seen from the other end");

    MacroResult optimist;
    optimist.observations = {{0, from_near}};
    MacroResult realist;
    realist.observations = {{0, from_far}};
    EdgeBelief b = EdgeBelief::all_unknown(g);
    bool conflicted = false;
    try {
      merge_observations(b, {optimist, realist}, ConflictPolicy::Halt);
    } catch (const ObservationConflict&) {
      conflicted = true;
    }
    c.expect(conflicted, "contradictory reports merged without a conflict");
  }
}

// --- criterion 6: determinism ------------------------------------------------

void criterion_determinism(Checker& c) {
  fs::path base = fs::temp_directory_path() / "ctnav_acceptance_determinism";
  fs::remove_all(base);
  std::vector<fs::path> dirs;
  for (int variant = 0; variant < 3; ++variant) {
    TrialConfig cfg = two_route_config(PlannerMode::Collaborative, std::nullopt);
    cfg.world_seed = 42;
    cfg.planner.threads = (variant == 2) ? 4 : 1;
    TrialResult r = run_trial(cfg);
    fs::path dir = base / ("v" + std::to_string(variant));
    write_outputs(r, cfg, dir.string(), "trial");
    dirs.push_back(dir);
  }
  for (const char* file : {"trial_metrics.csv", "trial_events.ndjson"}) {
    std::string ref = slurp(dirs[0] / file);
    c.expect(ref == slurp(dirs[1] / file), std::string(file) + " differs across reruns");
    c.expect(ref == slurp(dirs[2] / file), std::string(file) + " differs across thread counts");
  }
  fs::remove_all(base);

  // Message latency shifts timestamps but never the macro sequence.
  std::vector<std::vector<std::pair<std::string, std::string>>> assigns;
  std::vector<double> makespans;
  for (double delay : {0.0, 1.0, 5.0}) {
    TrialConfig cfg = two_route_config(PlannerMode::Collaborative, {{true}});
    cfg.message_delay = delay;
    TrialResult r = run_trial(cfg);
    c.expect(r.outcome == TrialResult::Outcome::Complete, "delayed trial failed");
    makespans.push_back(r.makespan);
    std::vector<std::pair<std::string, std::string>> seq;
    for (const auto& e : r.events) {
      if (e.kind == "assign") seq.emplace_back(e.agent, e.detail_json);
    }
    assigns.push_back(std::move(seq));
  }
  c.expect(assigns[1] == assigns[0] && assigns[2] == assigns[0],
           "message delay changed the macro sequence");
  c.expect(makespans[0] < makespans[1] && makespans[1] < makespans[2],
           "message delay did not shift completion times");
}

// --- criterion 7: zero uncertainty degenerates to shortest paths -------------

void criterion_certain_world(Checker& c) {
  std::vector<Edge> edges;
  edges.push_back(Edge{0, 1, 100.0, std::nullopt});
  TrialConfig cfg;
  cfg.graph = NavGraph::build({"A", "G"}, {{0, 0}, {100, 0}}, edges);
  cfg.agents = {AgentSpec{"slow", 1.0, 0, 1, 0.0}, AgentSpec{"fast", 2.0, 0, 1, 0.0}};

  for (PlannerMode mode : {PlannerMode::Collaborative, PlannerMode::Independent}) {
    TrialConfig g = cfg;
    g.planner.mode = mode;
    TrialResult r = run_trial(g);
    const char* label =
        mode == PlannerMode::Collaborative ? "team planner" : "independent planner";
    c.expect(r.outcome == TrialResult::Outcome::Complete, std::string(label) + " trial failed");
    c.expect(approx(r.makespan, 100.0), std::string(label) + ": makespan != max distance/speed");
    c.expect(approx(metrics_for(r, "fast").completion_time, 50.0),
             std::string(label) + ": fast agent off its kinematic time");
    for (const auto& a : r.agents) {
      c.expect(approx(a.graph_distance, 100.0),
               std::string(label) + ": " + a.id + " left the shortest path");
      c.expect(approx(a.wait_time, 0.0), std::string(label) + ": " + a.id + " waited");
      c.expect(first_assign_type(r, a.id) == "navigate_goal",
               std::string(label) + ": " + a.id + " got a non-driving macro");
    }
  }

  // Continuous fidelity: same story, with the goal-region radius and the
  // controller step as the only slack.
  TrialConfig cont = cfg;
  cont.fidelity = Fidelity::Continuous;
  Scene s;
  s.bounds = RectObstacle{-5, -5, 105, 5};
  cont.scene = s;
  TrialResult r = run_trial(cont);
  c.expect(r.outcome == TrialResult::Outcome::Complete, "continuous certain trial failed");
  double slack = cont.goal_radius + 1.0;
  c.expect(r.makespan >= 100.0 - slack && r.makespan <= 100.0 + 1.0,
           "continuous makespan " + std::to_string(r.makespan) + " outside [95, 101]");
  for (const auto& a : r.agents) {
    c.expect(a.reached_goal, "continuous: " + a.id + " never reached the goal region");
  }
}

}  // namespace

int main() {
  std::setvbuf(stdout, nullptr, _IONBF, 0);
  struct Entry {
    const char* name;
    double budget_s;
    void (*fn)(Checker&);
  };
  const Entry entries[] = {
      {"collaborative sensing beats solo planning on the two-route instance", 5.0,
       criterion_team_sensing},
      {"near-optimal and never worse than solo on 200 random instances", 600.0,
       criterion_corpus_quality},
      {"interrupts cut macros at the next node and keep adjacent observations", 30.0,
       criterion_interrupts},
      {"blocked goals are retried in fixed order, then fail cleanly", 10.0, criterion_retries},
      {"look-ahead observation: clear, detour-blocked, and conflicting reads", 30.0,
       criterion_observation},
      {"byte-identical logs; latency shifts time, not decisions", 60.0, criterion_determinism},
      {"zero uncertainty degenerates to pure shortest-path driving", 60.0,
       criterion_certain_world},
  };

  int failed = 0;
  int idx = 0;
  for (const Entry& e : entries) {
    ++idx;
    Checker c;
    auto t0 = std::chrono::steady_clock::now();
    try {
      e.fn(c);
    } catch (const std::exception& ex) {
      c.expect(false, std::string("exception: ") + ex.what());
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    c.expect(secs < e.budget_s, "took " + std::to_string(secs) + " s, budget " +
                                    std::to_string(e.budget_s) + " s");
    std::printf("criterion %d: %s [%s, %.2fs]%s%s\n", idx, e.name, c.ok ? "PASS" : "FAIL", secs,
                c.ok ? "" : " -- ", c.why.c_str());
    failed += !c.ok;
  }
  return failed == 0 ? 0 : 1;
}
