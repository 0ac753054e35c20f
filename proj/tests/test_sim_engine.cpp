#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ctnav/sim.hpp"
#include "support/fixtures.hpp"

using namespace ctnav;

namespace {

// Arrival time of the fast agent next to the uncertain edge in the two-route
// fixture: sqrt(40^2 + 30^2) / 8.
const double kSenseArrival = std::sqrt(1000.0) / 8.0;
const double kMakespanTraversable = 100.0 + kSenseArrival;
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
  REQUIRE(false);
  return r.agents.front();
}

int count_events(const TrialResult& r, const std::string& kind) {
  int n = 0;
  for (const auto& e : r.events) n += (e.kind == kind);
  return n;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  REQUIRE(f.good());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// A graph whose single A-G edge is certain, plus nothing to discover.
TrialConfig certain_config() {
  std::vector<Edge> edges;
  edges.push_back(Edge{0, 1, 100.0, std::nullopt});
  TrialConfig cfg;
  cfg.graph = NavGraph::build({"A", "G"}, {{0, 0}, {100, 0}}, edges);
  cfg.agents = {AgentSpec{"slow", 1.0, 0, 1, 0.0}, AgentSpec{"fast", 2.0, 0, 1, 0.0}};
  return cfg;
}

}  // namespace

TEST_CASE("certain routes: agents just drive and the makespan is kinematic") {
  for (PlannerMode mode : {PlannerMode::Collaborative, PlannerMode::Independent}) {
    TrialConfig cfg = certain_config();
    cfg.planner.mode = mode;
    TrialResult r = run_trial(cfg);
    CHECK(r.outcome == TrialResult::Outcome::Complete);
    CHECK(r.makespan == doctest::Approx(100.0));
    CHECK(metrics_for(r, "slow").completion_time == doctest::Approx(100.0));
    CHECK(metrics_for(r, "fast").completion_time == doctest::Approx(50.0));
    for (const auto& a : r.agents) {
      CHECK(a.reached_goal);
      CHECK(a.graph_distance == doctest::Approx(100.0));
      CHECK(a.wait_time == doctest::Approx(0.0));
    }
    // Independent agents never interrupt each other.
    if (mode == PlannerMode::Independent) CHECK(count_events(r, "interrupt") == 0);
  }
}

TEST_CASE("collaborative two-route trial, blocked world") {
  TrialResult r = run_trial(two_route_config(PlannerMode::Collaborative, {{true}}));
  REQUIRE(r.outcome == TrialResult::Outcome::Complete);
  CHECK(r.makespan == doctest::Approx(kMakespanBlocked));
  const auto& husky = metrics_for(r, "husky");
  const auto& jackal = metrics_for(r, "jackal");
  CHECK(husky.wait_time == doctest::Approx(kSenseArrival));
  CHECK(husky.graph_distance == doctest::Approx(260.0));  // detour through the depots
  CHECK(jackal.wait_time == doctest::Approx(0.0));
  CHECK(jackal.graph_distance == doctest::Approx(kJackalDistance));
  CHECK(count_events(r, "interrupt") >= 1);  // the scout's report cuts the wait
  CHECK(count_events(r, "observe") >= 1);
}

TEST_CASE("collaborative two-route trial, traversable world") {
  TrialResult r = run_trial(two_route_config(PlannerMode::Collaborative, {{false}}));
  REQUIRE(r.outcome == TrialResult::Outcome::Complete);
  CHECK(r.makespan == doctest::Approx(kMakespanTraversable));
  CHECK(metrics_for(r, "husky").graph_distance == doctest::Approx(100.0));  // direct route
  CHECK(metrics_for(r, "husky").wait_time == doctest::Approx(kSenseArrival));
}

TEST_CASE("independent two-route trial, blocked world: the slow agent scouts itself") {
  TrialResult collab = run_trial(two_route_config(PlannerMode::Collaborative, {{true}}));
  TrialResult indep = run_trial(two_route_config(PlannerMode::Independent, {{true}}));
  REQUIRE(indep.outcome == TrialResult::Outcome::Complete);
  // Walks 50 m to the uncertain edge, sees the wall, backtracks 50 m and
  // takes the 260 m detour.
  CHECK(metrics_for(indep, "husky").graph_distance == doctest::Approx(360.0));
  CHECK(metrics_for(indep, "husky").graph_distance >
        metrics_for(collab, "husky").graph_distance);
  // Nobody asks the fast agent to scout, so it takes its short direct edge.
  CHECK(metrics_for(indep, "jackal").graph_distance == doctest::Approx(60.0));
  CHECK(metrics_for(indep, "jackal").graph_distance <
        metrics_for(collab, "jackal").graph_distance);
  CHECK(indep.makespan == doctest::Approx(360.0));
  CHECK(count_events(indep, "interrupt") == 0);
}

TEST_CASE("expected closed-loop makespans on the two-route instance") {
  TrialConfig collab = two_route_config(PlannerMode::Collaborative, std::nullopt);
  TrialConfig indep = two_route_config(PlannerMode::Independent, std::nullopt);
  CHECK(exact_policy_makespan(collab, PlannerMode::Collaborative) ==
        doctest::Approx(183.952847075210474).epsilon(1e-12));
  CHECK(exact_policy_makespan(indep, PlannerMode::Independent) ==
        doctest::Approx(230.0).epsilon(1e-12));
}

TEST_CASE("expected makespan is the probability mix of the forced realizations") {
  // A single uncertain shortcut (rho 0.3) against a certain long detour.
  std::vector<Edge> edges;
  edges.push_back(Edge{0, 1, 100.0, 0.3});                       // A-G shortcut
  edges.push_back(Edge{0, 2, 80.0, std::nullopt});               // A-D
  edges.push_back(Edge{2, 3, 100.0, std::nullopt});              // D-E
  edges.push_back(Edge{3, 1, 80.0, std::nullopt});               // E-G
  TrialConfig cfg;
  cfg.graph = NavGraph::build({"A", "G", "D", "E"},
                              {{0, 0}, {100, 0}, {0, 80}, {100, 80}}, edges);
  cfg.agents = {AgentSpec{"a", 1.0, 0, 1, 0.0}};

  TrialConfig blocked = cfg;
  blocked.world_override = {{true}};
  TrialConfig open = cfg;
  open.world_override = {{false}};
  double mb = run_trial(blocked).makespan;
  double mt = run_trial(open).makespan;
  CHECK(mb > mt);
  CHECK(exact_policy_makespan(cfg, PlannerMode::Collaborative) ==
        doctest::Approx(0.3 * mb + 0.7 * mt).epsilon(1e-12));

  // With no uncertainty the expectation degenerates to the single trial.
  TrialConfig certain = certain_config();
  CHECK(exact_policy_makespan(certain, PlannerMode::Collaborative) ==
        doctest::Approx(run_trial(certain).makespan).epsilon(1e-12));
}

TEST_CASE("expected-makespan enumeration refuses more than two unknowns") {
  std::vector<Edge> edges;
  edges.push_back(Edge{0, 1, 10.0, std::nullopt});
  edges.push_back(Edge{0, 2, 10.0, std::nullopt});
  edges.push_back(Edge{0, 3, 10.0, std::nullopt});
  edges.push_back(Edge{1, 2, 10.0, 0.5});
  edges.push_back(Edge{2, 3, 10.0, 0.5});
  edges.push_back(Edge{1, 3, 14.0, 0.5});
  TrialConfig cfg;
  cfg.graph = NavGraph::build({"A", "B", "C", "D"},
                              {{0, 0}, {10, 0}, {0, 10}, {-10, 0}}, edges);
  cfg.agents = {AgentSpec{"a", 1.0, 0, 3, 0.0}};
  CHECK_THROWS_AS(exact_policy_makespan(cfg, PlannerMode::Collaborative), LimitExceeded);
}

TEST_CASE("merging conflicting reports: halt throws, trust-latest overwrites") {
  NavGraph g = testsupport::line_graph();
  MacroResult first;
  first.observations = {{0, true}};
  MacroResult second;
  second.observations = {{0, false}};

  EdgeBelief b = EdgeBelief::all_unknown(g);
  CHECK_THROWS_AS(merge_observations(b, {first, second}, ConflictPolicy::Halt),
                  ObservationConflict);

  b = EdgeBelief::all_unknown(g);
  merge_observations(b, {first, second}, ConflictPolicy::TrustLatest);
  CHECK(b.status[0] == EdgeStatus::KnownBlocked);

  b = EdgeBelief::all_unknown(g);
  merge_observations(b, {second, first}, ConflictPolicy::TrustLatest);
  CHECK(b.status[0] == EdgeStatus::KnownTraversable);

  // Agreeing reports are fine under either policy.
  b = EdgeBelief::all_unknown(g);
  merge_observations(b, {first, first}, ConflictPolicy::Halt);
  CHECK(b.status[0] == EdgeStatus::KnownTraversable);
}

TEST_CASE("output files are byte-identical across reruns and thread counts") {
  namespace fs = std::filesystem;
  fs::path base = fs::temp_directory_path() / "ctnav_determinism_test";
  fs::remove_all(base);

  std::vector<std::string> dirs;
  for (int variant = 0; variant < 3; ++variant) {
    TrialConfig cfg = two_route_config(PlannerMode::Collaborative, std::nullopt);
    cfg.world_seed = 42;
    cfg.planner.threads = (variant == 2) ? 4 : 1;
    TrialResult r = run_trial(cfg);
    std::string dir = (base / ("v" + std::to_string(variant))).string();
    write_outputs(r, cfg, dir, "trial");
    dirs.push_back(dir);
  }
  for (const char* file : {"trial_metrics.csv", "trial_events.ndjson"}) {
    std::string ref = slurp(fs::path(dirs[0]) / file);
    CHECK(ref == slurp(fs::path(dirs[1]) / file));
    CHECK(ref == slurp(fs::path(dirs[2]) / file));
  }
  fs::remove_all(base);
}

TEST_CASE("message delay shifts time but not the assignment sequence") {
  std::vector<std::vector<std::pair<std::string, std::string>>> assigns;
  std::vector<double> makespans;
  for (double delay : {0.0, 1.0, 5.0}) {
    TrialConfig cfg = two_route_config(PlannerMode::Collaborative, {{true}});
    cfg.message_delay = delay;
    TrialResult r = run_trial(cfg);
    REQUIRE(r.outcome == TrialResult::Outcome::Complete);
    makespans.push_back(r.makespan);
    std::vector<std::pair<std::string, std::string>> seq;
    for (const auto& e : r.events) {
      if (e.kind == "assign") seq.emplace_back(e.agent, e.detail_json);
    }
    assigns.push_back(std::move(seq));
  }
  CHECK(assigns[1] == assigns[0]);
  CHECK(assigns[2] == assigns[0]);
  // Each report+interrupt round trip costs the slow agent two delays.
  CHECK(makespans[0] == doctest::Approx(kMakespanBlocked));
  CHECK(makespans[1] > makespans[0]);
  CHECK(makespans[2] > makespans[1]);
}

TEST_CASE("a failed trial reports its reason in the metrics") {
  namespace fs = std::filesystem;
  TrialConfig cfg = two_route_config(PlannerMode::Collaborative, {{true}});
  cfg.step_budget = 3;
  TrialResult r = run_trial(cfg);
  REQUIRE(r.outcome == TrialResult::Outcome::Failed);
  CHECK(r.fail_reason == "step budget exceeded");

  fs::path dir = fs::temp_directory_path() / "ctnav_failure_test";
  fs::remove_all(dir);
  write_outputs(r, cfg, dir.string(), "trial");
  std::string metrics = slurp(dir / "trial_metrics.csv");
  CHECK(metrics.find("failed(step budget exceeded)") != std::string::npos);
  // Header + one row per agent + the TEAM summary row.
  CHECK(std::count(metrics.begin(), metrics.end(), '\n') == 4);
  CHECK(metrics.find(",TEAM,") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("continuous fidelity produces a trajectory and consistent metrics") {
  TrialConfig cfg = two_route_config(PlannerMode::Collaborative, {{true}});
  cfg.fidelity = Fidelity::Continuous;
  cfg.scene = Scene::load(testsupport::read_file(testsupport::data_path("two_route_scene.json")),
                          cfg.graph);
  TrialResult r = run_trial(cfg);
  REQUIRE(r.outcome == TrialResult::Outcome::Complete);
  CHECK_FALSE(r.trajectory.empty());
  // Trajectory timestamps never decrease per agent.
  double last_husky = -1.0;
  for (const auto& [t, id, pose] : r.trajectory) {
    (void)pose;
    if (id == "husky") {
      CHECK(t >= last_husky);
      last_husky = t;
    }
  }
  for (const auto& a : r.agents) CHECK(a.reached_goal);
  CHECK(r.makespan > 0.0);
}
