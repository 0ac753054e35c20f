#include <benchmark/benchmark.h>

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "ctnav/scenario.hpp"
#include "ctnav/sim.hpp"
#include "ctnav/team_planner.hpp"

using namespace ctnav;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f.good()) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

struct Fixture {
  NavGraph graph;
  Scenario scenario;
  TeamState state;

  Fixture()
      : graph(NavGraph::load(read_file(std::string(DATA_DIR) + "/two_route_graph.json"))),
        scenario(Scenario::load(read_file(std::string(DATA_DIR) + "/two_route_scenario.json"), graph)) {
    state.belief = EdgeBelief::all_unknown(graph);
    for (const auto& a : scenario.agents) state.agents.push_back(AgentState{a, a.start, 0, false});
  }
};

const Fixture& fixture() {
  static Fixture f;
  return f;
}

void BM_ShortestPath(benchmark::State& st) {
  const Fixture& f = fixture();
  for (auto _ : st) {
    auto r = shortest_path(f.graph, f.state.belief, PathMode::Optimistic,
                           f.scenario.agents[0].start, f.scenario.agents[0].goal);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_ShortestPath);

void BM_RolloutValue(benchmark::State& st) {
  const Fixture& f = fixture();
  PlannerParams p = f.scenario.planner;
  JointAssignment joint = plan_joint(f.graph, f.state, p);
  WorldSample w = sample_world(f.graph, f.state.belief, 1);
  for (auto _ : st) {
    benchmark::DoNotOptimize(rollout_value(f.graph, f.state, joint, w, p));
  }
}
BENCHMARK(BM_RolloutValue);

void BM_PlanJoint(benchmark::State& st) {
  const Fixture& f = fixture();
  PlannerParams p = f.scenario.planner;
  p.rollout_count = static_cast<int>(st.range(0));
  for (auto _ : st) {
    benchmark::DoNotOptimize(plan_joint(f.graph, f.state, p));
  }
}
BENCHMARK(BM_PlanJoint)->Arg(64)->Arg(256)->Arg(1024);

void BM_PlanIndependent(benchmark::State& st) {
  const Fixture& f = fixture();
  PlannerParams p = f.scenario.planner;
  p.mode = PlannerMode::Independent;
  for (auto _ : st) {
    benchmark::DoNotOptimize(plan_independent(f.graph, f.state, p));
  }
}
BENCHMARK(BM_PlanIndependent);

void BM_FullTrial(benchmark::State& st) {
  const Fixture& f = fixture();
  TrialConfig cfg;
  cfg.graph = f.graph;
  cfg.agents = f.scenario.agents;
  cfg.planner = f.scenario.planner;
  cfg.world_override = {{true}};
  for (auto _ : st) {
    benchmark::DoNotOptimize(run_trial(cfg));
  }
}
BENCHMARK(BM_FullTrial);

}  // namespace

BENCHMARK_MAIN();
