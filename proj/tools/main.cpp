// Command-line front end: run trial batches, query the exact oracle, and
// statically validate graph/scene pairs.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "ctnav/scenario.hpp"
#include "ctnav/sim.hpp"

namespace {

using namespace ctnav;

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::pair<std::uint64_t, std::uint64_t> parse_seeds(const std::string& spec) {
  auto pos = spec.find("..");
  try {
    if (pos == std::string::npos) {
      std::uint64_t s = std::stoull(spec);
      return {s, s};
    }
    std::uint64_t a = std::stoull(spec.substr(0, pos));
    std::uint64_t b = std::stoull(spec.substr(pos + 2));
    if (b < a) throw ConfigError("--seeds range '" + spec + "' is empty");
    return {a, b};
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    throw ConfigError("--seeds expects N or A..B, got '" + spec + "'");
  }
}

std::string fmt6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

struct CommonOpts {
  std::string graph_path;
  std::string scene_path;
  std::string scenario_path;
  std::string planner = "both";
  std::string fidelity = "graph";
  std::string seeds = "0";
  std::string out_dir = "out";
  std::optional<int> rollouts;
  std::optional<double> wait_quantum;
  double message_delay = 0.0;
  std::optional<int> threads;
};

TrialConfig make_config(const CommonOpts& o, const NavGraph& g, const Scenario& sc) {
  TrialConfig cfg;
  cfg.graph = g;
  cfg.agents = sc.agents;
  cfg.planner = sc.planner;
  if (o.rollouts) cfg.planner.rollout_count = *o.rollouts;
  if (o.wait_quantum) cfg.planner.wait_quantum = *o.wait_quantum;
  if (o.threads) cfg.planner.threads = *o.threads;
  cfg.message_delay = o.message_delay;
  if (o.fidelity == "continuous") {
    if (o.scene_path.empty())
      throw ConfigError("--fidelity continuous requires --scene");
    cfg.fidelity = Fidelity::Continuous;
    cfg.scene = Scene::load(slurp(o.scene_path), g);
  } else if (o.fidelity != "graph") {
    throw ConfigError("--fidelity must be graph or continuous");
  }
  return cfg;
}

int cmd_run(const CommonOpts& o) {
  NavGraph g = NavGraph::load(slurp(o.graph_path));
  Scenario sc = Scenario::load(slurp(o.scenario_path), g);
  TrialConfig base = make_config(o, g, sc);

  std::vector<PlannerMode> modes;
  if (o.planner == "collaborative" || o.planner == "both")
    modes.push_back(PlannerMode::Collaborative);
  if (o.planner == "independent" || o.planner == "both")
    modes.push_back(PlannerMode::Independent);
  if (modes.empty())
    throw ConfigError("--planner must be collaborative, independent, or both");

  auto [s0, s1] = parse_seeds(o.seeds);
  struct Stat {
    int trials = 0, complete = 0;
    double mk_sum = 0, mk_min = 1e300, mk_max = -1e300;
    double dist_sum = 0, wait_sum = 0;
  };
  std::map<std::string, Stat> stats;
  bool any_failed = false;

  for (PlannerMode mode : modes) {
    for (std::uint64_t seed = s0; seed <= s1; ++seed) {
      TrialConfig cfg = base;
      cfg.planner.mode = mode;
      cfg.world_seed = seed;
      TrialResult r = run_trial(cfg);
      std::string name = planner_mode_name(mode) + "_seed" + std::to_string(seed);
      write_outputs(r, cfg, o.out_dir, name);
      Stat& st = stats[planner_mode_name(mode)];
      ++st.trials;
      if (r.outcome == TrialResult::Outcome::Complete) {
        ++st.complete;
        st.mk_sum += r.makespan;
        st.mk_min = std::min(st.mk_min, r.makespan);
        st.mk_max = std::max(st.mk_max, r.makespan);
        for (const auto& a : r.agents) {
          st.dist_sum += a.graph_distance;
          st.wait_sum += a.wait_time;
        }
      } else {
        any_failed = true;
        std::cerr << name << " failed: " << r.fail_reason << "\n";
      }
    }
  }

  std::filesystem::create_directories(o.out_dir);
  std::ofstream f(std::filesystem::path(o.out_dir) / "summary.csv");
  if (!f) throw IoError("cannot write summary.csv in '" + o.out_dir + "'");
  f << "planner,trials,complete,mean_makespan_s,min_makespan_s,max_makespan_s,"
       "mean_team_distance_m,mean_team_wait_s\n";
  for (const auto& [name, st] : stats) {
    double n = std::max(1, st.complete);
    f << name << ',' << st.trials << ',' << st.complete << ','
      << fmt6(st.complete ? st.mk_sum / n : -1.0) << ','
      << fmt6(st.complete ? st.mk_min : -1.0) << ',' << fmt6(st.complete ? st.mk_max : -1.0)
      << ',' << fmt6(st.dist_sum / n) << ',' << fmt6(st.wait_sum / n) << '\n';
  }
  return any_failed ? 1 : 0;
}

int cmd_oracle(const CommonOpts& o) {
  NavGraph g = NavGraph::load(slurp(o.graph_path));
  Scenario sc = Scenario::load(slurp(o.scenario_path), g);
  TrialConfig cfg = make_config(o, g, sc);

  TeamState s;
  s.belief = EdgeBelief::all_unknown(g);
  for (const auto& a : sc.agents) s.agents.push_back(AgentState{a, a.start, 0.0, false});
  try {
    OracleResult oracle =
        oracle_expected_makespan(g, s, OracleLimits{}, cfg.planner.wait_quantum);
    double collab = exact_policy_makespan(cfg, PlannerMode::Collaborative);
    double indep = exact_policy_makespan(cfg, PlannerMode::Independent);
    std::cout << "oracle_s,collaborative_s,independent_s,collaborative_ratio,independent_ratio\n"
              << fmt6(oracle.value) << ',' << fmt6(collab) << ',' << fmt6(indep) << ','
              << fmt6(oracle.value > 0 ? collab / oracle.value : 1.0) << ','
              << fmt6(oracle.value > 0 ? indep / oracle.value : 1.0) << '\n';
  } catch (const LimitExceeded& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

int cmd_validate(const std::string& graph_path, const std::string& scene_path) {
  std::vector<std::string> violations;
  std::optional<NavGraph> g;
  try {
    g = NavGraph::load(slurp(graph_path));
  } catch (const Error& e) {
    violations.push_back(e.what());
  }
  if (g && !scene_path.empty()) {
    try {
      Scene scene = Scene::load(slurp(scene_path), *g);
      // Worst case: every stochastic edge blocked, all walls present.
      WorldSample all_blocked{std::vector<bool>(g->stoch_count(), true), 0};
      rasterize(scene, *g, all_blocked);
    } catch (const Error& e) {
      violations.push_back(e.what());
    }
  }
  for (const auto& v : violations) std::cout << v << "\n";
  std::cout << violations.size() << " violations\n";
  return violations.empty() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Collaborative navigation trials on graphs with uncertain edges"};
  app.require_subcommand(1);
  CommonOpts o;
  std::string v_graph, v_scene;

  auto add_common = [&](CLI::App* c, bool needs_scenario) {
    c->add_option("--graph", o.graph_path, "graph JSON file")->required();
    c->add_option("--scene", o.scene_path, "scene JSON file");
    auto* sc = c->add_option("--scenario", o.scenario_path, "scenario JSON file");
    if (needs_scenario) sc->required();
    c->add_option("--fidelity", o.fidelity, "graph|continuous");
    c->add_option("--rollouts", o.rollouts, "rollouts per candidate");
    c->add_option("--wait-quantum", o.wait_quantum, "Wait macro duration (s)");
    c->add_option("--message-delay", o.message_delay, "base<->agent message delay (s)");
    c->add_option("--threads", o.threads, "rollout evaluation threads");
  };

  CLI::App* run = app.add_subcommand("run", "run one trial per (seed, planner)");
  add_common(run, true);
  run->add_option("--planner", o.planner, "collaborative|independent|both");
  run->add_option("--seeds", o.seeds, "world seed or range A..B");
  run->add_option("--out", o.out_dir, "output directory");

  CLI::App* oracle = app.add_subcommand("oracle", "exact policy evaluation vs the oracle");
  add_common(oracle, true);

  CLI::App* validate = app.add_subcommand("validate", "static graph/scene checks");
  validate->add_option("--graph", v_graph, "graph JSON file")->required();
  validate->add_option("--scene", v_scene, "scene JSON file");

  CLI11_PARSE(app, argc, argv);
  try {
    if (run->parsed()) return cmd_run(o);
    if (oracle->parsed()) return cmd_oracle(o);
    return cmd_validate(v_graph, v_scene);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
