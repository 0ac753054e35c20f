#include "ctnav/scenario.hpp"

#include <set>

#include <nlohmann/json.hpp>

#include "ctnav/errors.hpp"

namespace ctnav {

Scenario Scenario::load(const std::string& text, const NavGraph& g) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed scenario file: ") + e.what());
  }

  Scenario s;
  try {
    if (!j.contains("agents") || !j["agents"].is_array() || j["agents"].empty())
      throw ValidationError("scenario needs a non-empty 'agents' array");
    std::set<std::string> ids;
    for (const auto& ja : j["agents"]) {
      AgentSpec a;
      a.id = ja.at("id").get<std::string>();
      if (!ids.insert(a.id).second)
        throw ValidationError("duplicate agent id '" + a.id + "'");
      a.speed = ja.at("speed").get<double>();
      if (!(a.speed > 0))
        throw ValidationError("agent '" + a.id + "' must have positive speed");
      auto resolve = [&](const std::string& name, const char* what) {
        auto n = g.find_node(name);
        if (!n)
          throw ValidationError("agent '" + a.id + "' " + what + " node '" + name +
                                "' is not in the graph");
        return *n;
      };
      a.start = resolve(ja.at("start").get<std::string>(), "start");
      a.goal = resolve(ja.at("goal").get<std::string>(), "goal");
      a.sense_duration = ja.value("sense_duration", 0.0);
      if (a.sense_duration < 0)
        throw ValidationError("agent '" + a.id + "' sense_duration must be >= 0");
      s.agents.push_back(a);
    }
    if (j.contains("planner")) {
      const auto& jp = j["planner"];
      s.planner.rollout_count = jp.value("rollouts", s.planner.rollout_count);
      s.planner.wait_quantum = jp.value("wait_quantum", s.planner.wait_quantum);
      s.planner.seed = jp.value("seed", s.planner.seed);
      s.planner.threads = jp.value("threads", s.planner.threads);
      if (s.planner.rollout_count <= 0)
        throw ValidationError("planner rollouts must be positive");
      if (!(s.planner.wait_quantum > 0))
        throw ValidationError("planner wait_quantum must be positive");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed scenario file: ") + e.what());
  }
  return s;
}

}  // namespace ctnav
