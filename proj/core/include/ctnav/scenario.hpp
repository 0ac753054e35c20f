#pragma once

#include <string>
#include <vector>

#include "ctnav/team_planner.hpp"

namespace ctnav {

// Agents plus planner parameters, loaded together from one JSON file so that
// quantities like speed ratios are data rather than code.
struct Scenario {
  std::vector<AgentSpec> agents;
  PlannerParams planner;

  static Scenario load(const std::string& text, const NavGraph& g);
};

}  // namespace ctnav
