#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "ctnav/graph.hpp"
#include "ctnav/macro_action.hpp"
#include "ctnav/scenario.hpp"

namespace testsupport {

inline std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  REQUIRE(f.good());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

inline std::string data_path(const std::string& name) {
  return std::string(DATA_DIR) + "/" + name;
}

// The two-route fixture used throughout: a slow agent whose direct route
// contains one uncertain edge plus a long certain detour, and a fast agent
// whose route passes near the uncertain edge.
inline ctnav::NavGraph two_route_graph() {
  return ctnav::NavGraph::load(read_file(data_path("two_route_graph.json")));
}

inline ctnav::Scenario two_route_scenario(const ctnav::NavGraph& g) {
  return ctnav::Scenario::load(read_file(data_path("two_route_scenario.json")), g);
}

// Line graph A - B - C - D where C-D is the only stochastic edge; used for
// expansion and interrupt unit tests.
inline ctnav::NavGraph line_graph() {
  using namespace ctnav;
  std::vector<Edge> edges;
  edges.push_back(Edge{0, 1, 10.0, std::nullopt});
  edges.push_back(Edge{1, 2, 10.0, std::nullopt});
  edges.push_back(Edge{2, 3, 10.0, 0.5});
  return NavGraph::build({"A", "B", "C", "D"},
                         {{0, 0}, {10, 0}, {20, 0}, {30, 0}}, edges);
}

}  // namespace testsupport
