#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <variant>
#include <vector>

#include "ctnav/graph.hpp"

namespace ctnav {

struct RectObstacle {
  double xmin{}, ymin{}, xmax{}, ymax{};
};

struct CircleObstacle {
  double cx{}, cy{}, r{};
};

using Obstacle = std::variant<RectObstacle, CircleObstacle>;

// Realization of a blocked stochastic edge: a wall crossing the edge at
// `along` (fraction of its length), spanning `width` meters perpendicular.
struct Wall {
  double along{0.5};
  double width{6.0};
};

struct Scene {
  RectObstacle bounds{};
  std::vector<Obstacle> obstacles;
  std::map<int, Wall> blockages;  // stochastic index -> wall override

  // Parses the JSON scene file format; blockage keys are "U-V" node names.
  static Scene load(const std::string& text, const NavGraph& g);
};

class OccupancyGrid {
 public:
  double resolution{0.25};
  Vec2 origin{};
  int width{};
  int height{};
  double inflation{0.5};
  std::vector<std::uint8_t> cells;  // row-major, 1 = occupied

  bool in_bounds(int cx, int cy) const {
    return cx >= 0 && cx < width && cy >= 0 && cy < height;
  }
  bool occupied(int cx, int cy) const { return cells[cy * width + cx] != 0; }
  std::pair<int, int> cell_of(Vec2 p) const;
  Vec2 center_of(int cx, int cy) const;
  bool occupied_at(Vec2 p) const;
};

// Rasterizes the scene plus walls for every stochastic edge blocked in
// `world`, then inflates by the robot radius. Throws SceneError if any graph
// node ends up occupied.
OccupancyGrid rasterize(const Scene& scene, const NavGraph& g, const WorldSample& world,
                        double resolution = 0.25, double inflation = 0.5);

struct GoalRegion {
  Vec2 center{};
  double radius{};
};

struct GridPath {
  std::vector<Vec2> waypoints;  // cell centers
  double cost{};                // meters
};

// 8-connected shortest grid path from `start` to any free cell whose center
// lies within the goal region. Deterministic tie-breaking. nullopt = no path.
std::optional<GridPath> plan_grid_path(const OccupancyGrid& grid, Vec2 start, GoalRegion goal);

struct NavOutcome {
  bool arrived{};
  Vec2 final_pose{};
  double elapsed{};   // seconds
  double distance{};  // integrated pose displacement
  std::vector<Vec2> poses;  // one per dt step, starting after the first step
};

// Plans to a circular region around `node_goal` and follows the waypoints at
// constant speed. Fails on NoPath or when elapsed exceeds 3x the nominal
// traversal time.
NavOutcome navigate_action(const OccupancyGrid& grid, Vec2 pose, Vec2 node_goal, double speed,
                           double dt = 0.1, double goal_radius = 3.0);

// The 120%-rule observation: plan to a point `lookahead` meters along the
// edge; blocked when no plan exists or the plan cost exceeds `threshold`
// times the Euclidean distance.
bool observe_edge_traversable(const OccupancyGrid& grid, Vec2 pose, Vec2 edge_from, Vec2 edge_to,
                              double lookahead = 20.0, double threshold = 1.2);

// Tick count of a wait action.
int wait_tick_count(double duration, double dt);

}  // namespace ctnav
