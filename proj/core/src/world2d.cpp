#include "ctnav/world2d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include <nlohmann/json.hpp>

namespace ctnav {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

Scene Scene::load(const std::string& text, const NavGraph& g) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed scene file: ") + e.what());
  }
  Scene s;
  try {
    auto b = j.at("bounds");
    s.bounds = {b.at(0).get<double>(), b.at(1).get<double>(), b.at(2).get<double>(),
                b.at(3).get<double>()};
    for (const auto& jo : j.value("obstacles", nlohmann::json::array())) {
      if (jo.contains("rect")) {
        const auto& r = jo["rect"];
        s.obstacles.push_back(RectObstacle{r.at(0), r.at(1), r.at(2), r.at(3)});
      } else if (jo.contains("circle")) {
        const auto& c = jo["circle"];
        s.obstacles.push_back(CircleObstacle{c.at(0), c.at(1), c.at(2)});
      } else {
        throw ValidationError("obstacle must be a rect or circle");
      }
    }
    const nlohmann::json jb = j.value("blockages", nlohmann::json::object());
    for (const auto& [key, jw] : jb.items()) {
      auto dash = key.find('-');
      if (dash == std::string::npos) throw ValidationError("bad blockage key '" + key + "'");
      auto u = g.find_node(key.substr(0, dash));
      auto v = g.find_node(key.substr(dash + 1));
      if (!u || !v) throw ValidationError("blockage names unknown node in '" + key + "'");
      int e = g.edge_between(*u, *v);
      if (e < 0 || g.stoch_index(e) < 0) {
        throw ValidationError("blockage '" + key + "' is not a stochastic edge");
      }
      Wall w;
      w.along = jw.value("along", 0.5);
      w.width = jw.value("width", 6.0);
      if (!(w.width > 0)) throw ValidationError("wall width must be positive in '" + key + "'");
      s.blockages[g.stoch_index(e)] = w;
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed scene file: ") + e.what());
  }
  for (int i = 0; i < g.node_count(); ++i) {
    Vec2 p = g.node_pos(i);
    if (p.x < s.bounds.xmin || p.x > s.bounds.xmax || p.y < s.bounds.ymin ||
        p.y > s.bounds.ymax) {
      throw ValidationError("node '" + g.node_name(i) + "' lies outside scene bounds");
    }
  }
  return s;
}

std::pair<int, int> OccupancyGrid::cell_of(Vec2 p) const {
  return {static_cast<int>(std::floor((p.x - origin.x) / resolution)),
          static_cast<int>(std::floor((p.y - origin.y) / resolution))};
}

Vec2 OccupancyGrid::center_of(int cx, int cy) const {
  return {origin.x + (cx + 0.5) * resolution, origin.y + (cy + 0.5) * resolution};
}

bool OccupancyGrid::occupied_at(Vec2 p) const {
  auto [cx, cy] = cell_of(p);
  if (!in_bounds(cx, cy)) return true;
  return occupied(cx, cy);
}

namespace {

// Distance from point p to segment ab.
double segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  double vx = b.x - a.x, vy = b.y - a.y;
  double len2 = vx * vx + vy * vy;
  double t = len2 > 0 ? ((p.x - a.x) * vx + (p.y - a.y) * vy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return distance(p, {a.x + t * vx, a.y + t * vy});
}

bool cell_intersects(const OccupancyGrid& grid, int cx, int cy, const Obstacle& ob) {
  Vec2 lo = grid.center_of(cx, cy);
  double h = grid.resolution / 2;
  double x0 = lo.x - h, x1 = lo.x + h, y0 = lo.y - h, y1 = lo.y + h;
  if (const auto* r = std::get_if<RectObstacle>(&ob)) {
    return x1 >= r->xmin && x0 <= r->xmax && y1 >= r->ymin && y0 <= r->ymax;
  }
  const auto& c = std::get<CircleObstacle>(ob);
  double nx = std::clamp(c.cx, x0, x1);
  double ny = std::clamp(c.cy, y0, y1);
  return distance({nx, ny}, {c.cx, c.cy}) <= c.r;
}

}  // namespace

OccupancyGrid rasterize(const Scene& scene, const NavGraph& g, const WorldSample& world,
                        double resolution, double inflation) {
  if (!(resolution > 0)) throw ValidationError("resolution must be positive");
  OccupancyGrid grid;
  grid.resolution = resolution;
  grid.inflation = inflation;
  grid.origin = {scene.bounds.xmin, scene.bounds.ymin};
  grid.width = std::max(1, static_cast<int>(std::ceil((scene.bounds.xmax - scene.bounds.xmin) /
                                                      resolution)));
  grid.height = std::max(1, static_cast<int>(std::ceil((scene.bounds.ymax - scene.bounds.ymin) /
                                                       resolution)));
  grid.cells.assign(static_cast<std::size_t>(grid.width) * grid.height, 0);

  std::vector<Obstacle> obstacles = scene.obstacles;
  // A perpendicular wall per blocked stochastic edge, realized as a thin
  // rotated segment with conservative thickness of one cell.
  struct Segment {
    Vec2 a, b;
    double half_thickness;
  };
  std::vector<Segment> walls;
  for (int si = 0; si < g.stoch_count(); ++si) {
    if (si >= static_cast<int>(world.blocked.size()) || !world.blocked[si]) continue;
    const Edge& e = g.edge(g.stoch_edge(si));
    Wall w;
    if (auto it = scene.blockages.find(si); it != scene.blockages.end()) w = it->second;
    Vec2 a = g.node_pos(e.u), b = g.node_pos(e.v);
    double len = distance(a, b);
    Vec2 dir{(b.x - a.x) / len, (b.y - a.y) / len};
    Vec2 perp{-dir.y, dir.x};
    Vec2 center{a.x + w.along * (b.x - a.x), a.y + w.along * (b.y - a.y)};
    walls.push_back({{center.x - perp.x * w.width / 2, center.y - perp.y * w.width / 2},
                     {center.x + perp.x * w.width / 2, center.y + perp.y * w.width / 2},
                     resolution / 2});
  }

  for (int cy = 0; cy < grid.height; ++cy) {
    for (int cx = 0; cx < grid.width; ++cx) {
      bool occ = false;
      for (const Obstacle& ob : obstacles) {
        if (cell_intersects(grid, cx, cy, ob)) {
          occ = true;
          break;
        }
      }
      if (!occ) {
        Vec2 c = grid.center_of(cx, cy);
        for (const Segment& s : walls) {
          if (segment_distance(c, s.a, s.b) <= s.half_thickness + grid.resolution * 0.71) {
            occ = true;
            break;
          }
        }
      }
      if (occ) grid.cells[cy * grid.width + cx] = 1;
    }
  }

  // Inflation by morphological dilation.
  int r = static_cast<int>(std::ceil(inflation / resolution));
  if (r > 0) {
    std::vector<std::uint8_t> inflated = grid.cells;
    for (int cy = 0; cy < grid.height; ++cy) {
      for (int cx = 0; cx < grid.width; ++cx) {
        if (!grid.occupied(cx, cy)) continue;
        for (int dy = -r; dy <= r; ++dy) {
          for (int dx = -r; dx <= r; ++dx) {
            int nx = cx + dx, ny = cy + dy;
            if (grid.in_bounds(nx, ny)) inflated[ny * grid.width + nx] = 1;
          }
        }
      }
    }
    grid.cells = std::move(inflated);
  }

  for (int i = 0; i < g.node_count(); ++i) {
    if (grid.occupied_at(g.node_pos(i))) {
      throw SceneError("node '" + g.node_name(i) + "' is occupied after inflation");
    }
  }
  return grid;
}

std::optional<GridPath> plan_grid_path(const OccupancyGrid& grid, Vec2 start, GoalRegion goal) {
  auto [sx, sy] = grid.cell_of(start);
  if (!grid.in_bounds(sx, sy) || grid.occupied(sx, sy)) return std::nullopt;

  const double res = grid.resolution;
  const double diag = std::sqrt(2.0) * res;
  const int w = grid.width, h = grid.height;
  std::vector<double> dist(static_cast<std::size_t>(w) * h, kInf);
  std::vector<int> prev(static_cast<std::size_t>(w) * h, -1);

  // Stable priority queue: ties broken by insertion order.
  using Label = std::tuple<double, long, int>;  // (cost, seq, cell)
  std::priority_queue<Label, std::vector<Label>, std::greater<>> pq;
  long seq = 0;
  int start_idx = sy * w + sx;
  dist[start_idx] = 0;
  pq.emplace(0.0, seq++, start_idx);

  auto in_goal = [&](int idx) {
    Vec2 c = grid.center_of(idx % w, idx / w);
    return distance(c, goal.center) <= goal.radius;
  };

  // Row-major neighbor order; diagonal steps require both orthogonal
  // neighbors free (no corner cutting).
  static constexpr int kDx[8] = {-1, 0, 1, -1, 1, -1, 0, 1};
  static constexpr int kDy[8] = {-1, -1, -1, 0, 0, 1, 1, 1};

  int goal_idx = -1;
  if (in_goal(start_idx)) goal_idx = start_idx;
  while (!pq.empty() && goal_idx < 0) {
    auto [d, sq, idx] = pq.top();
    pq.pop();
    if (d > dist[idx]) continue;
    if (in_goal(idx)) {
      goal_idx = idx;
      break;
    }
    int cx = idx % w, cy = idx / w;
    for (int k = 0; k < 8; ++k) {
      int nx = cx + kDx[k], ny = cy + kDy[k];
      if (!grid.in_bounds(nx, ny) || grid.occupied(nx, ny)) continue;
      bool diagonal = kDx[k] != 0 && kDy[k] != 0;
      if (diagonal && (grid.occupied(cx + kDx[k], cy) || grid.occupied(cx, cy + kDy[k]))) {
        continue;
      }
      double nd = d + (diagonal ? diag : res);
      int nidx = ny * w + nx;
      if (nd < dist[nidx] - 1e-12) {
        dist[nidx] = nd;
        prev[nidx] = idx;
        pq.emplace(nd, seq++, nidx);
      }
    }
  }
  if (goal_idx < 0) return std::nullopt;

  GridPath path;
  path.cost = dist[goal_idx];
  std::vector<int> cells;
  for (int idx = goal_idx; idx >= 0; idx = prev[idx]) cells.push_back(idx);
  std::reverse(cells.begin(), cells.end());
  for (int idx : cells) path.waypoints.push_back(grid.center_of(idx % w, idx / w));
  return path;
}

NavOutcome navigate_action(const OccupancyGrid& grid, Vec2 pose, Vec2 node_goal, double speed,
                           double dt, double goal_radius) {
  NavOutcome out;
  out.final_pose = pose;
  if (distance(pose, node_goal) <= goal_radius) {
    out.arrived = true;
    return out;
  }
  auto plan = plan_grid_path(grid, pose, {node_goal, goal_radius});
  if (!plan) return out;

  const double timeout = 3.0 * plan->cost / speed;
  Vec2 cur = pose;
  std::size_t wp = 0;
  while (true) {
    if (distance(cur, node_goal) <= goal_radius) {
      out.arrived = true;
      out.final_pose = cur;
      return out;
    }
    if (out.elapsed > timeout) {
      out.final_pose = cur;
      return out;  // timeout guard
    }
    // Advance speed*dt along the waypoint polyline.
    double step = speed * dt;
    while (step > 0 && wp < plan->waypoints.size()) {
      double d = distance(cur, plan->waypoints[wp]);
      if (d <= step + 1e-12) {
        step -= d;
        out.distance += d;
        cur = plan->waypoints[wp];
        ++wp;
      } else {
        Vec2 t = plan->waypoints[wp];
        cur = {cur.x + (t.x - cur.x) / d * step, cur.y + (t.y - cur.y) / d * step};
        out.distance += step;
        step = 0;
      }
    }
    out.elapsed += dt;
    out.poses.push_back(cur);
    if (wp >= plan->waypoints.size() && step > 0) {
      // Ran out of waypoints; goal-region check decides.
      out.arrived = distance(cur, node_goal) <= goal_radius;
      out.final_pose = cur;
      return out;
    }
  }
}

bool observe_edge_traversable(const OccupancyGrid& grid, Vec2 pose, Vec2 edge_from, Vec2 edge_to,
                              double lookahead, double threshold) {
  double len = distance(edge_from, edge_to);
  double t = std::min(1.0, lookahead / len);
  Vec2 target{edge_from.x + t * (edge_to.x - edge_from.x),
              edge_from.y + t * (edge_to.y - edge_from.y)};
  auto plan = plan_grid_path(grid, pose, {target, grid.resolution * 0.75});
  if (!plan) return false;
  return plan->cost <= threshold * distance(pose, target);
}

int wait_tick_count(double duration, double dt) {
  if (duration <= 0) return 0;
  return static_cast<int>(std::ceil(duration / dt - 1e-9));
}

}  // namespace ctnav
