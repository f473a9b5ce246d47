// Copyright 2026 The pointnav Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "pointnav/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pointnav/distance.hpp"
#include "pointnav/errors.hpp"

namespace pointnav {

namespace {

constexpr double kContactTol = 1e-9;

double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

// smallest t >= 0 with o + t u on segment a-b; negative when there is none
double ray_segment(const Vec2& o, const Vec2& u, const Vec2& a, const Vec2& b) {
  const Vec2 e = b - a;
  const double denom = cross2(u, e);
  if (std::abs(denom) < 1e-15) return -1.0;
  const double t = cross2(a - o, e) / denom;
  const double s = cross2(a - o, u) / denom;
  if (t >= 0.0 && s >= 0.0 && s <= 1.0) return t;
  return -1.0;
}

double ray_circle(const Vec2& o, const Vec2& u, const Vec2& c, double r) {
  const Vec2 oc = o - c;
  const double b = oc.dot(u);
  const double disc = b * b - (oc.squaredNorm() - r * r);
  if (disc < 0.0) return -1.0;
  const double root = std::sqrt(disc);
  const double t1 = -b - root;
  if (t1 >= 0.0) return t1;
  const double t2 = -b + root;
  if (t2 >= 0.0) return t2;
  return -1.0;
}

double segment_point_distance(const Vec2& a, const Vec2& b, const Vec2& p) {
  const Vec2 e = b - a;
  const double len2 = e.squaredNorm();
  const double t = len2 > 0.0 ? std::clamp((p - a).dot(e) / len2, 0.0, 1.0) : 0.0;
  return (p - (a + t * e)).norm();
}

bool segments_intersect(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  const double d1 = cross2(b - a, c - a);
  const double d2 = cross2(b - a, d - a);
  const double d3 = cross2(d - c, a - c);
  const double d4 = cross2(d - c, b - c);
  if (((d1 > 0.0) != (d2 > 0.0)) && ((d3 > 0.0) != (d4 > 0.0))) return true;
  // collinear / endpoint contacts resolve through the distance path
  return false;
}

double segment_segment_distance(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  if (segments_intersect(a, b, c, d)) return 0.0;
  return std::min(std::min(segment_point_distance(a, b, c), segment_point_distance(a, b, d)),
                  std::min(segment_point_distance(c, d, a), segment_point_distance(c, d, b)));
}

// crossing-number containment for simple polygons
bool point_in_simple_polygon(const Vec2& p, const std::vector<Vec2>& poly) {
  bool inside = false;
  const int n = static_cast<int>(poly.size());
  for (int i = 0, j = n - 1; i < n; j = i++) {
    const Vec2& vi = poly[i];
    const Vec2& vj = poly[j];
    if (((vi.y() > p.y()) != (vj.y() > p.y())) &&
        (p.x() < (vj.x() - vi.x()) * (p.y() - vi.y()) / (vj.y() - vi.y()) + vi.x())) {
      inside = !inside;
    }
  }
  return inside;
}

std::vector<Vec2> robot_world_polygon(const State& pose, const RobotShape& shape) {
  const Mat2 rot = rotation(pose.theta);
  std::vector<Vec2> out;
  out.reserve(shape.vertices.size());
  for (const auto& v : shape.vertices) out.push_back(rot * v + pose.translation());
  return out;
}

double polygon_polygon_clearance(const std::vector<Vec2>& a, const std::vector<Vec2>& b) {
  const int na = static_cast<int>(a.size()), nb = static_cast<int>(b.size());
  for (int i = 0; i < na; ++i) {
    for (int j = 0; j < nb; ++j) {
      if (segments_intersect(a[i], a[(i + 1) % na], b[j], b[(j + 1) % nb])) return 0.0;
    }
  }
  if (point_in_simple_polygon(a[0], b) || point_in_simple_polygon(b[0], a)) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < na; ++i) {
    for (int j = 0; j < nb; ++j) {
      best = std::min(best, segment_segment_distance(a[i], a[(i + 1) % na], b[j],
                                                     b[(j + 1) % nb]));
    }
  }
  return best;
}

// convex hull (monotone chain); input need not be sorted
std::vector<Vec2> convex_hull(std::vector<Vec2> pts) {
  std::sort(pts.begin(), pts.end(), [](const Vec2& p, const Vec2& q) {
    return p.x() < q.x() || (p.x() == q.x() && p.y() < q.y());
  });
  const int n = static_cast<int>(pts.size());
  std::vector<Vec2> hull(2 * n);
  int k = 0;
  for (int i = 0; i < n; ++i) {
    while (k >= 2 && cross2(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 1e-12) --k;
    hull[k++] = pts[i];
  }
  for (int i = n - 2, lower = k + 1; i >= 0; --i) {
    while (k >= lower && cross2(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 1e-12) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

}  // namespace

Vec2 Obstacle::centroid() const {
  if (kind == Kind::kCircle) return center;
  Vec2 c(0.0, 0.0);
  for (const auto& v : polygon) c += v;
  return c / static_cast<double>(polygon.size());
}

Obstacle Obstacle::make_polygon(std::vector<Vec2> vertices, const Vec2& velocity) {
  Obstacle o;
  o.kind = Kind::kPolygon;
  o.polygon = std::move(vertices);
  o.velocity = velocity;
  return o;
}

Obstacle Obstacle::make_circle(const Vec2& center, double radius, const Vec2& velocity) {
  Obstacle o;
  o.kind = Kind::kCircle;
  o.center = center;
  o.radius = radius;
  o.velocity = velocity;
  return o;
}

ScanPoints raycast(const State& pose, const Scenario& scenario, const LidarModel& lidar,
                   std::mt19937_64& rng) {
  std::normal_distribution<double> noise(0.0, 1.0);
  const Vec2 origin = pose.translation();
  std::vector<Vec2> points;
  std::vector<Vec2> velocities;
  points.reserve(lidar.beam_count);
  velocities.reserve(lidar.beam_count);

  const bool full_circle = lidar.span_rad >= 2.0 * M_PI - 1e-9;
  for (int b = 0; b < lidar.beam_count; ++b) {
    double offset;
    if (full_circle) {
      offset = -M_PI + 2.0 * M_PI * b / lidar.beam_count;
    } else {
      offset = -0.5 * lidar.span_rad +
               lidar.span_rad * b / std::max(lidar.beam_count - 1, 1);
    }
    const double ang = pose.theta + offset;
    const Vec2 dir(std::cos(ang), std::sin(ang));

    double best_t = std::numeric_limits<double>::infinity();
    Vec2 hit_velocity(0.0, 0.0);
    for (const auto& obstacle : scenario.obstacles) {
      double t = -1.0;
      if (obstacle.kind == Obstacle::Kind::kCircle) {
        t = ray_circle(origin, dir, obstacle.center, obstacle.radius);
      } else {
        const int n = static_cast<int>(obstacle.polygon.size());
        for (int i = 0; i < n; ++i) {
          const double ts = ray_segment(origin, dir, obstacle.polygon[i],
                                        obstacle.polygon[(i + 1) % n]);
          if (ts >= 0.0 && (t < 0.0 || ts < t)) t = ts;
        }
      }
      if (t >= 0.0 && t < best_t) {
        best_t = t;
        hit_velocity = obstacle.velocity;
      }
    }
    if (best_t > lidar.max_range_m) continue;
    double range = best_t;
    if (lidar.noise_sigma_m > 0.0) {
      range = std::max(0.0, range + lidar.noise_sigma_m * noise(rng));
    }
    points.push_back(origin + range * dir);
    velocities.push_back(scenario.velocity_aware ? hit_velocity : Vec2(0.0, 0.0));
  }

  ScanPoints scan;
  scan.points.resize(2, static_cast<int>(points.size()));
  scan.velocities.resize(2, static_cast<int>(points.size()));
  for (int i = 0; i < static_cast<int>(points.size()); ++i) {
    scan.points.col(i) = points[i];
    scan.velocities.col(i) = velocities[i];
  }
  return scan;
}

void step_world(Scenario& scenario, double dt) {
  for (auto& obstacle : scenario.obstacles) {
    const Vec2 shift = obstacle.velocity * dt;
    if (obstacle.kind == Obstacle::Kind::kCircle) {
      obstacle.center += shift;
    } else {
      for (auto& v : obstacle.polygon) v += shift;
    }
    const Vec2 c = obstacle.centroid();
    for (int axis = 0; axis < 2; ++axis) {
      if ((c[axis] < scenario.bounds_min[axis] && obstacle.velocity[axis] < 0.0) ||
          (c[axis] > scenario.bounds_max[axis] && obstacle.velocity[axis] > 0.0)) {
        obstacle.velocity[axis] = -obstacle.velocity[axis];
      }
    }
  }
}

double clearance(const State& pose, const RobotShape& shape, const Scenario& scenario) {
  double best = std::numeric_limits<double>::infinity();
  const auto robot_poly = robot_world_polygon(pose, shape);
  for (const auto& obstacle : scenario.obstacles) {
    double d;
    if (obstacle.kind == Obstacle::Kind::kCircle) {
      const Vec2 center_body = world_to_body(obstacle.center, pose);
      d = exact_distance(center_body, shape).d - obstacle.radius;
    } else {
      d = polygon_polygon_clearance(robot_poly, obstacle.polygon);
    }
    best = std::min(best, d);
  }
  return best;
}

bool check_collision(const State& pose, const RobotShape& shape, const Scenario& scenario) {
  return clearance(pose, shape, scenario) <= kContactTol;
}

double don(double passage_width_m, double robot_width_m) {
  return robot_width_m / passage_width_m;
}

Scenario generate_random_scenario(std::uint64_t seed, ScenarioKind kind, int count) {
  Scenario scenario;
  scenario.seed = seed;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const double clear_radius = 3.0;  // keep the start and goal approachable
  const Vec2 start_p = scenario.start.translation();

  for (int i = 0; i < count; ++i) {
    bool placed = false;
    for (int attempt = 0; attempt < 500 && !placed; ++attempt) {
      const double cx = 4.0 + 42.0 * unit(rng);
      const double cy = 25.0 + 12.0 * (2.0 * unit(rng) - 1.0);
      const Vec2 c(cx, cy);
      const double size = 0.8 + 1.2 * unit(rng);

      Obstacle obstacle;
      if (kind == ScenarioKind::kNonconvex) {
        // U-shaped outline: arms of length `size`, random orientation
        const double arm = 1.2 + 1.3 * unit(rng);
        const double thick = 0.5 + 0.4 * unit(rng);
        const double open = arm - 2.0 * thick;
        std::vector<Vec2> u_shape = {
            {-arm / 2.0, -arm / 2.0}, {arm / 2.0, -arm / 2.0},
            {arm / 2.0, arm / 2.0},   {arm / 2.0 - thick, arm / 2.0},
            {arm / 2.0 - thick, -arm / 2.0 + thick},
            {-arm / 2.0 + thick, -arm / 2.0 + thick},
            {-arm / 2.0 + thick, std::max(open, thick)},
            {-arm / 2.0, std::max(open, thick)}};
        const Mat2 rot = rotation(2.0 * M_PI * unit(rng));
        for (auto& v : u_shape) v = rot * v + c;
        obstacle = Obstacle::make_polygon(u_shape);
      } else {
        std::vector<Vec2> cloud;
        for (int k = 0; k < 8; ++k) {
          const double r = size * (0.5 + 0.5 * std::sqrt(unit(rng)));
          const double a = 2.0 * M_PI * unit(rng);
          cloud.emplace_back(c.x() + r * std::cos(a), c.y() + r * std::sin(a));
        }
        auto hull = convex_hull(cloud);
        if (hull.size() < 3) continue;
        obstacle = Obstacle::make_polygon(hull);
      }

      if (kind == ScenarioKind::kDynamic) {
        const double speed = 0.3 + 0.7 * unit(rng);
        const double dir = 2.0 * M_PI * unit(rng);
        obstacle.velocity = Vec2(speed * std::cos(dir), speed * std::sin(dir));
      }

      const Vec2 cc = obstacle.centroid();
      const double reach = [&] {
        double r = 0.0;
        for (const auto& v : obstacle.polygon) r = std::max(r, (v - cc).norm());
        return r;
      }();
      if ((cc - start_p).norm() < reach + clear_radius) continue;
      if ((cc - scenario.goal).norm() < reach + clear_radius) continue;

      scenario.obstacles.push_back(std::move(obstacle));
      placed = true;
    }
    if (!placed) throw GenerationError("could not place obstacle away from the endpoints");
  }
  return scenario;
}

namespace {

ScanPoints downsample(const ScanPoints& scan, int cap) {
  const int n = static_cast<int>(scan.points.cols());
  if (n <= cap) return scan;
  ScanPoints out;
  out.points.resize(2, cap);
  out.velocities.resize(2, cap);
  for (int i = 0; i < cap; ++i) {
    const int idx = static_cast<int>(static_cast<long>(i) * n / cap);
    out.points.col(i) = scan.points.col(idx);
    out.velocities.col(i) = scan.velocities.col(idx);
  }
  return out;
}

}  // namespace

EpisodeMetrics run_episode(const Scenario& scenario, const PlannerStack& stack,
                           double control_rate_hz) {
  EpisodeMetrics metrics;
  Scenario world = scenario;
  std::mt19937_64 rng(scenario.seed ^ 0xd1b54a32d192ed03ull);

  const double dt = control_rate_hz > 0.0 ? 1.0 / control_rate_hz : stack.model.dt;
  const int sub_steps = std::max(1, static_cast<int>(std::lround(dt / stack.model.dt)));
  KinematicModel exec_model = stack.model;
  exec_model.dt = dt / sub_steps;

  const NominalPath path =
      straight_path(scenario.start.translation(), scenario.goal, scenario.desired_speed_mps, dt);

  PlannerBackend backend(stack.solver);
  Plan warm;
  bool has_warm = false;

  State pose = scenario.start;
  double t = 0.0;
  metrics.min_clearance_m = clearance(pose, stack.shape, world);

  while (true) {
    if ((pose.translation() - world.goal).norm() <= world.goal_radius_m) {
      metrics.success = true;
      metrics.failure = FailureKind::kNone;
      break;
    }
    if (t >= world.time_limit_s) {
      metrics.failure = FailureKind::kTimeout;
      break;
    }

    const ScanPoints scan = downsample(raycast(pose, world, stack.lidar, rng), stack.scan_cap);

    LoopResult result;
    try {
      result = plan_once(pose, scan, path, *stack.encoder, stack.shape, stack.model,
                         stack.params, stack.loop, backend, has_warm ? &warm : nullptr);
    } catch (const SolveError&) {
      metrics.failure = FailureKind::kPlannerError;
      break;
    }
    const Control u = result.plan.controls.front();
    warm = result.plan;
    has_warm = true;

    EpisodeTick tick;
    tick.t = t;
    tick.state = pose;
    tick.control = u;
    tick.min_clearance_m = clearance(pose, stack.shape, world);
    tick.d_sum_m = result.d.size() > 0 ? result.d.sum() : 0.0;
    metrics.trajectory.push_back(tick);

    const Vec2 before = pose.translation();
    for (int k = 0; k < sub_steps; ++k) pose = step_nonlinear(pose, u, exec_model);
    step_world(world, dt);
    t += dt;
    metrics.path_length_m += (pose.translation() - before).norm();

    const double clear_now = clearance(pose, stack.shape, world);
    metrics.min_clearance_m = std::min(metrics.min_clearance_m, clear_now);
    if (clear_now <= kContactTol) {
      metrics.failure = FailureKind::kCollision;
      break;
    }
  }

  EpisodeTick terminal;  // terminal row so the CSV reproduces the metrics exactly
  terminal.t = t;
  terminal.state = pose;
  terminal.control = Control(0.0, 0.0);
  terminal.min_clearance_m = clearance(pose, stack.shape, world);
  metrics.trajectory.push_back(terminal);

  metrics.navigation_time_s = t;
  metrics.average_speed_mps =
      metrics.navigation_time_s > 0.0 ? metrics.path_length_m / metrics.navigation_time_s : 0.0;
  return metrics;
}

}  // namespace pointnav
