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

#ifndef POINTNAV_SIM_HPP_
#define POINTNAV_SIM_HPP_

#include <cstdint>
#include <random>
#include <vector>

#include "pointnav/navigator.hpp"

namespace pointnav {

// Deterministic 2D world: polygonal / circular obstacles (convexity not
// required), constant-velocity motion with boundary reflection, beam-model
// lidar with optional Gaussian range noise, episode execution and metrics.

struct Obstacle {
  enum class Kind { kPolygon, kCircle };
  Kind kind = Kind::kPolygon;
  std::vector<Vec2> polygon;  // simple polygon, world frame (kPolygon)
  Vec2 center{0.0, 0.0};      // kCircle
  double radius = 0.0;
  Vec2 velocity{0.0, 0.0};

  Vec2 centroid() const;
  static Obstacle make_polygon(std::vector<Vec2> vertices, const Vec2& velocity = {0.0, 0.0});
  static Obstacle make_circle(const Vec2& center, double radius,
                              const Vec2& velocity = {0.0, 0.0});
};

struct Scenario {
  Vec2 bounds_min{-5.0, 0.0};
  Vec2 bounds_max{55.0, 50.0};
  std::vector<Obstacle> obstacles;
  State start{-1.0, 25.0, 0.0};
  Vec2 goal{50.0, 25.0};
  double goal_radius_m = 1.0;
  double desired_speed_mps = 4.0;
  double time_limit_s = 60.0;
  std::uint64_t seed = 0;
  bool velocity_aware = false;  // attach ground-truth velocities to scan points
};

struct LidarModel {
  int beam_count = 100;
  double max_range_m = 8.0;
  double span_rad = 2.0 * M_PI;
  double noise_sigma_m = 0.0;
};

/// Beam-model scan from a pose: nearest intersection per beam within range,
/// missing beams omitted, optional Gaussian range perturbation. Points carry
/// the hit obstacle's velocity when the scenario is velocity-aware.
ScanPoints raycast(const State& pose, const Scenario& scenario, const LidarModel& lidar,
                   std::mt19937_64& rng);

/// Advance obstacles by v dt, reflecting the velocity component that carries
/// an obstacle centroid outside the bounds.
void step_world(Scenario& scenario, double dt);

/// Ground-truth clearance between the robot polygon at a pose and the world;
/// negative values measure circle penetration, polygon overlap reports 0.
double clearance(const State& pose, const RobotShape& shape, const Scenario& scenario);

/// Conservative: touching within 1e-9 counts as collision.
bool check_collision(const State& pose, const RobotShape& shape, const Scenario& scenario);

/// Degree of narrowness: robot width over minimum passable width.
double don(double passage_width_m, double robot_width_m);

enum class ScenarioKind { kConvex, kNonconvex, kDynamic };

/// Random field of obstacles between the canonical start and goal, placed
/// clear of both endpoints. Throws GenerationError when placement fails.
Scenario generate_random_scenario(std::uint64_t seed, ScenarioKind kind, int count);

enum class FailureKind { kNone, kCollision, kTimeout, kPlannerError };

struct EpisodeTick {
  double t = 0.0;
  State state;
  Control control{0.0, 0.0};
  double min_clearance_m = 0.0;
  double d_sum_m = 0.0;  // sum of the planner's per-step safety distances
};

struct EpisodeMetrics {
  bool success = false;
  FailureKind failure = FailureKind::kNone;
  double navigation_time_s = 0.0;
  double average_speed_mps = 0.0;
  double min_clearance_m = 0.0;
  double path_length_m = 0.0;
  std::vector<EpisodeTick> trajectory;
};

/// Everything the control loop needs besides the world.
struct PlannerStack {
  const MuEncoder* encoder = nullptr;
  RobotShape shape;
  KinematicModel model;
  PlannerParams params;
  LoopConfig loop;
  LidarModel lidar;
  SolverOptions solver;
  int scan_cap = 100;  // uniform angular subsampling above this many returns
};

/// Closed loop scan -> plan -> apply first control -> advance world, ending on
/// goal, collision, or the time limit. Fully reproducible from the seed.
EpisodeMetrics run_episode(const Scenario& scenario, const PlannerStack& stack,
                           double control_rate_hz = 0.0 /* 0: one model step per tick */);

}  // namespace pointnav

#endif  // POINTNAV_SIM_HPP_
