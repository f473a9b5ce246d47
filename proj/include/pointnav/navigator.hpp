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

#ifndef POINTNAV_NAVIGATOR_HPP_
#define POINTNAV_NAVIGATOR_HPP_

#include <vector>

#include "pointnav/encoder.hpp"
#include "pointnav/planner.hpp"

namespace pointnav {

// Outer loop: alternate feature encoding and convex re-planning from a fixed
// scan, tracking the end-to-end cost until it stops moving or the iteration
// cap is reached.

struct LoopConfig {
  int max_iterations = 3;
  double state_tol_m = 1e-3;   // stop when the plan stops moving
  double cost_tol_rel = 1e-4;  // or when the relative cost decrease stalls
};

enum class LoopTermination { kConverged, kIterationCap, kInfeasible };

struct LoopResult {
  Plan plan;
  Eigen::VectorXd d;               // per-step safety distances of the last solve
  std::vector<double> cost_trace;  // end-to-end cost: initial plan, then per solve
  int iterations = 0;
  LoopTermination termination = LoopTermination::kIterationCap;
};

/// Straight start-to-goal reference sampled at the desired speed.
struct NominalPath {
  std::vector<State> states;
  std::vector<Control> controls;  // (v_desired, 0) per waypoint
};

NominalPath straight_path(const Vec2& start, const Vec2& goal, double v_desired, double dt);

/// H+1 reference states ahead of the current pose, padded with the final
/// waypoint once the path runs out.
Plan nominal_window(const NominalPath& path, const State& state, int horizon);

/// Seed plan: the nominal window itself, or the previous solution shifted one
/// step when warm is given.
Plan initial_plan(const State& state, const NominalPath& path, const KinematicModel& model,
                  int horizon, const Plan* warm = nullptr);

struct ScanPoints {
  Eigen::Matrix2Xd points;      // world frame
  Eigen::Matrix2Xd velocities;  // per-point, may be empty (treated as zero)
};

/// One receding-horizon planning call. Throws SolveError (with the failing
/// iteration) if a subproblem cannot be solved.
LoopResult plan_once(const State& state, const ScanPoints& scan, const NominalPath& path,
                     const MuEncoder& encoder, const RobotShape& shape,
                     const KinematicModel& model, const PlannerParams& params,
                     const LoopConfig& config, PlannerBackend& backend,
                     const Plan* warm = nullptr);

}  // namespace pointnav

#endif  // POINTNAV_NAVIGATOR_HPP_
