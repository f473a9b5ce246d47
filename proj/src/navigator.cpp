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

#include "pointnav/navigator.hpp"

#include <cmath>
#include <string>

#include "pointnav/errors.hpp"

namespace pointnav {

NominalPath straight_path(const Vec2& start, const Vec2& goal, double v_desired, double dt) {
  NominalPath path;
  const Vec2 delta = goal - start;
  const double length = delta.norm();
  const double heading = std::atan2(delta.y(), delta.x());
  const double step = std::max(v_desired * dt, 1e-6);
  const int count = static_cast<int>(std::ceil(length / step)) + 1;
  path.states.reserve(count + 1);
  for (int i = 0; i < count; ++i) {
    const double along = std::min(i * step, length);
    const Vec2 p = start + (length > 0.0 ? along / length : 0.0) * delta;
    path.states.emplace_back(p.x(), p.y(), heading);
  }
  path.states.emplace_back(goal.x(), goal.y(), heading);
  path.controls.assign(path.states.size(), Control(v_desired, 0.0));
  return path;
}

namespace {

int nearest_index(const NominalPath& path, const State& state) {
  int best = 0;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (int i = 0; i < static_cast<int>(path.states.size()); ++i) {
    const double d2 = (path.states[i].translation() - state.translation()).squaredNorm();
    if (d2 < best_d2) {
      best_d2 = d2;
      best = i;
    }
  }
  return best;
}

}  // namespace

Plan nominal_window(const NominalPath& path, const State& state, int horizon) {
  Plan window;
  const int n = static_cast<int>(path.states.size());
  const int at = nearest_index(path, state);
  window.states.reserve(horizon + 1);
  window.controls.reserve(horizon);
  for (int h = 0; h <= horizon; ++h) {
    const int idx = std::min(at + h, n - 1);
    window.states.push_back(path.states[idx]);
    if (h < horizon) {
      // no forward motion requested once the path is exhausted
      window.controls.push_back(idx + 1 < n ? path.controls[idx] : Control(0.0, 0.0));
    }
  }
  return window;
}

Plan initial_plan(const State& state, const NominalPath& path, const KinematicModel& model,
                  int horizon, const Plan* warm) {
  if (warm != nullptr && static_cast<int>(warm->controls.size()) == horizon) {
    Plan shifted;
    shifted.states.assign(warm->states.begin() + 1, warm->states.end());
    shifted.controls.assign(warm->controls.begin() + 1, warm->controls.end());
    shifted.controls.push_back(warm->controls.back());
    shifted.states.push_back(step_nonlinear(shifted.states.back(), shifted.controls.back(), model));
    return shifted;
  }
  return nominal_window(path, state, horizon);
}

LoopResult plan_once(const State& state, const ScanPoints& scan, const NominalPath& path,
                     const MuEncoder& encoder, const RobotShape& shape,
                     const KinematicModel& model, const PlannerParams& params,
                     const LoopConfig& config, PlannerBackend& backend, const Plan* warm) {
  params.validate();
  LoopResult result;
  const int H = params.horizon;
  const Plan nominal = nominal_window(path, state, H);
  Plan current = initial_plan(state, path, model, H, warm);

  double prev_cost = 0.0;
  for (int k = 0; k < config.max_iterations; ++k) {
    const PointFlow flow = build_point_flow(scan.points, scan.velocities, current, model.dt);
    const DistanceFeatures features =
        sort_and_select(encode(encoder, flow, current, shape), params.m_keep);

    if (k == 0) {
      result.cost_trace.push_back(cost_e2e(current, features, params, nominal, shape));
    }

    PlanSolution solution;
    try {
      const PlanProblem problem =
          build_problem(nominal, features, params, model, current, state, shape);
      solution = backend.solve(problem);
    } catch (const SolveError& err) {
      throw SolveError("iteration " + std::to_string(k) + ": " + err.what());
    }

    const double cost = cost_e2e(solution.plan, features, params, nominal, shape);
    result.cost_trace.push_back(cost);

    double state_change = 0.0;
    for (int h = 0; h <= H; ++h) {
      const Eigen::Vector3d a = solution.plan.states[h].vec();
      const Eigen::Vector3d b = current.states[h].vec();
      state_change = std::max({state_change, std::abs(a[0] - b[0]), std::abs(a[1] - b[1]),
                               std::abs(wrap_angle(a[2] - b[2]))});
    }

    current = solution.plan;
    result.d = solution.d;
    result.iterations = k + 1;

    if (state_change < config.state_tol_m) {
      result.termination = LoopTermination::kConverged;
      break;
    }
    if (k > 0) {
      const double decrease = (prev_cost - cost) / std::max(1.0, std::abs(prev_cost));
      if (decrease < config.cost_tol_rel) {
        result.termination = LoopTermination::kConverged;
        break;
      }
    }
    prev_cost = cost;
    result.termination = LoopTermination::kIterationCap;
  }

  result.plan = current;
  return result;
}

}  // namespace pointnav
