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

#include "pointnav/kinematics.hpp"

#include <cmath>

namespace pointnav {

KinematicModel KinematicModel::differential(double dt, const Control& u_min,
                                            const Control& u_max) {
  KinematicModel m;
  m.kind = ModelKind::kDifferential;
  m.dt = dt;
  m.u_min = u_min;
  m.u_max = u_max;
  return m;
}

KinematicModel KinematicModel::ackermann(double wheelbase, double dt, const Control& u_min,
                                         const Control& u_max) {
  KinematicModel m;
  m.kind = ModelKind::kAckermann;
  m.wheelbase = wheelbase;
  m.dt = dt;
  m.u_min = u_min;
  m.u_max = u_max;
  return m;
}

Eigen::Vector3d step_nonlinear_raw(const Eigen::Vector3d& s, const Control& u,
                                   const KinematicModel& model) {
  const double v = u[0];
  const double theta = s[2];
  Eigen::Vector3d f;
  f[0] = v * std::cos(theta);
  f[1] = v * std::sin(theta);
  f[2] = (model.kind == ModelKind::kAckermann) ? v * std::tan(u[1]) / model.wheelbase : u[1];
  return s + f * model.dt;
}

State step_nonlinear(const State& s, const Control& u, const KinematicModel& model) {
  return State::from_vec(step_nonlinear_raw(s.vec(), u, model));
}

LinearizedDynamics linearize(const State& s_bar, const Control& u_bar,
                             const KinematicModel& model) {
  return linearize_at(s_bar.theta, u_bar, model);
}

LinearizedDynamics linearize_at(double theta_bar, const Control& u_bar,
                                const KinematicModel& model) {
  const double dt = model.dt;
  const double v = u_bar[0];
  const double theta = theta_bar;
  const double st = std::sin(theta), ct = std::cos(theta);

  LinearizedDynamics lin;
  lin.A << 1.0, 0.0, -v * st * dt,
           0.0, 1.0, v * ct * dt,
           0.0, 0.0, 1.0;
  lin.B.setZero();
  lin.B(0, 0) = ct * dt;
  lin.B(1, 0) = st * dt;
  lin.c << theta * v * st * dt, -theta * v * ct * dt, 0.0;

  if (model.kind == ModelKind::kAckermann) {
    const double psi = u_bar[1];
    if (std::abs(psi) >= M_PI / 2.0) {
      throw LinearizationError("steering reference at or beyond pi/2");
    }
    const double cp = std::cos(psi);
    lin.B(2, 0) = std::tan(psi) * dt / model.wheelbase;
    lin.B(2, 1) = v * dt / (model.wheelbase * cp * cp);
    lin.c[2] = -psi * v * dt / (model.wheelbase * cp * cp);
  } else {
    lin.B(2, 1) = dt;
    lin.c[2] = 0.0;
  }
  return lin;
}

Plan rollout(const State& s0, const std::vector<Control>& controls,
             const KinematicModel& model) {
  Plan plan;
  plan.controls = controls;
  plan.states.reserve(controls.size() + 1);
  plan.states.push_back(s0);
  State s = s0;
  for (const auto& u : controls) {
    s = step_nonlinear(s, u, model);
    plan.states.push_back(s);
  }
  return plan;
}

}  // namespace pointnav
