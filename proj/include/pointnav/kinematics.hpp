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

#ifndef POINTNAV_KINEMATICS_HPP_
#define POINTNAV_KINEMATICS_HPP_

#include <Eigen/Dense>

#include "pointnav/geometry.hpp"

namespace pointnav {

enum class ModelKind { kDifferential, kAckermann };

/// Control vector: (v, omega) for differential drive, (v, psi) for Ackermann.
using Control = Eigen::Vector2d;

/// Nonholonomic kinematic model with Euler discretization step dt.
struct KinematicModel {
  ModelKind kind = ModelKind::kDifferential;
  double wheelbase = 1.0;  // Ackermann only, meters
  double dt = 0.2;         // seconds
  Control u_min = Control(-4.0, -3.14);
  Control u_max = Control(4.0, 3.14);

  static KinematicModel differential(double dt, const Control& u_min, const Control& u_max);
  static KinematicModel ackermann(double wheelbase, double dt, const Control& u_min,
                                  const Control& u_max);

  Control clamp(const Control& u) const {
    return u.cwiseMax(u_min).cwiseMin(u_max);
  }
  bool within_bounds(const Control& u) const {
    return (u.array() >= u_min.array()).all() && (u.array() <= u_max.array()).all();
  }
};

/// Coefficients of the linearized step s_{t+1} = A s_t + B u_t + c.
struct LinearizedDynamics {
  Eigen::Matrix3d A;
  Eigen::Matrix<double, 3, 2> B;
  Eigen::Vector3d c;
};

/// One explicit Euler step of the nonlinear kinematics, theta wrapped.
State step_nonlinear(const State& s, const Control& u, const KinematicModel& model);

/// Same step without wrapping, for use on unwrapped theta sequences.
Eigen::Vector3d step_nonlinear_raw(const Eigen::Vector3d& s, const Control& u,
                                   const KinematicModel& model);

/// First-order Taylor expansion of the Euler step about (s_bar, u_bar).
/// Throws LinearizationError for Ackermann when |psi_bar| >= pi/2.
LinearizedDynamics linearize(const State& s_bar, const Control& u_bar,
                             const KinematicModel& model);

/// Linearization at a possibly unwrapped heading reference. The coefficients
/// depend on the state only through theta_bar; the planner works on an
/// unwrapped theta branch and needs the matching affine term.
LinearizedDynamics linearize_at(double theta_bar, const Control& u_bar,
                                const KinematicModel& model);

/// Propagate s0 through a control sequence; returns H+1 states, first = s0.
Plan rollout(const State& s0, const std::vector<Control>& controls,
             const KinematicModel& model);

}  // namespace pointnav

#endif  // POINTNAV_KINEMATICS_HPP_
