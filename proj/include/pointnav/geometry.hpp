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

#ifndef POINTNAV_GEOMETRY_HPP_
#define POINTNAV_GEOMETRY_HPP_

#include <Eigen/Dense>
#include <vector>

#include "pointnav/errors.hpp"

namespace pointnav {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

/// Wrap an angle to (-pi, pi].
double wrap_angle(double theta);

/// Robot pose (x, y, theta), theta wrapped to (-pi, pi].
struct State {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;

  State() = default;
  State(double x_, double y_, double theta_) : x(x_), y(y_), theta(wrap_angle(theta_)) {}

  Vec2 translation() const { return Vec2(x, y); }
  Eigen::Vector3d vec() const { return Eigen::Vector3d(x, y, theta); }
  static State from_vec(const Eigen::Vector3d& v) { return State(v[0], v[1], v[2]); }
};

/// Rotation matrix R(theta).
Mat2 rotation(double theta);

/// Robot footprint as a convex polygon {z : G z <= h}, rows of G unit-norm.
struct RobotShape {
  std::vector<Vec2> vertices;       // counter-clockwise
  Eigen::MatrixX2d G;               // l x 2, unit-norm outward edge normals
  Eigen::VectorXd h;                // length l, meters
  int l = 0;                        // edge count

  double width() const;             // extent along body y (used for DoN)
  double max_vertex_radius() const; // circumscribed radius about body origin
};

/// Build the halfspace form from counter-clockwise convex vertices.
/// Throws ConstructionError on fewer than 3 vertices, collinear edges, or
/// non-convex / clockwise input.
RobotShape make_polygon(const std::vector<Vec2>& vertices);

/// Axis-aligned rectangle centered at the body origin.
RobotShape make_rectangle(double length, double width);

/// p in world frame -> robot body frame: R(s)^T (p - t(s)).
Vec2 world_to_body(const Vec2& p, const State& s);

/// Inverse of world_to_body.
Vec2 body_to_world(const Vec2& p, const State& s);

/// Point inside the halfspace intersection (boundary counts as inside).
bool contains(const RobotShape& shape, const Vec2& p, double tol = 1e-12);

/// A state trajectory over a planning horizon (H+1 states).
struct Plan {
  std::vector<State> states;                 // H+1
  std::vector<Eigen::Vector2d> controls;     // H

  int horizon() const { return static_cast<int>(controls.size()); }
};

/// Obstacle points propagated over the horizon by constant velocity,
/// stored in world frame and per-step robot body frame.
struct PointFlow {
  // world[h] and body[h] are 2 x M matrices, h = 0..H.
  std::vector<Eigen::Matrix2Xd> world;
  std::vector<Eigen::Matrix2Xd> body;
  Eigen::Matrix2Xd velocities;  // 2 x M

  int steps() const { return static_cast<int>(world.size()); }  // H+1
  int points() const { return world.empty() ? 0 : static_cast<int>(world[0].cols()); }
};

/// Propagate M points over the plan's horizon: world rows follow
/// p_{h+1} = p_h + v dt, body rows are world points expressed in the frame
/// of the matching plan state. Velocities may be empty (treated as zero).
/// Throws DimensionError when velocity count mismatches the points.
PointFlow build_point_flow(const Eigen::Matrix2Xd& points,
                           const Eigen::Matrix2Xd& velocities,
                           const Plan& plan, double dt);

}  // namespace pointnav

#endif  // POINTNAV_GEOMETRY_HPP_
