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

#include "pointnav/geometry.hpp"

#include <cmath>

namespace pointnav {

double wrap_angle(double theta) {
  double w = std::remainder(theta, 2.0 * M_PI);  // [-pi, pi]
  if (w <= -M_PI) w = M_PI;
  return w;
}

Mat2 rotation(double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  Mat2 r;
  r << c, -s, s, c;
  return r;
}

double RobotShape::width() const {
  double lo = vertices[0].y(), hi = vertices[0].y();
  for (const auto& v : vertices) {
    lo = std::min(lo, v.y());
    hi = std::max(hi, v.y());
  }
  return hi - lo;
}

double RobotShape::max_vertex_radius() const {
  double r = 0.0;
  for (const auto& v : vertices) r = std::max(r, v.norm());
  return r;
}

RobotShape make_polygon(const std::vector<Vec2>& vertices) {
  const int n = static_cast<int>(vertices.size());
  if (n < 3) throw ConstructionError("polygon needs at least 3 vertices");

  RobotShape shape;
  shape.vertices = vertices;
  shape.l = n;
  shape.G.resize(n, 2);
  shape.h.resize(n);

  for (int j = 0; j < n; ++j) {
    const Vec2& a = vertices[j];
    const Vec2& b = vertices[(j + 1) % n];
    const Vec2 e = b - a;
    const double len = e.norm();
    if (len < 1e-12) throw ConstructionError("degenerate edge (repeated vertex)");
    // outward normal of a counter-clockwise edge
    const Vec2 g(e.y() / len, -e.x() / len);
    shape.G.row(j) = g.transpose();
    shape.h[j] = g.dot(a);
  }

  // convex + counter-clockwise: every vertex must satisfy all halfspaces,
  // strict convexity at each corner
  for (int j = 0; j < n; ++j) {
    const Vec2& a = vertices[j];
    const Vec2& b = vertices[(j + 1) % n];
    const Vec2& c = vertices[(j + 2) % n];
    const double cross = (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
    if (cross <= 1e-12) throw ConstructionError("vertices not strictly convex counter-clockwise");
  }
  for (int j = 0; j < n; ++j) {
    const Eigen::VectorXd viol = shape.G * vertices[j] - shape.h;
    if (viol.maxCoeff() > 1e-9) throw ConstructionError("vertex violates halfspace form");
  }
  return shape;
}

RobotShape make_rectangle(double length, double width) {
  if (length <= 0.0 || width <= 0.0) throw ConstructionError("rectangle extents must be positive");
  const double a = 0.5 * length, b = 0.5 * width;
  return make_polygon({Vec2(a, -b), Vec2(a, b), Vec2(-a, b), Vec2(-a, -b)});
}

Vec2 world_to_body(const Vec2& p, const State& s) {
  return rotation(s.theta).transpose() * (p - s.translation());
}

Vec2 body_to_world(const Vec2& p, const State& s) {
  return rotation(s.theta) * p + s.translation();
}

bool contains(const RobotShape& shape, const Vec2& p, double tol) {
  return ((shape.G * p - shape.h).maxCoeff() <= tol);
}

PointFlow build_point_flow(const Eigen::Matrix2Xd& points,
                           const Eigen::Matrix2Xd& velocities,
                           const Plan& plan, double dt) {
  const int m = static_cast<int>(points.cols());
  Eigen::Matrix2Xd vel = velocities;
  if (vel.cols() == 0) {
    vel = Eigen::Matrix2Xd::Zero(2, m);
  } else if (vel.cols() != m) {
    throw DimensionError("velocity count does not match point count");
  }

  PointFlow flow;
  flow.velocities = vel;
  const int steps = static_cast<int>(plan.states.size());
  flow.world.resize(steps);
  flow.body.resize(steps);
  for (int h = 0; h < steps; ++h) {
    flow.world[h] = points + vel * (dt * h);
    const State& s = plan.states[h];
    const Mat2 rt = rotation(s.theta).transpose();
    flow.body[h] = rt * (flow.world[h].colwise() - s.translation());
  }
  return flow;
}

}  // namespace pointnav
