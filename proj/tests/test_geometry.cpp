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

#include <doctest.h>

#include <random>

#include "pointnav/errors.hpp"
#include "pointnav/kinematics.hpp"

using namespace pointnav;

namespace {

RobotShape unit_square() { return make_rectangle(1.0, 1.0); }

// random convex polygon: convex hull of points on a circle (sorted angles)
RobotShape random_convex_polygon(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int n = 3 + static_cast<int>(unit(rng) * 9.0);
  std::vector<double> angles(n);
  for (auto& a : angles) a = 2.0 * M_PI * unit(rng);
  std::sort(angles.begin(), angles.end());
  // reject nearly-coincident angles to keep corners strict
  for (int i = 1; i < n; ++i) {
    if (angles[i] - angles[i - 1] < 0.05) return random_convex_polygon(rng);
  }
  if (2.0 * M_PI - (angles.back() - angles.front()) < 0.05) return random_convex_polygon(rng);
  const double radius = 0.3 + 2.0 * unit(rng);
  std::vector<Vec2> vertices;
  vertices.reserve(n);
  for (const double a : angles) vertices.emplace_back(radius * std::cos(a), radius * std::sin(a));
  return make_polygon(vertices);
}

}  // namespace

TEST_CASE("unit square halfspace form") {
  const RobotShape s = unit_square();
  CHECK(s.l == 4);
  for (int j = 0; j < 4; ++j) CHECK(s.h[j] == doctest::Approx(0.5).epsilon(1e-12));
  // all four axis normals present
  Eigen::Vector4d found = Eigen::Vector4d::Zero();
  for (int j = 0; j < 4; ++j) {
    const Vec2 g = s.G.row(j).transpose();
    if ((g - Vec2(1, 0)).norm() < 1e-12) found[0] = 1;
    if ((g - Vec2(-1, 0)).norm() < 1e-12) found[1] = 1;
    if ((g - Vec2(0, 1)).norm() < 1e-12) found[2] = 1;
    if ((g - Vec2(0, -1)).norm() < 1e-12) found[3] = 1;
  }
  CHECK(found.sum() == 4);
}

TEST_CASE("triangle hypotenuse row") {
  const RobotShape t = make_polygon({Vec2(0, 0), Vec2(1, 0), Vec2(0, 1)});
  // the edge (1,0) -> (0,1)
  int row = -1;
  for (int j = 0; j < t.l; ++j) {
    if ((t.G.row(j).transpose() - Vec2(M_SQRT2 / 2, M_SQRT2 / 2)).norm() < 1e-9) row = j;
  }
  REQUIRE(row >= 0);
  CHECK(t.h[row] == doctest::Approx(M_SQRT2 / 2).epsilon(1e-12));
}

TEST_CASE("collinear vertices rejected") {
  CHECK_THROWS_AS(make_polygon({Vec2(0, 0), Vec2(1, 0), Vec2(2, 0)}), ConstructionError);
  CHECK_THROWS_AS(make_polygon({Vec2(0, 0), Vec2(1, 0)}), ConstructionError);
  // clockwise input is rejected rather than silently flipped
  CHECK_THROWS_AS(make_polygon({Vec2(0, 0), Vec2(0, 1), Vec2(1, 0)}), ConstructionError);
}

TEST_CASE("rotation basics") {
  CHECK((rotation(0.0) - Mat2::Identity()).norm() == doctest::Approx(0.0));
  Mat2 quarter;
  quarter << 0, -1, 1, 0;
  CHECK((rotation(M_PI / 2) - quarter).norm() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK((rotation(0.7) * rotation(-0.7) - Mat2::Identity()).norm() < 1e-15);
  CHECK(rotation(1.3).determinant() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("world_to_body examples") {
  CHECK((world_to_body(Vec2(2, 1), State(0, 0, 0)) - Vec2(2, 1)).norm() < 1e-15);
  CHECK((world_to_body(Vec2(2, 1), State(1, 1, M_PI / 2)) - Vec2(0, -1)).norm() < 1e-12);
}

TEST_CASE("frame round-trip on random poses") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unit(-10.0, 10.0);
  for (int i = 0; i < 200; ++i) {
    const State s(unit(rng), unit(rng), unit(rng));
    const Vec2 p(unit(rng), unit(rng));
    CHECK((body_to_world(world_to_body(p, s), s) - p).norm() < 1e-12);
  }
}

TEST_CASE("angle wrap domain") {
  CHECK(wrap_angle(M_PI) == doctest::Approx(M_PI));
  CHECK(wrap_angle(-M_PI) == doctest::Approx(M_PI));
  CHECK(wrap_angle(3 * M_PI) == doctest::Approx(M_PI));
  CHECK(wrap_angle(0.3) == doctest::Approx(0.3));
  CHECK(wrap_angle(2 * M_PI + 0.3) == doctest::Approx(0.3));
}

TEST_CASE("halfspace/vertex duality on random polygons") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> span(-4.0, 4.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const RobotShape poly = random_convex_polygon(rng);
    const Vec2 p(span(rng), span(rng));
    // winding test for a convex ccw polygon: p left of every edge
    bool inside_winding = true;
    const int n = poly.l;
    for (int j = 0; j < n; ++j) {
      const Vec2 a = poly.vertices[j];
      const Vec2 b = poly.vertices[(j + 1) % n];
      const double cross = (b.x() - a.x()) * (p.y() - a.y()) - (b.y() - a.y()) * (p.x() - a.x());
      if (cross < 0.0) inside_winding = false;
    }
    const bool inside_halfspace = (poly.G * p - poly.h).maxCoeff() <= 0.0;
    if (inside_winding != inside_halfspace) {
      // disagreement is only possible within floating error of the boundary
      CHECK(std::abs((poly.G * p - poly.h).maxCoeff()) < 1e-9);
    }
  }
}

TEST_CASE("row normalization") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    const RobotShape poly = random_convex_polygon(rng);
    for (int j = 0; j < poly.l; ++j) {
      CHECK(poly.G.row(j).norm() == doctest::Approx(1.0).epsilon(1e-12));
    }
    // vertices satisfy G v <= h, centroid strictly inside
    Vec2 centroid = Vec2::Zero();
    for (const auto& v : poly.vertices) centroid += v;
    centroid /= static_cast<double>(poly.vertices.size());
    CHECK((poly.G * centroid - poly.h).maxCoeff() < 0.0);
  }
}

TEST_CASE("point flow constant-velocity propagation") {
  Plan still;
  for (int h = 0; h < 3; ++h) still.states.emplace_back(0.0, 0.0, 0.0);
  still.controls.assign(2, Control(0.0, 0.0));

  Eigen::Matrix2Xd pts(2, 1);
  pts.col(0) = Vec2(1.0, 0.0);
  Eigen::Matrix2Xd vel(2, 1);
  vel.col(0) = Vec2(0.5, 0.0);

  const PointFlow flow = build_point_flow(pts, vel, still, 0.1);
  REQUIRE(flow.steps() == 3);
  CHECK((flow.world[0].col(0) - Vec2(1.0, 0.0)).norm() < 1e-15);
  CHECK((flow.world[1].col(0) - Vec2(1.05, 0.0)).norm() < 1e-15);
  CHECK((flow.world[2].col(0) - Vec2(1.1, 0.0)).norm() < 1e-15);
  CHECK((flow.body[2].col(0) - flow.world[2].col(0)).norm() < 1e-15);  // identity frame

  const PointFlow stat = build_point_flow(pts, Eigen::Matrix2Xd::Zero(2, 1), still, 0.1);
  CHECK((stat.world[0] - stat.world[2]).norm() == 0.0);

  Plan one;
  one.states.emplace_back(0.0, 0.0, 0.0);
  one.states.emplace_back(0.0, 0.0, 0.0);
  one.controls.assign(1, Control(0.0, 0.0));
  Eigen::Matrix2Xd vy(2, 1);
  vy.col(0) = Vec2(0.0, 1.0);
  const PointFlow up = build_point_flow(pts, vy, one, 0.5);
  CHECK((up.world[1].col(0) - Vec2(1.0, 0.5)).norm() < 1e-15);

  Eigen::Matrix2Xd bad(2, 2);
  bad.setZero();
  CHECK_THROWS_AS(build_point_flow(pts, bad, still, 0.1), DimensionError);
}

TEST_CASE("point flow body frame matches per-step transform") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> unit(-3.0, 3.0);
  Plan plan;
  for (int h = 0; h < 4; ++h) plan.states.emplace_back(unit(rng), unit(rng), unit(rng));
  plan.controls.assign(3, Control(0.0, 0.0));
  Eigen::Matrix2Xd pts(2, 5);
  for (int i = 0; i < 5; ++i) pts.col(i) = Vec2(unit(rng), unit(rng));
  Eigen::Matrix2Xd vel(2, 5);
  for (int i = 0; i < 5; ++i) vel.col(i) = Vec2(unit(rng), unit(rng));

  const PointFlow flow = build_point_flow(pts, vel, plan, 0.25);
  for (int h = 0; h < flow.steps(); ++h) {
    for (int i = 0; i < flow.points(); ++i) {
      const Vec2 expect = world_to_body(flow.world[h].col(i), plan.states[h]);
      CHECK((flow.body[h].col(i) - expect).norm() < 1e-12);
    }
  }
}
