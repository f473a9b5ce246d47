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

#include "pointnav/distance.hpp"

#include <doctest.h>

#include <random>

#include "pointnav/planner.hpp"

using namespace pointnav;

namespace {

RobotShape unit_square() { return make_rectangle(1.0, 1.0); }

RobotShape random_convex_polygon(std::mt19937_64& rng, int max_edges = 12) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  while (true) {
    const int n = 3 + static_cast<int>(unit(rng) * (max_edges - 3));
    std::vector<double> angles(n);
    for (auto& a : angles) a = 2.0 * M_PI * unit(rng);
    std::sort(angles.begin(), angles.end());
    bool ok = true;
    for (int i = 1; i < n; ++i) ok = ok && (angles[i] - angles[i - 1] > 0.05);
    ok = ok && (2.0 * M_PI - (angles.back() - angles.front()) > 0.05);
    if (!ok) continue;
    const double radius = 0.2 + 2.5 * unit(rng);
    std::vector<Vec2> vertices;
    for (const double a : angles) {
      vertices.emplace_back(radius * std::cos(a), radius * std::sin(a));
    }
    return make_polygon(vertices);
  }
}

// test-only primal cross-check, independent of the vertex-based recovery:
// project p onto {G z <= h} by enumerating the faces of the halfspace form
// (single active row, or a pair of rows meeting in a point)
double primal_distance_halfspace_enum(const Vec2& p, const RobotShape& shape) {
  const double feas_tol = 1e-9;
  auto feasible = [&](const Vec2& z) { return (shape.G * z - shape.h).maxCoeff() <= feas_tol; };
  if (feasible(p)) return 0.0;

  double best = std::numeric_limits<double>::infinity();
  for (int j = 0; j < shape.l; ++j) {
    const Vec2 g = shape.G.row(j).transpose();
    const Vec2 z = p - (g.dot(p) - shape.h[j]) * g;
    if (feasible(z)) best = std::min(best, (p - z).norm());
  }
  for (int i = 0; i < shape.l; ++i) {
    for (int j = i + 1; j < shape.l; ++j) {
      Mat2 rows;
      rows.row(0) = shape.G.row(i);
      rows.row(1) = shape.G.row(j);
      if (std::abs(rows.determinant()) < 1e-12) continue;
      const Vec2 z = rows.inverse() * Vec2(shape.h[i], shape.h[j]);
      if (feasible(z)) best = std::min(best, (p - z).norm());
    }
  }
  return best;
}

}  // namespace

TEST_CASE("square: outside edge case") {
  const RobotShape s = unit_square();
  const DistanceResult r = exact_distance(Vec2(2.0, 0.0), s);
  CHECK(r.d == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(r.dual.mu.sum() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK((r.dual.lambda - Vec2(-1.0, 0.0)).norm() < 1e-12);
  CHECK(r.nearest_feature.kind == FeatureKind::kEdge);
  CHECK(verify_dual(r, Vec2(2.0, 0.0), s));
}

TEST_CASE("square: interior lowest-index tie") {
  const RobotShape s = unit_square();
  const DistanceResult r = exact_distance(Vec2(0.0, 0.0), s);
  CHECK(r.d == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(r.nearest_feature.kind == FeatureKind::kInteriorEdge);
  CHECK(r.nearest_feature.index == 0);  // all four tie at -0.5
  CHECK(r.dual.mu[0] == doctest::Approx(1.0));
  CHECK((r.dual.lambda + s.G.row(0).transpose()).norm() < 1e-12);
  CHECK(verify_dual(r, Vec2(0.0, 0.0), s));
}

TEST_CASE("square: vertex case") {
  const RobotShape s = unit_square();
  const DistanceResult r = exact_distance(Vec2(1.0, 1.0), s);
  CHECK(r.d == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
  CHECK((r.dual.lambda - Vec2(-M_SQRT2 / 2, -M_SQRT2 / 2)).norm() < 1e-12);
  CHECK(r.nearest_feature.kind == FeatureKind::kVertex);
  // two adjacent rows carry sqrt(2)/2 each
  int positive = 0;
  for (int j = 0; j < s.l; ++j) {
    if (r.dual.mu[j] > 1e-12) {
      ++positive;
      CHECK(r.dual.mu[j] == doctest::Approx(M_SQRT2 / 2).epsilon(1e-9));
    }
  }
  CHECK(positive == 2);
  CHECK(verify_dual(r, Vec2(1.0, 1.0), s));
}

TEST_CASE("projection examples") {
  const RobotShape s = unit_square();
  auto [z1, f1] = project_onto_polygon(Vec2(2.0, 0.0), s);
  CHECK((z1 - Vec2(0.5, 0.0)).norm() < 1e-12);
  CHECK(f1.kind == FeatureKind::kEdge);

  auto [z2, f2] = project_onto_polygon(Vec2(0.2, 0.1), s);
  CHECK((z2 - Vec2(0.2, 0.1)).norm() == 0.0);
  CHECK(f2.kind == FeatureKind::kInteriorEdge);

  auto [z3, f3] = project_onto_polygon(Vec2(1.0, 1.0), s);
  CHECK((z3 - Vec2(0.5, 0.5)).norm() < 1e-12);
  CHECK(f3.kind == FeatureKind::kVertex);
}

TEST_CASE("verify_dual rejects corrupted pairs") {
  const RobotShape s = unit_square();
  DistanceResult r = exact_distance(Vec2(2.0, 0.0), s);
  CHECK(verify_dual(r, Vec2(2.0, 0.0), s));

  DistanceResult scaled = r;
  scaled.dual.mu *= 2.0;
  CHECK_FALSE(verify_dual(scaled, Vec2(2.0, 0.0), s));

  DistanceResult flipped = r;
  flipped.dual.lambda = -flipped.dual.lambda;
  CHECK_FALSE(verify_dual(flipped, Vec2(2.0, 0.0), s));
}

TEST_CASE("strong duality and complementary slackness on random pairs") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> span(-5.0, 5.0);
  for (int trial = 0; trial < 10000; ++trial) {
    const RobotShape poly = random_convex_polygon(rng);
    const Vec2 p(span(rng), span(rng));
    const DistanceResult r = exact_distance(p, poly);
    REQUIRE(verify_dual(r, p, poly));

    // complementary slackness: positive mu rows are active at the projection
    const auto [z, feature] = project_onto_polygon(p, poly);
    (void)feature;
    if (r.d > 0.0) {
      for (int j = 0; j < poly.l; ++j) {
        if (r.dual.mu[j] > 1e-8) {
          CHECK(std::abs(poly.G.row(j).dot(z) - poly.h[j]) < 1e-8);
        }
      }
    }
  }
}

TEST_CASE("dual objective matches an independent primal solver") {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> span(-5.0, 5.0);
  int outside_checked = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const RobotShape poly = random_convex_polygon(rng, 8);
    const Vec2 p(span(rng), span(rng));
    const DistanceResult r = exact_distance(p, poly);
    if (r.d <= 1e-6) continue;  // the enumeration cross-checks the outside branch
    ++outside_checked;
    CHECK(std::abs(primal_distance_halfspace_enum(p, poly) - r.d) < 1e-9);
  }
  CHECK(outside_checked > 100);
}

TEST_CASE("world-frame penalty identity") {
  // with lambda_world = -(mu' G R(s)')' the margin identity
  // I + d_min = lambda'(t - p_world) - mu'h reproduces the signed distance
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> span(-6.0, 6.0);
  const PlannerParams params;
  for (int trial = 0; trial < 1000; ++trial) {
    const RobotShape poly = random_convex_polygon(rng);
    const State pose(span(rng), span(rng), span(rng));
    const Vec2 p_world(span(rng), span(rng));
    const Vec2 p_body = world_to_body(p_world, pose);
    const DistanceResult r = exact_distance(p_body, poly);

    const Vec2 lambda_world =
        -(rotation(pose.theta) * (poly.G.transpose() * r.dual.mu));
    const double margin =
        penalty_i(pose, r.dual.mu, lambda_world, p_world, params.d_min_m, poly);
    CHECK(std::abs(margin + params.d_min_m - r.d) < 1e-8);

    const Eigen::RowVector2d residual = penalty_e(pose, r.dual.mu, lambda_world, poly);
    CHECK(residual.norm() < 1e-12);
  }
}

TEST_CASE("batch table matches elementwise calls") {
  std::mt19937_64 rng(37);
  std::uniform_real_distribution<double> span(-4.0, 4.0);
  const RobotShape poly = random_convex_polygon(rng);

  Plan plan;
  for (int h = 0; h < 3; ++h) plan.states.emplace_back(span(rng), span(rng), span(rng));
  plan.controls.assign(2, Control(0, 0));
  Eigen::Matrix2Xd pts(2, 7);
  for (int i = 0; i < 7; ++i) pts.col(i) = Vec2(span(rng), span(rng));

  const PointFlow flow = build_point_flow(pts, {}, plan, 0.2);
  const auto table = batch_exact(flow, poly);
  REQUIRE(table.size() == 3);
  for (int h = 0; h < 3; ++h) {
    REQUIRE(table[h].size() == 7);
    for (int i = 0; i < 7; ++i) {
      const DistanceResult direct = exact_distance(flow.body[h].col(i), poly);
      CHECK(table[h][i].d == direct.d);
      CHECK((table[h][i].dual.mu - direct.dual.mu).norm() == 0.0);
    }
  }

  // single point, single step reduces to one call
  Plan one;
  one.states.emplace_back(0.0, 0.0, 0.0);
  Eigen::Matrix2Xd single(2, 1);
  single.col(0) = Vec2(2.0, 0.0);
  const auto mini = batch_exact(build_point_flow(single, {}, one, 0.2), unit_square());
  CHECK(mini[0][0].d == doctest::Approx(1.5));
}
