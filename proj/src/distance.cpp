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

#include <cmath>
#include <limits>

namespace pointnav {

namespace {

constexpr double kTieEps = 1e-12;

int interior_max_row(const Eigen::VectorXd& viol) {
  // lowest index attaining the max, exact comparison
  int best = 0;
  for (int j = 1; j < viol.size(); ++j) {
    if (viol[j] > viol[best]) best = j;
  }
  return best;
}

}  // namespace

std::pair<Vec2, NearestFeature> project_onto_polygon(const Vec2& p, const RobotShape& shape) {
  const Eigen::VectorXd viol = shape.G * p - shape.h;
  if (viol.maxCoeff() <= 0.0) {
    return {p, NearestFeature{FeatureKind::kInteriorEdge, interior_max_row(viol)}};
  }

  const int n = shape.l;
  double best_d = std::numeric_limits<double>::infinity();
  Vec2 best_z = shape.vertices[0];
  NearestFeature best_f{FeatureKind::kVertex, 0};

  // perpendicular feet that land on their edge segment, outward side only
  for (int j = 0; j < n; ++j) {
    if (viol[j] <= 0.0) continue;
    const Vec2& a = shape.vertices[j];
    const Vec2& b = shape.vertices[(j + 1) % n];
    const Vec2 e = b - a;
    const double t = (p - a).dot(e) / e.squaredNorm();
    if (t < 0.0 || t > 1.0) continue;
    const Vec2 z = a + t * e;
    const double d = (p - z).norm();
    if (d < best_d - kTieEps ||
        (d < best_d + kTieEps &&
         (best_f.kind != FeatureKind::kEdge || j < best_f.index))) {
      best_d = d;
      best_z = z;
      best_f = NearestFeature{FeatureKind::kEdge, j};
    }
  }
  // vertices; an edge hit at equal distance wins (it is the generic feature)
  for (int k = 0; k < n; ++k) {
    const Vec2& v = shape.vertices[k];
    const double d = (p - v).norm();
    if (d < best_d - kTieEps) {
      best_d = d;
      best_z = v;
      best_f = NearestFeature{FeatureKind::kVertex, k};
    }
  }
  return {best_z, best_f};
}

DistanceResult exact_distance(const Vec2& p, const RobotShape& shape) {
  const int n = shape.l;
  DistanceResult result;
  result.dual.mu = Eigen::VectorXd::Zero(n);

  const Eigen::VectorXd viol = shape.G * p - shape.h;
  if (viol.maxCoeff() <= 0.0) {
    const int j = interior_max_row(viol);
    result.d = viol[j];
    result.dual.mu[j] = 1.0;
    result.dual.lambda = -shape.G.row(j).transpose();
    result.nearest_feature = NearestFeature{FeatureKind::kInteriorEdge, j};
    return result;
  }

  const auto [z, feature] = project_onto_polygon(p, shape);
  result.nearest_feature = feature;

  if (feature.kind == FeatureKind::kEdge) {
    const int j = feature.index;
    result.d = viol[j];  // equals the perpendicular distance for an interior foot
    result.dual.mu[j] = 1.0;
    result.dual.lambda = -shape.G.row(j).transpose();
    return result;
  }

  // vertex case: lambda points from the vertex to the query; mu is the unique
  // nonnegative combination of the two adjacent edge normals with
  // G_a' mu_a = -lambda
  const int k = feature.index;
  const int prev = (k + n - 1) % n;
  const int next = k;
  const Vec2 v = shape.vertices[k];
  const double d = (p - v).norm();
  const Vec2 lambda = -(p - v) / d;

  Mat2 basis;
  basis.col(0) = shape.G.row(prev).transpose();
  basis.col(1) = shape.G.row(next).transpose();
  Eigen::Vector2d mu_a = basis.colPivHouseholderQr().solve(-lambda);
  mu_a = mu_a.cwiseMax(0.0);  // analytic solution is nonnegative in the normal cone

  result.d = d;
  result.dual.mu[prev] = mu_a[0];
  result.dual.mu[next] = mu_a[1];
  result.dual.lambda = lambda;
  return result;
}

bool verify_dual(const DistanceResult& result, const Vec2& p, const RobotShape& shape) {
  const auto& mu = result.dual.mu;
  const auto& lambda = result.dual.lambda;
  if (mu.size() != shape.l) return false;
  if (!(mu.array() >= 0.0).all()) return false;
  if (lambda.norm() > 1.0 + 1e-9) return false;

  const Eigen::RowVector2d stationarity = mu.transpose() * shape.G + lambda.transpose();
  if (stationarity.norm() > 1e-9) return false;

  const double dual_objective = mu.dot(shape.G * p - shape.h);
  if (std::abs(dual_objective - result.d) > 1e-9) return false;

  const Eigen::VectorXd viol = shape.G * p - shape.h;
  double geometric;
  if (viol.maxCoeff() <= 0.0) {
    geometric = viol.maxCoeff();
  } else {
    geometric = (p - project_onto_polygon(p, shape).first).norm();
  }
  return std::abs(dual_objective - geometric) <= 1e-8;
}

std::vector<std::vector<DistanceResult>> batch_exact(const PointFlow& flow,
                                                     const RobotShape& shape) {
  std::vector<std::vector<DistanceResult>> table(flow.steps());
  for (int h = 0; h < flow.steps(); ++h) {
    table[h].reserve(flow.points());
    for (int i = 0; i < flow.points(); ++i) {
      table[h].push_back(exact_distance(flow.body[h].col(i), shape));
    }
  }
  return table;
}

}  // namespace pointnav
