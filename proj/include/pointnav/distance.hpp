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

#ifndef POINTNAV_DISTANCE_HPP_
#define POINTNAV_DISTANCE_HPP_

#include <Eigen/Dense>
#include <vector>

#include "pointnav/geometry.hpp"

namespace pointnav {

// Exact solver for the dual form of the point-to-polygon minimum distance
//
//   max_{mu, lambda}  mu' (G p - h)
//   s.t.              mu >= 0,  ||lambda|| <= 1,  mu' G + lambda' = 0
//
// (body frame, identity rotation). For a 2D convex polygon the optimum is
// recovered in closed form from the nearest boundary feature, so labels carry
// no iterative-solver tolerance.

enum class FeatureKind { kEdge, kVertex, kInteriorEdge };

struct NearestFeature {
  FeatureKind kind = FeatureKind::kEdge;
  int index = 0;  // edge or vertex index
};

/// Multiplier pair of the dual distance problem. mu weighs the polygon edges,
/// lambda is the separating direction (body frame here).
struct DualPair {
  Eigen::VectorXd mu;   // length l, >= 0
  Vec2 lambda;          // ||lambda|| <= 1
};

struct DistanceResult {
  double d = 0.0;       // signed: negative inside the polygon
  DualPair dual;        // body-frame lambda
  NearestFeature nearest_feature;
};

/// Nearest boundary point by brute-force enumeration of edges and vertices;
/// returns the query itself for interior points.
std::pair<Vec2, NearestFeature> project_onto_polygon(const Vec2& p, const RobotShape& shape);

/// Signed distance with exact dual recovery. Total on finite inputs.
/// Ties between equidistant features resolve to the lowest edge index.
DistanceResult exact_distance(const Vec2& p, const RobotShape& shape);

/// Check every dual invariant plus agreement between the dual objective and
/// the geometric signed distance.
bool verify_dual(const DistanceResult& result, const Vec2& p, const RobotShape& shape);

/// exact_distance applied to every body-frame point of a flow; table indexed
/// [step][point].
std::vector<std::vector<DistanceResult>> batch_exact(const PointFlow& flow,
                                                     const RobotShape& shape);

}  // namespace pointnav

#endif  // POINTNAV_DISTANCE_HPP_
