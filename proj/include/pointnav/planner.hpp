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

#ifndef POINTNAV_PLANNER_HPP_
#define POINTNAV_PLANNER_HPP_

#include <Eigen/Dense>
#include <vector>

#include "pointnav/encoder.hpp"
#include "pointnav/geometry.hpp"
#include "pointnav/kinematics.hpp"

namespace pointnav {

// Convex receding-horizon subproblem: tracking cost, dual-feature safety
// regularizer with hinge slacks, variable safety distance with an L1
// incentive, and a proximal anchor to the previous outer iterate. Feature
// data enters only through affine parameter records, so re-parametrizing the
// problem never changes its sparsity pattern.

struct PlannerParams {
  Eigen::Vector3d q{1.0, 1.0, 0.2};  // state tracking weights
  Eigen::Vector2d p{0.2, 0.2};       // control tracking weights
  double d_min_m = 0.1;
  double d_max_m = 1.0;
  double eta = 1.0;     // L1 weight on the variable safety distance
  double rho1 = 100.0;  // hinge penalty weight
  double rho2 = 0.0;    // rotation-consistency penalty weight
  double b_k = 1.0;     // proximal coefficient
  int m_keep = 100;     // regularizer point budget per step
  int horizon = 10;     // H

  void validate() const;  // throws ConfigError on invalid combinations
};

/// Margin term of one feature at pose s: lambda' (t(s) - p_world) - mu' h - d.
double penalty_i(const State& s, const Eigen::VectorXd& mu, const Vec2& lambda,
                 const Vec2& p_world, double d, const RobotShape& shape);

/// Rotation-consistency residual: mu' G + lambda' R(s). Zero for lambda
/// reconstructed from mu at pose s.
Eigen::RowVector2d penalty_e(const State& s, const Eigen::VectorXd& mu, const Vec2& lambda,
                             const RobotShape& shape);

/// Tracking + regularizer cost of a trajectory under fixed features; the
/// margin uses the static d_min and the residual term the true rotation.
double cost_e2e(const Plan& plan, const DistanceFeatures& features,
                const PlannerParams& params, const Plan& nominal, const RobotShape& shape);

/// Affine parameter records of the problem (one per step / per feature).
struct DppRecords {
  std::vector<Eigen::Vector3d> a_gamma;   // q o s_ref_h
  std::vector<Eigen::Vector2d> b_gamma;   // p o u_ref_h
  std::vector<Eigen::Matrix2Xd> c_gamma;  // lambda per feature (columns)
  std::vector<Eigen::Matrix2Xd> d_gamma;  // G' mu per feature (columns)
  std::vector<Eigen::VectorXd> a_xi;      // lambda' p_world + mu' h per feature
};

struct PlanProblem {
  int horizon = 0;
  PlannerParams params;
  KinematicModel model;
  Eigen::Vector3d s_init;                    // current state, unwrapped branch
  std::vector<LinearizedDynamics> dynamics;  // H entries, at (s_bar, u_bar)
  std::vector<Eigen::Vector3d> s_bar;        // H+1 proximal anchors, unwrapped
  std::vector<Eigen::Vector3d> s_ref;        // H+1 tracking targets, unwrapped
  std::vector<Control> u_ref;                // H
  DppRecords dpp;

  int slack_count() const;
};

/// Assemble the problem from the previous outer iterate (linearization and
/// proximal anchor), the tracking reference, and the selected features.
/// Throws BuildError on dimension mismatches.
PlanProblem build_problem(const Plan& nominal, const DistanceFeatures& features,
                          const PlannerParams& params, const KinematicModel& model,
                          const Plan& previous, const State& current,
                          const RobotShape& shape);

enum class SolveStatus { kConverged, kMaxIter };
enum class SolverEngine { kAdmmSlackQp, kProxGradient };

struct SolverOptions {
  SolverEngine engine = SolverEngine::kProxGradient;
  double tol = 1e-6;       // projected-gradient certificate
  int admm_max_chunks = 60;
  int admm_chunk = 400;
  double admm_eps = 1e-8;  // inner ADMM residual target
  int direct_max_iter = 200000;
  bool polish = true;      // run certificate descent after the slack QP
};

struct PlanSolution {
  Plan plan;              // wrapped states; controls clamped to bounds
  Eigen::VectorXd d;      // H+1, in [d_min, d_max]
  double objective = 0.0; // full subproblem objective at the solution
  double cost_tracking = 0.0;
  double cost_regularizer = 0.0;
  double cost_distance = 0.0;
  double cost_proximal = 0.0;
  SolveStatus status = SolveStatus::kConverged;
  int iterations = 0;
  double certificate = 0.0;  // projected-gradient norm at the solution
};

/// Solve the subproblem. Dynamics hold exactly (states re-rolled through the
/// linear model), control and distance bounds hold exactly (projection).
/// Deterministic for identical inputs. Throws SolveError on inconsistent
/// problem data.
PlanSolution solve(const PlanProblem& problem, const SolverOptions& options = {});

/// Warm-startable wrapper that carries solver state across calls with the
/// same problem shape.
class PlannerBackend {
 public:
  explicit PlannerBackend(SolverOptions options = {}) : options_(options) {}

  PlanSolution solve(const PlanProblem& problem);
  void reset() { has_warm_ = false; }

  const SolverOptions& options() const { return options_; }
  SolverOptions& options() { return options_; }

 private:
  SolverOptions options_;
  Eigen::VectorXd warm_u_, warm_d_;
  bool has_warm_ = false;
};

}  // namespace pointnav

#endif  // POINTNAV_PLANNER_HPP_
