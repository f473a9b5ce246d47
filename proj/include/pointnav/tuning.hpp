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

#ifndef POINTNAV_TUNING_HPP_
#define POINTNAV_TUNING_HPP_

#include <functional>
#include <vector>

#include "pointnav/sim.hpp"

namespace pointnav {

// Derivative-free fine-tuning of the planner weights from episode outcomes:
// central finite differences over five scalar handles stand in for
// backpropagation through the solver, with the same clipped gradient update.

/// The learnable handles: gains on the tracking weight vectors plus the
/// distance-regularizer scalars.
struct TunableParams {
  double q_gain = 1.0;
  double p_gain = 1.0;
  double d_min_m = 0.1;
  double d_max_m = 1.0;
  double eta = 1.0;

  /// Scale the base weights of `params` (taken as gain 1) and overwrite the
  /// distance scalars.
  PlannerParams applied_to(const PlannerParams& base) const;
  /// Clamp back to validity: nonnegative, d_min <= d_max.
  void project();
};

struct LonOptions {
  double alpha = 0.05;      // learning rate
  double rel_step = 1e-3;   // finite-difference step, relative with unit floor
  double grad_clip = 1.0;   // per-handle clip magnitude
};

using EpisodeLossFn = std::function<double(const TunableParams&)>;

/// One descent step: central differences on each handle (step
/// rel_step * max(|x|, 1)), gradient clipped componentwise, parameters
/// projected. Any non-finite probe loss aborts the step and returns the
/// input unchanged.
TunableParams lon_step(const TunableParams& params, const EpisodeLossFn& loss,
                       const LonOptions& options);

/// Atom losses.
double loss_l1(const Plan& trajectory, const Plan& nominal);       // sum ||s - s_ref||^2
double loss_l2(const Plan& trajectory, const Plan& nominal);       // sum ||u - u_ref||^2
double loss_l3(const Eigen::VectorXd& d, double eta);              // -eta sum |d_h|

enum class LossCombo { kAuto, kCollision, kStuck, kStray };

/// Failure-to-loss mapping: collision -> L1+L3, stuck -> L2+L3, stray -> L1.
LossCombo combo_for_failure(FailureKind failure);

/// Episode loss on the timeline padded to the time limit: unfinished episodes
/// hold the final state with zero control, so not progressing stays costly.
double episode_loss(const EpisodeMetrics& metrics, const NominalPath& nominal,
                    const Scenario& scenario, double dt, double eta, LossCombo combo);

struct TuneResult {
  std::vector<double> loss_curve;   // nominal-episode loss per step
  std::vector<bool> successes;      // nominal-episode outcome per step
  TunableParams params;
  LossCombo combo = LossCombo::kAuto;
};

/// episode -> loss -> parameter-step cycles on a fixed scenario. Parameters
/// update only after failed episodes. `on_step` (optional) observes each
/// step, e.g. to persist parameters.
TuneResult tune_params(const Scenario& scenario, const PlannerStack& stack,
                       const TunableParams& initial, int episodes, const LonOptions& options,
                       LossCombo combo = LossCombo::kAuto,
                       const std::function<void(int, const TuneResult&)>& on_step = {});

}  // namespace pointnav

#endif  // POINTNAV_TUNING_HPP_
