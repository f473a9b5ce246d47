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

#include "pointnav/tuning.hpp"

#include <algorithm>
#include <cmath>

namespace pointnav {

PlannerParams TunableParams::applied_to(const PlannerParams& base) const {
  PlannerParams out = base;
  out.q = q_gain * base.q;
  out.p = p_gain * base.p;
  out.d_min_m = d_min_m;
  out.d_max_m = d_max_m;
  out.eta = eta;
  return out;
}

void TunableParams::project() {
  q_gain = std::max(q_gain, 0.0);
  p_gain = std::max(p_gain, 0.0);
  eta = std::max(eta, 0.0);
  d_min_m = std::max(d_min_m, 1e-3);
  d_max_m = std::max(d_max_m, d_min_m);
}

namespace {

double* handle(TunableParams& p, int i) {
  switch (i) {
    case 0: return &p.q_gain;
    case 1: return &p.p_gain;
    case 2: return &p.d_min_m;
    case 3: return &p.d_max_m;
    default: return &p.eta;
  }
}

}  // namespace

TunableParams lon_step(const TunableParams& params, const EpisodeLossFn& loss,
                       const LonOptions& options) {
  double grad[5];
  for (int i = 0; i < 5; ++i) {
    TunableParams plus = params, minus = params;
    const double x = *handle(plus, i);
    const double h = options.rel_step * std::max(std::abs(x), 1.0);
    *handle(plus, i) = x + h;
    *handle(minus, i) = x - h;
    plus.project();
    minus.project();
    const double step = *handle(plus, i) - *handle(minus, i);  // projection may shrink it
    if (step <= 0.0) {
      grad[i] = 0.0;
      continue;
    }
    const double f_plus = loss(plus);
    const double f_minus = loss(minus);
    if (!std::isfinite(f_plus) || !std::isfinite(f_minus)) return params;  // abort step
    grad[i] = (f_plus - f_minus) / step;
  }

  TunableParams out = params;
  for (int i = 0; i < 5; ++i) {
    const double clipped = std::clamp(grad[i], -options.grad_clip, options.grad_clip);
    *handle(out, i) -= options.alpha * clipped;
  }
  out.project();
  return out;
}

double loss_l1(const Plan& trajectory, const Plan& nominal) {
  double sum = 0.0;
  const size_t n = std::min(trajectory.states.size(), nominal.states.size());
  for (size_t h = 0; h < n; ++h) {
    Eigen::Vector3d diff = trajectory.states[h].vec() - nominal.states[h].vec();
    diff[2] = wrap_angle(diff[2]);
    sum += diff.squaredNorm();
  }
  return sum;
}

double loss_l2(const Plan& trajectory, const Plan& nominal) {
  double sum = 0.0;
  const size_t n = std::min(trajectory.controls.size(), nominal.controls.size());
  for (size_t h = 0; h < n; ++h) {
    sum += (trajectory.controls[h] - nominal.controls[h]).squaredNorm();
  }
  return sum;
}

double loss_l3(const Eigen::VectorXd& d, double eta) { return -eta * d.cwiseAbs().sum(); }

LossCombo combo_for_failure(FailureKind failure) {
  switch (failure) {
    case FailureKind::kCollision: return LossCombo::kCollision;
    case FailureKind::kTimeout: return LossCombo::kStuck;
    default: return LossCombo::kStray;
  }
}

double episode_loss(const EpisodeMetrics& metrics, const NominalPath& nominal,
                    const Scenario& scenario, double dt, double eta, LossCombo combo) {
  // timeline padded to the time limit; a stopped robot keeps paying
  const int rows = static_cast<int>(std::floor(scenario.time_limit_s / dt)) + 1;
  Plan executed, reference;
  executed.states.reserve(rows);
  reference.states.reserve(rows);
  const int ticks = static_cast<int>(metrics.trajectory.size());
  double d_mean = 0.0;
  int d_count = 0;
  for (int i = 0; i < rows; ++i) {
    const EpisodeTick& tick = metrics.trajectory[std::min(i, ticks - 1)];
    executed.states.push_back(i < ticks ? tick.state : metrics.trajectory.back().state);
    executed.controls.push_back(i < ticks ? tick.control : Control(0.0, 0.0));
    const int ref_idx = std::min<int>(i, static_cast<int>(nominal.states.size()) - 1);
    reference.states.push_back(nominal.states[ref_idx]);
    reference.controls.push_back(nominal.controls[ref_idx]);
    if (i < ticks && tick.d_sum_m > 0.0) {
      d_mean += tick.d_sum_m;
      ++d_count;
    }
  }
  const double l1 = loss_l1(executed, reference) * dt;
  const double l2 = loss_l2(executed, reference) * dt;
  const double l3 = d_count > 0 ? -eta * d_mean / d_count : 0.0;

  switch (combo) {
    case LossCombo::kCollision: return l1 + l3;
    case LossCombo::kStuck: return l2 + l3;
    case LossCombo::kStray: return l1;
    case LossCombo::kAuto: break;
  }
  return l1 + l2 + l3;
}

TuneResult tune_params(const Scenario& scenario, const PlannerStack& stack,
                       const TunableParams& initial, int episodes, const LonOptions& options,
                       LossCombo combo,
                       const std::function<void(int, const TuneResult&)>& on_step) {
  TuneResult result;
  result.params = initial;
  result.combo = combo;

  const double dt = stack.model.dt;
  const NominalPath nominal = straight_path(scenario.start.translation(), scenario.goal,
                                            scenario.desired_speed_mps, dt);

  auto run_with = [&](const TunableParams& tp) {
    PlannerStack probe = stack;
    probe.params = tp.applied_to(stack.params);
    return run_episode(scenario, probe, 1.0 / dt);
  };

  for (int ep = 0; ep < episodes; ++ep) {
    const EpisodeMetrics metrics = run_with(result.params);
    if (result.combo == LossCombo::kAuto && !metrics.success) {
      result.combo = combo_for_failure(metrics.failure);
    }
    const LossCombo active =
        result.combo == LossCombo::kAuto ? LossCombo::kCollision : result.combo;
    result.loss_curve.push_back(
        episode_loss(metrics, nominal, scenario, dt, result.params.eta, active));
    result.successes.push_back(metrics.success);

    if (!metrics.success) {  // learn from failures only
      auto loss_fn = [&](const TunableParams& tp) {
        const EpisodeMetrics probe = run_with(tp);
        return episode_loss(probe, nominal, scenario, dt, tp.eta, active);
      };
      result.params = lon_step(result.params, loss_fn, options);
    }
    if (on_step) on_step(ep, result);
  }
  return result;
}

}  // namespace pointnav
