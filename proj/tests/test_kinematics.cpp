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

#include "pointnav/kinematics.hpp"

#include <doctest.h>

#include <random>

#include "pointnav/errors.hpp"

using namespace pointnav;

namespace {

KinematicModel diff_model(double dt = 0.1) {
  return KinematicModel::differential(dt, Control(-2.0, -3.14), Control(2.0, 3.14));
}

KinematicModel acker_model(double wheelbase = 1.0, double dt = 0.1) {
  return KinematicModel::ackermann(wheelbase, dt, Control(-2.0, -1.2), Control(2.0, 1.2));
}

// central finite differences of the Euler map
void numeric_jacobians(const State& s, const Control& u, const KinematicModel& model,
                       Eigen::Matrix3d& a_num, Eigen::Matrix<double, 3, 2>& b_num) {
  const double eps = 1e-6;
  for (int c = 0; c < 3; ++c) {
    Eigen::Vector3d plus = s.vec(), minus = s.vec();
    plus[c] += eps;
    minus[c] -= eps;
    a_num.col(c) =
        (step_nonlinear_raw(plus, u, model) - step_nonlinear_raw(minus, u, model)) / (2 * eps);
  }
  for (int c = 0; c < 2; ++c) {
    Control plus = u, minus = u;
    plus[c] += eps;
    minus[c] -= eps;
    b_num.col(c) =
        (step_nonlinear_raw(s.vec(), plus, model) - step_nonlinear_raw(s.vec(), minus, model)) /
        (2 * eps);
  }
}

}  // namespace

TEST_CASE("nonlinear step examples") {
  const State s1 = step_nonlinear(State(0, 0, 0), Control(1.0, 0.5), diff_model());
  CHECK(s1.x == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(s1.y == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(s1.theta == doctest::Approx(0.05).epsilon(1e-12));

  const State s2 = step_nonlinear(State(0, 0, 0), Control(1.0, 0.0), acker_model());
  CHECK(s2.x == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(s2.y == doctest::Approx(0.0));
  CHECK(s2.theta == doctest::Approx(0.0));

  const State s3 = step_nonlinear(State(2, 3, 0.4), Control(0.0, 1.0), diff_model());
  CHECK(s3.x == doctest::Approx(2.0));
  CHECK(s3.y == doctest::Approx(3.0));
}

TEST_CASE("linearization coefficients at the origin") {
  const LinearizedDynamics lin = linearize(State(0, 0, 0), Control(1.0, 0.0), diff_model());
  Eigen::Matrix3d a_expect;
  a_expect << 1, 0, 0, 0, 1, 0.1, 0, 0, 1;
  CHECK((lin.A - a_expect).norm() < 1e-12);
  Eigen::Matrix<double, 3, 2> b_expect;
  b_expect << 0.1, 0, 0, 0, 0, 0.1;
  CHECK((lin.B - b_expect).norm() < 1e-12);
  CHECK(lin.c.norm() < 1e-12);

  const LinearizedDynamics acker = linearize(State(0, 0, 0), Control(1.0, 0.0), acker_model());
  CHECK((acker.A - a_expect).norm() < 1e-12);
  CHECK((acker.B - b_expect).norm() < 1e-12);
  CHECK(acker.c.norm() < 1e-12);
}

TEST_CASE("linearization exact at the reference point") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const State s(2 * unit(rng), 2 * unit(rng), 3 * unit(rng));
    const Control u(1.5 * unit(rng), 1.0 * unit(rng));
    for (const auto& model : {diff_model(), acker_model(0.7)}) {
      const LinearizedDynamics lin = linearize(s, u, model);
      const Eigen::Vector3d via_lin = lin.A * s.vec() + lin.B * u + lin.c;
      const Eigen::Vector3d via_step = step_nonlinear_raw(s.vec(), u, model);
      CHECK((via_lin - via_step).norm() < 1e-12);
    }
  }
}

TEST_CASE("steering reference at pi/2 rejected") {
  CHECK_THROWS_AS(linearize(State(0, 0, 0), Control(1.0, M_PI / 2), acker_model()),
                  LinearizationError);
}

TEST_CASE("jacobians match central differences") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const State s(4 * unit(rng), 4 * unit(rng), 3 * unit(rng));
    const Control u(1.8 * unit(rng), 1.1 * unit(rng));
    for (const auto& model : {diff_model(), acker_model(0.8)}) {
      const LinearizedDynamics lin = linearize(s, u, model);
      Eigen::Matrix3d a_num;
      Eigen::Matrix<double, 3, 2> b_num;
      numeric_jacobians(s, u, model, a_num, b_num);
      CHECK((lin.A - a_num).norm() <= 1e-4 * std::max(1.0, a_num.norm()));
      CHECK((lin.B - b_num).norm() <= 1e-4 * std::max(1.0, b_num.norm()));
    }
  }
}

TEST_CASE("first-order consistency: quadratic error decay") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (const auto& model : {diff_model(), acker_model(0.9)}) {
    double worst_ratio = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      const State s(unit(rng), unit(rng), 2 * unit(rng));
      const Control u(1.5 * unit(rng), 0.9 * unit(rng));
      const LinearizedDynamics lin = linearize(s, u, model);

      Eigen::Matrix<double, 5, 1> dir;  // random unit perturbation direction
      for (int c = 0; c < 5; ++c) dir[c] = unit(rng);
      dir.normalize();

      double err_small = 0.0, err_large = 0.0;
      for (const double eps : {1e-3, 1e-4}) {
        const Eigen::Vector3d ds = eps * dir.head<3>();
        const Eigen::Vector2d du = eps * dir.tail<2>();
        const Eigen::Vector3d exact = step_nonlinear_raw(s.vec() + ds, u + du, model);
        const Eigen::Vector3d approx = lin.A * (s.vec() + ds) + lin.B * (u + du) + lin.c;
        const double err = (exact - approx).norm();
        if (eps == 1e-3) err_large = err;
        else err_small = err;
      }
      // shrinking eps by 10 should shrink the error by ~100
      if (err_large > 1e-12) worst_ratio = std::max(worst_ratio, err_small / err_large);
    }
    CHECK(worst_ratio < 0.05);  // quadratic decay leaves ~0.01
  }
}

TEST_CASE("rollout") {
  const KinematicModel model = diff_model();
  const Plan constant = rollout(State(1, 2, 0.3), std::vector<Control>(4, Control(0, 0)), model);
  REQUIRE(constant.states.size() == 5);
  for (const auto& s : constant.states) {
    CHECK(s.x == doctest::Approx(1.0));
    CHECK(s.y == doctest::Approx(2.0));
  }

  const Plan fwd = rollout(State(0, 0, 0), std::vector<Control>(2, Control(1, 0)), model);
  CHECK(fwd.states[0].x == doctest::Approx(0.0));
  CHECK(fwd.states[1].x == doctest::Approx(0.1));
  CHECK(fwd.states[2].x == doctest::Approx(0.2));
}
