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

#include "pointnav/qp.hpp"

#include <doctest.h>

#include <random>

using namespace pointnav;

namespace {

Eigen::SparseMatrix<double> sparse_identity(int n) {
  Eigen::SparseMatrix<double> eye(n, n);
  eye.setIdentity();
  return eye;
}

}  // namespace

TEST_CASE("box projection qp") {
  // min 0.5||x - c||^2 s.t. -1 <= x <= 1  ->  clamp(c)
  const int n = 4;
  const Eigen::VectorXd c = (Eigen::VectorXd(n) << 2.0, -3.0, 0.25, 0.9).finished();
  QpSettings settings;
  settings.eps_abs = settings.eps_rel = 1e-9;
  AdmmQpSolver solver(settings);
  REQUIRE(solver.setup(sparse_identity(n), -c, sparse_identity(n),
                       Eigen::VectorXd::Constant(n, -1.0), Eigen::VectorXd::Constant(n, 1.0)));
  const QpResult result = solver.solve();
  REQUIRE(result.converged);
  const Eigen::VectorXd expected = c.cwiseMax(-1.0).cwiseMin(1.0);
  CHECK((result.x - expected).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("equality constrained qp") {
  // min 0.5 x'x s.t. x1 + x2 = 1 -> (0.5, 0.5)
  Eigen::SparseMatrix<double> a(1, 2);
  a.insert(0, 0) = 1.0;
  a.insert(0, 1) = 1.0;
  QpSettings settings;
  settings.eps_abs = settings.eps_rel = 1e-10;
  AdmmQpSolver solver(settings);
  REQUIRE(solver.setup(sparse_identity(2), Eigen::VectorXd::Zero(2), a,
                       Eigen::VectorXd::Constant(1, 1.0), Eigen::VectorXd::Constant(1, 1.0)));
  const QpResult result = solver.solve();
  REQUIRE(result.converged);
  CHECK(result.x[0] == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(result.x[1] == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("random strongly convex qps satisfy kkt") {
  std::mt19937_64 rng(41);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 8, m = 12;
    Eigen::MatrixXd base(n, n);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) base(r, c) = normal(rng);
    const Eigen::MatrixXd p_dense =
        base * base.transpose() + 0.5 * Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd a_dense(m, n);
    for (int r = 0; r < m; ++r)
      for (int c = 0; c < n; ++c) a_dense(r, c) = normal(rng);
    Eigen::VectorXd q(n), x_feas(n);
    for (int i = 0; i < n; ++i) q[i] = normal(rng);
    for (int i = 0; i < n; ++i) x_feas[i] = normal(rng);
    // bands around A x_feas keep the problem feasible by construction
    const Eigen::VectorXd mid = a_dense * x_feas;
    Eigen::VectorXd l(m), u(m);
    for (int i = 0; i < m; ++i) {
      l[i] = mid[i] - std::abs(normal(rng));
      u[i] = mid[i] + std::abs(normal(rng));
    }

    QpSettings settings;
    settings.eps_abs = settings.eps_rel = 1e-8;
    AdmmQpSolver solver(settings);
    REQUIRE(solver.setup(p_dense.sparseView(), q, a_dense.sparseView(), l, u));
    const QpResult result = solver.solve();
    REQUIRE(result.converged);

    // stationarity: P x + q + A' y = 0
    const Eigen::VectorXd stat = p_dense * result.x + q + a_dense.transpose() * result.y;
    CHECK(stat.cwiseAbs().maxCoeff() < 1e-5);
    // primal feasibility
    const Eigen::VectorXd ax = a_dense * result.x;
    CHECK((ax - u).maxCoeff() < 1e-5);
    CHECK((l - ax).maxCoeff() < 1e-5);
    // dual signs: positive multipliers sit on the upper side, negative on the lower
    for (int i = 0; i < m; ++i) {
      if (result.y[i] > 1e-6) CHECK(ax[i] > u[i] - 1e-4);
      if (result.y[i] < -1e-6) CHECK(ax[i] < l[i] + 1e-4);
    }
  }
}

TEST_CASE("warm start accelerates resolve") {
  std::mt19937_64 rng(43);
  std::normal_distribution<double> normal(0.0, 1.0);
  const int n = 20, m = 30;
  Eigen::MatrixXd base(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) base(r, c) = normal(rng);
  const Eigen::MatrixXd p_dense = base * base.transpose() + Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd a_dense(m, n);
  for (int r = 0; r < m; ++r)
    for (int c = 0; c < n; ++c) a_dense(r, c) = normal(rng);
  Eigen::VectorXd q(n);
  for (int i = 0; i < n; ++i) q[i] = normal(rng);
  const Eigen::VectorXd l = Eigen::VectorXd::Constant(m, -2.0);
  const Eigen::VectorXd u = Eigen::VectorXd::Constant(m, 2.0);

  QpSettings settings;
  settings.eps_abs = settings.eps_rel = 1e-9;
  AdmmQpSolver cold(settings);
  REQUIRE(cold.setup(p_dense.sparseView(), q, a_dense.sparseView(), l, u));
  const QpResult first = cold.solve();
  REQUIRE(first.converged);

  AdmmQpSolver warm(settings);
  REQUIRE(warm.setup(p_dense.sparseView(), q, a_dense.sparseView(), l, u));
  warm.warm_start(first.x, first.y);
  const QpResult second = warm.solve();
  REQUIRE(second.converged);
  CHECK(second.iterations < first.iterations);
  CHECK((second.x - first.x).cwiseAbs().maxCoeff() < 1e-5);
}
