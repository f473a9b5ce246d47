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

#ifndef POINTNAV_QP_HPP_
#define POINTNAV_QP_HPP_

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

namespace pointnav {

// Operator-splitting solver for
//
//   min  0.5 x' P x + q' x
//   s.t. l <= A x <= u           (rows with l == u are equalities)
//
// Fixed-step ADMM with a single KKT factorization per setup. Fully
// deterministic: no adaptive penalty, no randomized pivoting.

struct QpSettings {
  double rho = 0.1;           // splitting step for inequality rows
  double rho_eq_scale = 1e3;  // equality rows use rho * rho_eq_scale
  double sigma = 1e-6;
  double alpha = 1.6;         // over-relaxation
  double eps_abs = 1e-6;
  double eps_rel = 1e-6;
  int max_iter = 20000;
  int check_interval = 25;
  // residual-balancing rho updates; the rule is deterministic and triggers a
  // KKT refactorization
  bool adaptive_rho = true;
  int adaptive_interval = 100;
};

struct QpResult {
  Eigen::VectorXd x;
  Eigen::VectorXd y;  // multipliers for the rows of A
  int iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  bool converged = false;
};

class AdmmQpSolver {
 public:
  explicit AdmmQpSolver(QpSettings settings = {}) : settings_(settings) {}

  /// Factor the KKT system for the given problem data. Returns false when the
  /// factorization fails (P not positive semidefinite enough for sigma).
  bool setup(const Eigen::SparseMatrix<double>& P, const Eigen::VectorXd& q,
             const Eigen::SparseMatrix<double>& A, const Eigen::VectorXd& l,
             const Eigen::VectorXd& u);

  /// Seed the next solve; z is projected from A x0.
  void warm_start(const Eigen::VectorXd& x0, const Eigen::VectorXd& y0);

  QpResult solve();

  const QpSettings& settings() const { return settings_; }

 private:
  void residuals(double& r_prim, double& r_dual, double& eps_prim, double& eps_dual) const;
  bool refactor();

  QpSettings settings_;
  Eigen::SparseMatrix<double> P_, A_, At_;
  Eigen::VectorXd q_, l_, u_;
  double rho_base_ = 0.1;
  Eigen::VectorXd rho_vec_, rho_inv_;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> kkt_;
  Eigen::VectorXd x_, z_, y_;
  int n_ = 0, m_ = 0;
  bool ready_ = false;
};

}  // namespace pointnav

#endif  // POINTNAV_QP_HPP_
