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

#include <vector>

namespace pointnav {

bool AdmmQpSolver::setup(const Eigen::SparseMatrix<double>& P, const Eigen::VectorXd& q,
                         const Eigen::SparseMatrix<double>& A, const Eigen::VectorXd& l,
                         const Eigen::VectorXd& u) {
  P_ = P;
  q_ = q;
  A_ = A;
  At_ = A.transpose();
  l_ = l;
  u_ = u;
  n_ = static_cast<int>(P.rows());
  m_ = static_cast<int>(A.rows());

  rho_base_ = settings_.rho;
  if (!refactor()) return false;

  if (x_.size() != n_) x_ = Eigen::VectorXd::Zero(n_);
  if (y_.size() != m_) y_ = Eigen::VectorXd::Zero(m_);
  z_ = (A_ * x_).cwiseMax(l_).cwiseMin(u_);
  ready_ = true;
  return true;
}

bool AdmmQpSolver::refactor() {
  rho_vec_.resize(m_);
  for (int i = 0; i < m_; ++i) {
    const bool eq = (l_[i] == u_[i]);
    rho_vec_[i] = eq ? rho_base_ * settings_.rho_eq_scale : rho_base_;
  }
  rho_inv_ = rho_vec_.cwiseInverse();

  // KKT = [P + sigma I    A' ]
  //       [A             -1/rho]
  Eigen::SparseMatrix<double> kkt(n_ + m_, n_ + m_);
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(P_.nonZeros() + 2 * A_.nonZeros() + n_ + m_);
  for (int k = 0; k < P_.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(P_, k); it; ++it) {
      trips.emplace_back(it.row(), it.col(), it.value());
    }
  }
  for (int i = 0; i < n_; ++i) trips.emplace_back(i, i, settings_.sigma);
  for (int k = 0; k < A_.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(A_, k); it; ++it) {
      trips.emplace_back(n_ + it.row(), it.col(), it.value());
      trips.emplace_back(it.col(), n_ + it.row(), it.value());
    }
  }
  for (int i = 0; i < m_; ++i) trips.emplace_back(n_ + i, n_ + i, -rho_inv_[i]);
  kkt.setFromTriplets(trips.begin(), trips.end());

  kkt_.compute(kkt);
  if (kkt_.info() != Eigen::Success) {
    ready_ = false;
    return false;
  }
  return true;
}

void AdmmQpSolver::warm_start(const Eigen::VectorXd& x0, const Eigen::VectorXd& y0) {
  x_ = x0;
  y_ = y0;
  if (ready_) z_ = (A_ * x_).cwiseMax(l_).cwiseMin(u_);
}

void AdmmQpSolver::residuals(double& r_prim, double& r_dual, double& eps_prim,
                             double& eps_dual) const {
  const Eigen::VectorXd ax = A_ * x_;
  const Eigen::VectorXd px = P_ * x_;
  const Eigen::VectorXd aty = At_ * y_;
  r_prim = m_ > 0 ? (ax - z_).cwiseAbs().maxCoeff() : 0.0;
  r_dual = (px + q_ + aty).cwiseAbs().maxCoeff();
  const double prim_scale =
      m_ > 0 ? std::max(ax.cwiseAbs().maxCoeff(), z_.cwiseAbs().maxCoeff()) : 0.0;
  const double dual_scale = std::max({px.cwiseAbs().maxCoeff(), aty.cwiseAbs().maxCoeff(),
                                      q_.cwiseAbs().maxCoeff()});
  eps_prim = settings_.eps_abs + settings_.eps_rel * prim_scale;
  eps_dual = settings_.eps_abs + settings_.eps_rel * dual_scale;
}

QpResult AdmmQpSolver::solve() {
  QpResult result;
  if (!ready_) return result;

  Eigen::VectorXd rhs(n_ + m_), sol(n_ + m_);
  int iter = 0;
  for (; iter < settings_.max_iter; ++iter) {
    rhs.head(n_) = settings_.sigma * x_ - q_;
    rhs.tail(m_) = z_ - y_.cwiseProduct(rho_inv_);
    sol = kkt_.solve(rhs);

    const Eigen::VectorXd x_tilde = sol.head(n_);
    const Eigen::VectorXd nu = sol.tail(m_);
    const Eigen::VectorXd z_tilde = z_ + (nu - y_).cwiseProduct(rho_inv_);

    x_ = settings_.alpha * x_tilde + (1.0 - settings_.alpha) * x_;
    const Eigen::VectorXd z_relax = settings_.alpha * z_tilde + (1.0 - settings_.alpha) * z_;
    const Eigen::VectorXd z_new =
        (z_relax + y_.cwiseProduct(rho_inv_)).cwiseMax(l_).cwiseMin(u_);
    y_ += rho_vec_.cwiseProduct(z_relax - z_new);
    z_ = z_new;

    if ((iter + 1) % settings_.check_interval == 0) {
      double r_prim, r_dual, eps_prim, eps_dual;
      residuals(r_prim, r_dual, eps_prim, eps_dual);
      if (r_prim <= eps_prim && r_dual <= eps_dual) {
        result.converged = true;
        result.primal_residual = r_prim;
        result.dual_residual = r_dual;
        ++iter;
        break;
      }
      if (settings_.adaptive_rho && (iter + 1) % settings_.adaptive_interval == 0 && m_ > 0) {
        const double prim_rel = r_prim / std::max(eps_prim, 1e-12);
        const double dual_rel = r_dual / std::max(eps_dual, 1e-12);
        const double ratio = std::sqrt(prim_rel / std::max(dual_rel, 1e-12));
        if (ratio > 5.0 || ratio < 0.2) {
          rho_base_ = std::clamp(rho_base_ * ratio, 1e-6, 1e6);
          if (!refactor()) break;
        }
      }
    }
  }

  if (!result.converged) {
    double r_prim, r_dual, eps_prim, eps_dual;
    residuals(r_prim, r_dual, eps_prim, eps_dual);
    result.primal_residual = r_prim;
    result.dual_residual = r_dual;
  }
  result.x = x_;
  result.y = y_;
  result.iterations = iter;
  return result;
}

}  // namespace pointnav
