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

#include "pointnav/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pointnav/errors.hpp"
#include "pointnav/qp.hpp"

namespace pointnav {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// derivative of the rotation matrix w.r.t. theta
Mat2 rotation_deriv(double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  Mat2 r;
  r << -s, -c, c, -s;
  return r;
}

}  // namespace

void PlannerParams::validate() const {
  if (!(d_min_m > 0.0) || !(d_min_m <= d_max_m)) {
    throw ConfigError("require 0 < d_min <= d_max");
  }
  if ((q.array() < 0.0).any() || (p.array() < 0.0).any()) {
    throw ConfigError("tracking weights must be nonnegative");
  }
  if (eta < 0.0 || rho1 < 0.0 || rho2 < 0.0 || b_k < 0.0) {
    throw ConfigError("penalty and proximal weights must be nonnegative");
  }
  if (m_keep < 1) throw ConfigError("point budget must be at least 1");
  if (horizon < 1) throw ConfigError("horizon must be at least 1");
}

double penalty_i(const State& s, const Eigen::VectorXd& mu, const Vec2& lambda,
                 const Vec2& p_world, double d, const RobotShape& shape) {
  return lambda.dot(s.translation() - p_world) - mu.dot(shape.h) - d;
}

Eigen::RowVector2d penalty_e(const State& s, const Eigen::VectorXd& mu, const Vec2& lambda,
                             const RobotShape& shape) {
  return mu.transpose() * shape.G + lambda.transpose() * rotation(s.theta);
}

double cost_e2e(const Plan& plan, const DistanceFeatures& features,
                const PlannerParams& params, const Plan& nominal, const RobotShape& shape) {
  double c0 = 0.0;
  const int n_states = static_cast<int>(std::min(plan.states.size(), nominal.states.size()));
  for (int h = 0; h < n_states; ++h) {
    Eigen::Vector3d diff = plan.states[h].vec() - nominal.states[h].vec();
    diff[2] = wrap_angle(diff[2]);
    c0 += (params.q.cwiseProduct(diff)).squaredNorm();
  }
  const int n_ctrl = static_cast<int>(std::min(plan.controls.size(), nominal.controls.size()));
  for (int h = 0; h < n_ctrl; ++h) {
    c0 += (params.p.cwiseProduct(plan.controls[h] - nominal.controls[h])).squaredNorm();
  }

  double cr = 0.0;
  const int steps = std::min<int>(features.steps(), static_cast<int>(plan.states.size()));
  for (int h = 0; h < steps; ++h) {
    const State& s = plan.states[h];
    for (int i = 0; i < features.points(h); ++i) {
      const double margin = penalty_i(s, features.mu[h].col(i), features.lambda[h].col(i),
                                      features.world[h].col(i), params.d_min_m, shape);
      const double hinge = std::min(margin, 0.0);
      cr += 0.5 * params.rho1 * hinge * hinge;
      if (params.rho2 > 0.0) {
        cr += 0.5 * params.rho2 *
              penalty_e(s, features.mu[h].col(i), features.lambda[h].col(i), shape).squaredNorm();
      }
    }
  }
  return c0 + cr;
}

int PlanProblem::slack_count() const {
  int n = 0;
  for (const auto& xi : dpp.a_xi) n += static_cast<int>(xi.size());
  return n;
}

PlanProblem build_problem(const Plan& nominal, const DistanceFeatures& features,
                          const PlannerParams& params, const KinematicModel& model,
                          const Plan& previous, const State& current,
                          const RobotShape& shape) {
  params.validate();
  const int H = params.horizon;
  if (static_cast<int>(previous.states.size()) != H + 1 ||
      static_cast<int>(previous.controls.size()) != H) {
    throw BuildError("previous plan size does not match the horizon");
  }
  if (static_cast<int>(nominal.states.size()) != H + 1 ||
      static_cast<int>(nominal.controls.size()) != H) {
    throw BuildError("nominal plan size does not match the horizon");
  }
  if (features.steps() != H + 1) throw BuildError("feature steps do not match the horizon");
  for (int h = 0; h <= H; ++h) {
    if (features.points(h) > 0 && features.mu[h].rows() != shape.l) {
      throw BuildError("feature mu dimension does not match the robot shape");
    }
  }

  PlanProblem problem;
  problem.horizon = H;
  problem.params = params;
  problem.model = model;

  // continuous heading branch anchored at the previous iterate
  problem.s_bar.resize(H + 1);
  double th = previous.states[0].theta;
  for (int h = 0; h <= H; ++h) {
    if (h > 0) th += wrap_angle(previous.states[h].theta - previous.states[h - 1].theta);
    problem.s_bar[h] = Eigen::Vector3d(previous.states[h].x, previous.states[h].y, th);
  }
  problem.s_init = Eigen::Vector3d(
      current.x, current.y,
      problem.s_bar[0][2] + wrap_angle(current.theta - problem.s_bar[0][2]));
  problem.s_ref.resize(H + 1);
  for (int h = 0; h <= H; ++h) {
    const double branch =
        problem.s_bar[h][2] + wrap_angle(nominal.states[h].theta - problem.s_bar[h][2]);
    problem.s_ref[h] = Eigen::Vector3d(nominal.states[h].x, nominal.states[h].y, branch);
  }
  problem.u_ref = nominal.controls;

  problem.dynamics.resize(H);
  for (int h = 0; h < H; ++h) {
    problem.dynamics[h] = linearize_at(problem.s_bar[h][2], previous.controls[h], model);
  }

  problem.dpp.a_gamma.resize(H + 1);
  problem.dpp.b_gamma.resize(H);
  for (int h = 0; h <= H; ++h) {
    problem.dpp.a_gamma[h] = params.q.cwiseProduct(problem.s_ref[h]);
  }
  for (int h = 0; h < H; ++h) {
    problem.dpp.b_gamma[h] = params.p.cwiseProduct(problem.u_ref[h]);
  }
  problem.dpp.c_gamma.resize(H + 1);
  problem.dpp.d_gamma.resize(H + 1);
  problem.dpp.a_xi.resize(H + 1);
  for (int h = 0; h <= H; ++h) {
    const int m = features.points(h);
    problem.dpp.c_gamma[h] = features.lambda[h];
    problem.dpp.d_gamma[h].resize(2, m);
    problem.dpp.a_xi[h].resize(m);
    for (int i = 0; i < m; ++i) {
      problem.dpp.d_gamma[h].col(i) = shape.G.transpose() * features.mu[h].col(i);
      problem.dpp.a_xi[h][i] = features.lambda[h].col(i).dot(features.world[h].col(i)) +
                               features.mu[h].col(i).dot(shape.h);
    }
  }
  return problem;
}

namespace {

// Reduced form of the subproblem: states eliminated through the linear
// dynamics, slacks eliminated through w = max(-I, 0). The decision vector is
// zeta = [u_0..u_{H-1}, d_0..d_H].
class ReducedProblem {
 public:
  explicit ReducedProblem(const PlanProblem& problem) : pb_(problem) {
    H_ = pb_.horizon;
    nu_ = 2 * H_;
    nd_ = H_ + 1;
    if (pb_.params.rho2 > 0.0) {
      e_a_.resize(H_ + 1);
      e_b_.resize(H_ + 1);
      for (int h = 0; h <= H_; ++h) {
        const int m = static_cast<int>(pb_.dpp.a_xi[h].size());
        e_a_[h].resize(2, m);
        e_b_[h].resize(2, m);
        const Mat2 rot = rotation(pb_.s_bar[h][2]);
        const Mat2 rot_d = rotation_deriv(pb_.s_bar[h][2]);
        for (int i = 0; i < m; ++i) {
          const Vec2 lambda = pb_.dpp.c_gamma[h].col(i);
          e_a_[h].col(i) = pb_.dpp.d_gamma[h].col(i) + rot.transpose() * lambda;
          e_b_[h].col(i) = rot_d.transpose() * lambda;
        }
      }
    }
  }

  int dim() const { return nu_ + nd_; }
  int nu() const { return nu_; }
  int nd() const { return nd_; }

  Eigen::VectorXd lower() const {
    Eigen::VectorXd lo(dim());
    for (int h = 0; h < H_; ++h) lo.segment<2>(2 * h) = pb_.model.u_min;
    lo.tail(nd_).setConstant(pb_.params.d_min_m);
    return lo;
  }
  Eigen::VectorXd upper() const {
    Eigen::VectorXd hi(dim());
    for (int h = 0; h < H_; ++h) hi.segment<2>(2 * h) = pb_.model.u_max;
    hi.tail(nd_).setConstant(pb_.params.d_max_m);
    return hi;
  }

  std::vector<Eigen::Vector3d> roll_states(const Eigen::VectorXd& zeta) const {
    std::vector<Eigen::Vector3d> s(H_ + 1);
    s[0] = pb_.s_init;
    for (int h = 0; h < H_; ++h) {
      const auto& dyn = pb_.dynamics[h];
      s[h + 1] = dyn.A * s[h] + dyn.B * zeta.segment<2>(2 * h) + dyn.c;
    }
    return s;
  }

  struct Costs {
    double tracking = 0.0;
    double regularizer = 0.0;
    double distance = 0.0;
    double proximal = 0.0;
    double total() const { return tracking + regularizer + distance + proximal; }
  };

  Costs costs(const Eigen::VectorXd& zeta) const {
    const auto s = roll_states(zeta);
    Costs c;
    const auto& prm = pb_.params;
    for (int h = 0; h <= H_; ++h) {
      c.tracking += prm.q.cwiseProduct(s[h] - pb_.s_ref[h]).squaredNorm();
      c.proximal += 0.5 * prm.b_k * (s[h] - pb_.s_bar[h]).squaredNorm();
      const double d_h = zeta[nu_ + h];
      c.distance -= prm.eta * d_h;
      const int m = static_cast<int>(pb_.dpp.a_xi[h].size());
      for (int i = 0; i < m; ++i) {
        const double margin = pb_.dpp.c_gamma[h].col(i).dot(s[h].head<2>()) -
                              pb_.dpp.a_xi[h][i] - d_h;
        const double hinge = std::min(margin, 0.0);
        c.regularizer += 0.5 * prm.rho1 * hinge * hinge;
        if (prm.rho2 > 0.0) {
          const Vec2 e = e_a_[h].col(i) + e_b_[h].col(i) * (s[h][2] - pb_.s_bar[h][2]);
          c.regularizer += 0.5 * prm.rho2 * e.squaredNorm();
        }
      }
    }
    for (int h = 0; h < H_; ++h) {
      c.tracking +=
          prm.p.cwiseProduct(zeta.segment<2>(2 * h) - pb_.u_ref[h]).squaredNorm();
    }
    return c;
  }

  double value(const Eigen::VectorXd& zeta) const { return costs(zeta).total(); }

  Eigen::VectorXd gradient(const Eigen::VectorXd& zeta) const {
    const auto s = roll_states(zeta);
    const auto& prm = pb_.params;
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(dim());
    std::vector<Eigen::Vector3d> g_s(H_ + 1, Eigen::Vector3d::Zero());

    for (int h = 0; h <= H_; ++h) {
      g_s[h] = 2.0 * prm.q.cwiseProduct(prm.q).cwiseProduct(s[h] - pb_.s_ref[h]) +
               prm.b_k * (s[h] - pb_.s_bar[h]);
      const double d_h = zeta[nu_ + h];
      double g_d = -prm.eta;
      const int m = static_cast<int>(pb_.dpp.a_xi[h].size());
      for (int i = 0; i < m; ++i) {
        const double margin = pb_.dpp.c_gamma[h].col(i).dot(s[h].head<2>()) -
                              pb_.dpp.a_xi[h][i] - d_h;
        if (margin < 0.0) {
          const double w = prm.rho1 * margin;
          g_s[h].head<2>() += w * pb_.dpp.c_gamma[h].col(i);
          g_d -= w;
        }
        if (prm.rho2 > 0.0) {
          const Vec2 e = e_a_[h].col(i) + e_b_[h].col(i) * (s[h][2] - pb_.s_bar[h][2]);
          g_s[h][2] += prm.rho2 * e.dot(e_b_[h].col(i));
        }
      }
      grad[nu_ + h] = g_d;
    }

    Eigen::Vector3d adjoint = g_s[H_];
    for (int h = H_ - 1; h >= 0; --h) {
      const auto& dyn = pb_.dynamics[h];
      grad.segment<2>(2 * h) =
          dyn.B.transpose() * adjoint +
          2.0 * prm.p.cwiseProduct(prm.p).cwiseProduct(zeta.segment<2>(2 * h) - pb_.u_ref[h]);
      adjoint = g_s[h] + dyn.A.transpose() * adjoint;
    }
    return grad;
  }

  // Hessian upper bound (all hinges active) applied to a direction; used for
  // the Lipschitz estimate.
  Eigen::VectorXd hess_bound_apply(const Eigen::VectorXd& v) const {
    const auto& prm = pb_.params;
    std::vector<Eigen::Vector3d> ds(H_ + 1, Eigen::Vector3d::Zero());
    for (int h = 0; h < H_; ++h) {
      const auto& dyn = pb_.dynamics[h];
      ds[h + 1] = dyn.A * ds[h] + dyn.B * v.segment<2>(2 * h);
    }
    Eigen::VectorXd out = Eigen::VectorXd::Zero(dim());
    std::vector<Eigen::Vector3d> g_s(H_ + 1, Eigen::Vector3d::Zero());
    for (int h = 0; h <= H_; ++h) {
      g_s[h] = 2.0 * prm.q.cwiseProduct(prm.q).cwiseProduct(ds[h]) + prm.b_k * ds[h];
      const double dd = v[nu_ + h];
      double g_d = 0.0;
      const int m = static_cast<int>(pb_.dpp.a_xi[h].size());
      for (int i = 0; i < m; ++i) {
        const double r = pb_.dpp.c_gamma[h].col(i).dot(ds[h].head<2>()) - dd;
        g_s[h].head<2>() += prm.rho1 * r * pb_.dpp.c_gamma[h].col(i);
        g_d -= prm.rho1 * r;
        if (prm.rho2 > 0.0) {
          g_s[h][2] += prm.rho2 * e_b_[h].col(i).squaredNorm() * ds[h][2];
        }
      }
      out[nu_ + h] = g_d;
    }
    Eigen::Vector3d adjoint = g_s[H_];
    for (int h = H_ - 1; h >= 0; --h) {
      const auto& dyn = pb_.dynamics[h];
      out.segment<2>(2 * h) = dyn.B.transpose() * adjoint +
                              2.0 * prm.p.cwiseProduct(prm.p).cwiseProduct(v.segment<2>(2 * h));
      adjoint = g_s[h] + dyn.A.transpose() * adjoint;
    }
    return out;
  }

  double lipschitz_estimate() const {
    Eigen::VectorXd v = Eigen::VectorXd::Ones(dim()).normalized();
    double lam = 1.0;
    for (int it = 0; it < 30; ++it) {
      Eigen::VectorXd hv = hess_bound_apply(v);
      lam = std::max(hv.norm(), 1e-12);
      v = hv / lam;
    }
    return 1.05 * lam + 1e-9;
  }

  Eigen::VectorXd project(const Eigen::VectorXd& zeta) const {
    return zeta.cwiseMax(lower()).cwiseMin(upper());
  }

  double certificate(const Eigen::VectorXd& zeta) const {
    const Eigen::VectorXd pg = zeta - project(zeta - gradient(zeta));
    return pg.cwiseAbs().maxCoeff();
  }

 private:
  const PlanProblem& pb_;
  int H_ = 0, nu_ = 0, nd_ = 0;
  std::vector<Eigen::Matrix2Xd> e_a_, e_b_;  // linearized rotation-residual terms
};

// Accelerated projected gradient with fixed step and value-based restart.
struct FistaResult {
  Eigen::VectorXd zeta;
  double certificate = 0.0;
  int iterations = 0;
  bool converged = false;
};

FistaResult fista(const ReducedProblem& red, Eigen::VectorXd zeta0, double tol, int max_iter) {
  const double step = 1.0 / red.lipschitz_estimate();
  const Eigen::VectorXd lo = red.lower(), hi = red.upper();
  auto clamp = [&](const Eigen::VectorXd& v) { return v.cwiseMax(lo).cwiseMin(hi); };

  Eigen::VectorXd x = clamp(zeta0);
  Eigen::VectorXd y = x;
  double t = 1.0;
  double f_prev = red.value(x);

  FistaResult result;
  int iter = 0;
  for (; iter < max_iter; ++iter) {
    const Eigen::VectorXd x_next = clamp(y - step * red.gradient(y));
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    Eigen::VectorXd y_next = x_next + ((t - 1.0) / t_next) * (x_next - x);

    const double f_next = red.value(x_next);
    if (f_next > f_prev) {  // restart momentum on objective increase
      y_next = x_next;
      t = 1.0;
    } else {
      t = t_next;
    }
    f_prev = f_next;
    x = x_next;
    y = y_next;  // extrapolation point may leave the box; the objective is smooth everywhere

    if ((iter + 1) % 20 == 0) {
      const double cert = red.certificate(x);
      if (cert <= tol) {
        result.converged = true;
        result.certificate = cert;
        ++iter;
        break;
      }
    }
  }
  if (!result.converged) result.certificate = red.certificate(x);
  result.zeta = x;
  result.iterations = iter;
  return result;
}

// Assemble the slack QP over x = [s(3(H+1)), u(2H), d(H+1), w].
struct SlackQpData {
  Eigen::SparseMatrix<double> P, A;
  Eigen::VectorXd q, l, u;
  int ns = 0, nu = 0, nd = 0, nw = 0;
  std::vector<int> w_offset;  // per step
};

SlackQpData assemble_slack_qp(const PlanProblem& pb) {
  const int H = pb.horizon;
  SlackQpData qp;
  qp.ns = 3 * (H + 1);
  qp.nu = 2 * H;
  qp.nd = H + 1;
  qp.w_offset.resize(H + 1);
  int nw = 0;
  for (int h = 0; h <= H; ++h) {
    qp.w_offset[h] = nw;
    nw += static_cast<int>(pb.dpp.a_xi[h].size());
  }
  qp.nw = nw;
  const int n = qp.ns + qp.nu + qp.nd + qp.nw;
  const int s_at = 0, u_at = qp.ns, d_at = qp.ns + qp.nu, w_at = qp.ns + qp.nu + qp.nd;
  const auto& prm = pb.params;

  std::vector<Eigen::Triplet<double>> pt;
  qp.q = Eigen::VectorXd::Zero(n);
  for (int h = 0; h <= H; ++h) {
    for (int c = 0; c < 3; ++c) {
      const double qc = prm.q[c];
      pt.emplace_back(s_at + 3 * h + c, s_at + 3 * h + c, 2.0 * qc * qc + prm.b_k);
      qp.q[s_at + 3 * h + c] = -2.0 * qc * qc * pb.s_ref[h][c] - prm.b_k * pb.s_bar[h][c];
    }
    if (prm.rho2 > 0.0) {
      const Mat2 rot = rotation(pb.s_bar[h][2]);
      const Mat2 rot_d = rotation_deriv(pb.s_bar[h][2]);
      const int m = static_cast<int>(pb.dpp.a_xi[h].size());
      for (int i = 0; i < m; ++i) {
        const Vec2 lambda = pb.dpp.c_gamma[h].col(i);
        const Vec2 ea = pb.dpp.d_gamma[h].col(i) + rot.transpose() * lambda;
        const Vec2 eb = rot_d.transpose() * lambda;
        pt.emplace_back(s_at + 3 * h + 2, s_at + 3 * h + 2, prm.rho2 * eb.squaredNorm());
        qp.q[s_at + 3 * h + 2] +=
            prm.rho2 * (ea.dot(eb) - eb.squaredNorm() * pb.s_bar[h][2]);
      }
    }
  }
  for (int h = 0; h < H; ++h) {
    for (int c = 0; c < 2; ++c) {
      const double pc = prm.p[c];
      pt.emplace_back(u_at + 2 * h + c, u_at + 2 * h + c, 2.0 * pc * pc);
      qp.q[u_at + 2 * h + c] = -2.0 * pc * pc * pb.u_ref[h][c];
    }
  }
  for (int h = 0; h <= H; ++h) qp.q[d_at + h] = -prm.eta;
  for (int k = 0; k < qp.nw; ++k) pt.emplace_back(w_at + k, w_at + k, prm.rho1);

  qp.P.resize(n, n);
  qp.P.setFromTriplets(pt.begin(), pt.end());

  const int m_rows = 3 + 3 * H + qp.nu + qp.nd + 2 * qp.nw;
  std::vector<Eigen::Triplet<double>> at;
  qp.l = Eigen::VectorXd::Zero(m_rows);
  qp.u = Eigen::VectorXd::Zero(m_rows);
  int row = 0;
  for (int c = 0; c < 3; ++c, ++row) {  // initial state
    at.emplace_back(row, s_at + c, 1.0);
    qp.l[row] = qp.u[row] = pb.s_init[c];
  }
  for (int h = 0; h < H; ++h) {  // dynamics
    const auto& dyn = pb.dynamics[h];
    for (int r = 0; r < 3; ++r, ++row) {
      at.emplace_back(row, s_at + 3 * (h + 1) + r, 1.0);
      for (int c = 0; c < 3; ++c) {
        if (dyn.A(r, c) != 0.0) at.emplace_back(row, s_at + 3 * h + c, -dyn.A(r, c));
      }
      for (int c = 0; c < 2; ++c) {
        if (dyn.B(r, c) != 0.0) at.emplace_back(row, u_at + 2 * h + c, -dyn.B(r, c));
      }
      qp.l[row] = qp.u[row] = dyn.c[r];
    }
  }
  for (int h = 0; h < H; ++h) {  // control bounds
    for (int c = 0; c < 2; ++c, ++row) {
      at.emplace_back(row, u_at + 2 * h + c, 1.0);
      qp.l[row] = pb.model.u_min[c];
      qp.u[row] = pb.model.u_max[c];
    }
  }
  for (int h = 0; h <= H; ++h, ++row) {  // distance bounds
    at.emplace_back(row, d_at + h, 1.0);
    qp.l[row] = prm.d_min_m;
    qp.u[row] = prm.d_max_m;
  }
  for (int k = 0; k < qp.nw; ++k, ++row) {  // slack nonnegativity
    at.emplace_back(row, w_at + k, 1.0);
    qp.l[row] = 0.0;
    qp.u[row] = kInf;
  }
  for (int h = 0; h <= H; ++h) {  // hinge rows: w + lambda' t(s) - d >= a_xi
    const int m = static_cast<int>(pb.dpp.a_xi[h].size());
    for (int i = 0; i < m; ++i, ++row) {
      at.emplace_back(row, s_at + 3 * h + 0, pb.dpp.c_gamma[h](0, i));
      at.emplace_back(row, s_at + 3 * h + 1, pb.dpp.c_gamma[h](1, i));
      at.emplace_back(row, d_at + h, -1.0);
      at.emplace_back(row, w_at + qp.w_offset[h] + i, 1.0);
      qp.l[row] = pb.dpp.a_xi[h][i];
      qp.u[row] = kInf;
    }
  }
  qp.A.resize(m_rows, n);
  qp.A.setFromTriplets(at.begin(), at.end());
  return qp;
}

PlanSolution finish_solution(const PlanProblem& pb, const ReducedProblem& red,
                             const Eigen::VectorXd& zeta, SolveStatus status, int iterations) {
  PlanSolution sol;
  const int H = pb.horizon;
  const auto states = red.roll_states(zeta);
  sol.plan.states.reserve(H + 1);
  for (const auto& s : states) sol.plan.states.emplace_back(s[0], s[1], s[2]);
  sol.plan.controls.resize(H);
  for (int h = 0; h < H; ++h) {
    sol.plan.controls[h] = pb.model.clamp(zeta.segment<2>(2 * h));
  }
  sol.d = zeta.tail(H + 1);

  const auto costs = red.costs(zeta);
  sol.objective = costs.total();
  sol.cost_tracking = costs.tracking;
  sol.cost_regularizer = costs.regularizer;
  sol.cost_distance = costs.distance;
  sol.cost_proximal = costs.proximal;
  sol.status = status;
  sol.iterations = iterations;
  sol.certificate = red.certificate(zeta);
  return sol;
}

}  // namespace

PlanSolution PlannerBackend::solve(const PlanProblem& problem) {
  problem.params.validate();
  const int H = problem.horizon;
  if ((problem.model.u_min.array() > problem.model.u_max.array()).any()) {
    throw SolveError("inverted control bounds");
  }

  ReducedProblem red(problem);
  Eigen::VectorXd zeta0(red.dim());
  if (has_warm_ && warm_u_.size() == red.nu() && warm_d_.size() == red.nd()) {
    zeta0.head(red.nu()) = warm_u_;
    zeta0.tail(red.nd()) = warm_d_;
  } else {
    for (int h = 0; h < H; ++h) zeta0.segment<2>(2 * h) = problem.u_ref[h];
    zeta0.tail(red.nd()).setConstant(problem.params.d_min_m);
  }
  zeta0 = red.project(zeta0);

  Eigen::VectorXd zeta;
  SolveStatus status = SolveStatus::kConverged;
  int iterations = 0;

  if (options_.engine == SolverEngine::kProxGradient) {
    const FistaResult fr = fista(red, zeta0, options_.tol, options_.direct_max_iter);
    zeta = fr.zeta;
    iterations = fr.iterations;
    if (!fr.converged) status = SolveStatus::kMaxIter;
  } else {
    const SlackQpData qp = assemble_slack_qp(problem);
    QpSettings settings;
    settings.eps_abs = options_.admm_eps;
    settings.eps_rel = options_.admm_eps;
    settings.max_iter = options_.admm_chunk;
    AdmmQpSolver admm(settings);
    if (!admm.setup(qp.P, qp.q, qp.A, qp.l, qp.u)) {
      throw SolveError("KKT factorization failed");
    }
    // warm start from the reduced seed: states rolled, slacks at the hinge
    {
      Eigen::VectorXd x0 = Eigen::VectorXd::Zero(qp.ns + qp.nu + qp.nd + qp.nw);
      const auto s0 = red.roll_states(zeta0);
      for (int h = 0; h <= H; ++h) x0.segment<3>(3 * h) = s0[h];
      x0.segment(qp.ns, qp.nu) = zeta0.head(qp.nu);
      x0.segment(qp.ns + qp.nu, qp.nd) = zeta0.tail(qp.nd);
      for (int h = 0; h <= H; ++h) {
        const int m = static_cast<int>(problem.dpp.a_xi[h].size());
        for (int i = 0; i < m; ++i) {
          const double margin = problem.dpp.c_gamma[h].col(i).dot(s0[h].head<2>()) -
                                problem.dpp.a_xi[h][i] - zeta0[qp.nu + h];
          x0[qp.ns + qp.nu + qp.nd + qp.w_offset[h] + i] = std::max(-margin, 0.0);
        }
      }
      admm.warm_start(x0, Eigen::VectorXd::Zero(qp.A.rows()));
    }

    Eigen::VectorXd best = zeta0;
    bool met = false;
    for (int chunk = 0; chunk < options_.admm_max_chunks; ++chunk) {
      const QpResult qr = admm.solve();
      iterations += qr.iterations;
      best.head(qp.nu) = qr.x.segment(qp.ns, qp.nu);
      best.tail(qp.nd) = qr.x.segment(qp.ns + qp.nu, qp.nd);
      best = red.project(best);
      if (red.certificate(best) <= options_.tol) {
        met = true;
        break;
      }
      if (qr.converged) break;  // ADMM at its own tolerance; certificate may need polish
    }
    zeta = best;
    if (!met && options_.polish) {
      const FistaResult fr = fista(red, zeta, options_.tol, options_.direct_max_iter);
      zeta = fr.zeta;
      iterations += fr.iterations;
      met = fr.converged;
    }
    if (!met && red.certificate(zeta) > options_.tol) status = SolveStatus::kMaxIter;
  }

  zeta = red.project(zeta);
  warm_u_ = zeta.head(red.nu());
  warm_d_ = zeta.tail(red.nd());
  has_warm_ = true;
  return finish_solution(problem, red, zeta, status, iterations);
}

PlanSolution solve(const PlanProblem& problem, const SolverOptions& options) {
  PlannerBackend backend(options);
  return backend.solve(problem);
}

}  // namespace pointnav
