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

#include "pointnav/encoder.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <numeric>
#include <random>

#include "pointnav/errors.hpp"

namespace pointnav {

namespace {

constexpr int kHiddenWidths[] = {32, 64, 128, 64, 32};
constexpr int kNumLayers = 6;

inline double leaky(double z) { return z > 0.0 ? z : EncoderNet::kLeakySlope * z; }
inline double leaky_grad(double z) { return z > 0.0 ? 1.0 : EncoderNet::kLeakySlope; }

std::vector<int> layer_widths(int output_dim) {
  std::vector<int> w = {2};
  for (int h : kHiddenWidths) w.push_back(h);
  w.push_back(output_dim);
  return w;
}

}  // namespace

EncoderNet::EncoderNet(int out_dim, double scale, std::uint64_t seed) : input_scale(scale) {
  const auto widths = layer_widths(out_dim);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  weights.resize(kNumLayers);
  biases.resize(kNumLayers);
  for (int i = 0; i < kNumLayers; ++i) {
    const int rows = widths[i + 1], cols = widths[i];
    const double std_dev = std::sqrt(2.0 / cols);
    weights[i].resize(rows, cols);
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) weights[i](r, c) = std_dev * normal(rng);
    }
    biases[i] = Eigen::VectorXd::Zero(rows);
  }
}

int EncoderNet::output_dim() const {
  return weights.empty() ? 0 : static_cast<int>(weights.back().rows());
}

Eigen::MatrixXd EncoderNet::mu(const Eigen::Matrix2Xd& points) const {
  Eigen::MatrixXd a = points / input_scale;
  for (int i = 0; i < kNumLayers; ++i) {
    Eigen::MatrixXd z = (weights[i] * a).colwise() + biases[i];
    if (i + 1 < kNumLayers) {
      a = z.unaryExpr([](double v) { return leaky(v); });
    } else {
      a = z.cwiseMax(0.0);  // nonnegativity map
    }
  }
  return a;
}

Eigen::MatrixXd OracleEncoder::mu(const Eigen::Matrix2Xd& points) const {
  Eigen::MatrixXd out(shape_.l, points.cols());
  for (Eigen::Index i = 0; i < points.cols(); ++i) {
    out.col(i) = exact_distance(points.col(i), shape_).dual.mu;
  }
  return out;
}

Dataset sample_training_set(const RobotShape& shape, const TrainConfig& config) {
  Dataset data;
  data.points.resize(2, config.sample_count);
  data.mu.resize(shape.l, config.sample_count);
  data.d.resize(config.sample_count);

  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int i = 0;
  while (i < config.sample_count) {
    const double r = config.r_max_m * std::sqrt(unit(rng));
    const double ang = 2.0 * M_PI * unit(rng);
    const Vec2 p(r * std::cos(ang), r * std::sin(ang));
    const DistanceResult res = exact_distance(p, shape);
    if (res.d < -config.d_interior_cap_m) continue;
    data.points.col(i) = p;
    data.mu.col(i) = res.dual.mu;
    data.d[i] = res.d;
    ++i;
  }
  return data;
}

TrainReport train(EncoderNet& net, const Dataset& dataset, const RobotShape& shape,
                  const TrainConfig& config) {
  TrainReport report;
  const int n_total = dataset.size();
  if (n_total == 0) throw TrainingDiverged("empty dataset");
  const int n_hold = static_cast<int>(std::floor(config.holdout_fraction * n_total));
  const int n_train = n_total - n_hold;
  report.train_count = n_train;
  report.holdout_count = n_hold;

  if (config.epochs <= 0) {
    if (n_hold > 0) {
      report.holdout = evaluate_distance_error(net, shape,
                                               dataset.points.rightCols(n_hold),
                                               dataset.d.tail(n_hold));
    }
    return report;
  }

  const int n_layers = kNumLayers;
  // Adam state
  std::vector<Eigen::MatrixXd> mw(n_layers), vw(n_layers);
  std::vector<Eigen::VectorXd> mb(n_layers), vb(n_layers);
  for (int i = 0; i < n_layers; ++i) {
    mw[i] = Eigen::MatrixXd::Zero(net.weights[i].rows(), net.weights[i].cols());
    vw[i] = mw[i];
    mb[i] = Eigen::VectorXd::Zero(net.biases[i].size());
    vb[i] = mb[i];
  }
  const double beta1 = 0.9, beta2 = 0.999, adam_eps = 1e-8;
  long step = 0;

  std::vector<int> order(n_train);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(config.seed ^ 0x9e3779b97f4a7c15ull);

  std::vector<Eigen::MatrixXd> z(n_layers), act(n_layers + 1);

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    long seen = 0;

    for (int start = 0; start < n_train; start += config.batch_size) {
      const int b = std::min(config.batch_size, n_train - start);
      Eigen::Matrix2Xd pts(2, b);
      Eigen::MatrixXd mu_star(shape.l, b);
      Eigen::VectorXd d_star(b);
      for (int k = 0; k < b; ++k) {
        const int idx = order[start + k];
        pts.col(k) = dataset.points.col(idx);
        mu_star.col(k) = dataset.mu.col(idx);
        d_star[k] = dataset.d[idx];
      }
      // residual rows r_i = G p_i - h, so dhat = sum(mu .* r)
      const Eigen::MatrixXd resid = (shape.G * pts).colwise() - shape.h;

      // forward
      act[0] = pts / net.input_scale;
      for (int i = 0; i < n_layers; ++i) {
        z[i].noalias() = net.weights[i] * act[i];
        z[i].colwise() += net.biases[i];
        if (i + 1 < n_layers) {
          act[i + 1] = z[i].unaryExpr([](double v) { return leaky(v); });
        } else {
          act[i + 1] = z[i].cwiseMax(0.0);
        }
      }
      const Eigen::MatrixXd& mu_hat = act[n_layers];

      const Eigen::MatrixXd mu_err = mu_hat - mu_star;
      const Eigen::VectorXd dhat = (mu_hat.array() * resid.array()).colwise().sum();
      const Eigen::VectorXd d_err = dhat - d_star;
      const Eigen::Matrix2Xd dir = shape.G.transpose() * mu_hat;  // -lambda per column
      Eigen::VectorXd norm_excess(b);
      for (int k = 0; k < b; ++k) norm_excess[k] = std::max(dir.col(k).norm() - 1.0, 0.0);

      const double batch_loss =
          (config.w_mu * mu_err.colwise().squaredNorm().sum() +
           config.w_d * d_err.squaredNorm() + config.w_c * norm_excess.squaredNorm()) / b;
      epoch_loss += batch_loss * b;
      seen += b;

      // backward
      Eigen::MatrixXd grad = 2.0 * config.w_mu * mu_err;
      grad += (2.0 * config.w_d) * (resid * d_err.asDiagonal());
      for (int k = 0; k < b; ++k) {
        const double nrm = dir.col(k).norm();
        if (norm_excess[k] > 0.0 && nrm > 0.0) {
          grad.col(k).noalias() +=
              (2.0 * config.w_c * norm_excess[k] / nrm) * (shape.G * dir.col(k));
        }
      }
      grad /= b;

      Eigen::MatrixXd delta = grad.array() * (z[n_layers - 1].array() > 0.0).cast<double>();
      ++step;
      const double corr = config.learning_rate *
                          std::sqrt(1.0 - std::pow(beta2, step)) / (1.0 - std::pow(beta1, step));
      for (int i = n_layers - 1; i >= 0; --i) {
        const Eigen::MatrixXd grad_w = delta * act[i].transpose();
        const Eigen::VectorXd grad_b = delta.rowwise().sum();
        if (i > 0) {
          Eigen::MatrixXd back = net.weights[i].transpose() * delta;
          delta = back.array() * z[i - 1].unaryExpr([](double v) { return leaky_grad(v); }).array();
        }
        mw[i] = beta1 * mw[i] + (1.0 - beta1) * grad_w;
        vw[i] = beta2 * vw[i] + (1.0 - beta2) * grad_w.cwiseProduct(grad_w);
        net.weights[i] -= corr * mw[i].cwiseQuotient((vw[i].cwiseSqrt().array() + adam_eps).matrix());
        mb[i] = beta1 * mb[i] + (1.0 - beta1) * grad_b;
        vb[i] = beta2 * vb[i] + (1.0 - beta2) * grad_b.cwiseProduct(grad_b);
        net.biases[i] -= corr * mb[i].cwiseQuotient((vb[i].cwiseSqrt().array() + adam_eps).matrix());
      }
    }

    epoch_loss /= std::max<long>(seen, 1);
    if (!std::isfinite(epoch_loss)) throw TrainingDiverged("non-finite training loss");
    report.epoch_loss.push_back(epoch_loss);
  }

  if (n_hold > 0) {
    report.holdout = evaluate_distance_error(net, shape, dataset.points.rightCols(n_hold),
                                             dataset.d.tail(n_hold));
  }
  return report;
}

DistanceErrorStats evaluate_distance_error(const MuEncoder& net, const RobotShape& shape,
                                           const Eigen::Matrix2Xd& points,
                                           const Eigen::VectorXd& d_true) {
  const Eigen::MatrixXd mu_hat = net.mu(points);
  const Eigen::MatrixXd resid = (shape.G * points).colwise() - shape.h;
  const Eigen::VectorXd dhat = (mu_hat.array() * resid.array()).colwise().sum();
  Eigen::VectorXd abs_err = (dhat - d_true).cwiseAbs();

  DistanceErrorStats stats;
  stats.mean_abs = abs_err.mean();
  stats.max_abs = abs_err.maxCoeff();
  std::vector<double> sorted(abs_err.data(), abs_err.data() + abs_err.size());
  std::sort(sorted.begin(), sorted.end());
  const auto idx = static_cast<size_t>(std::ceil(0.99 * sorted.size())) - 1;
  stats.p99_abs = sorted[std::min(idx, sorted.size() - 1)];
  return stats;
}

DistanceFeatures encode(const MuEncoder& net, const PointFlow& flow, const Plan& plan,
                        const RobotShape& shape) {
  DistanceFeatures features;
  const int steps = flow.steps();
  features.mu.resize(steps);
  features.lambda.resize(steps);
  features.dhat.resize(steps);
  features.world.resize(steps);

  for (int h = 0; h < steps; ++h) {
    const Eigen::Matrix2Xd& body = flow.body[h];
    features.mu[h] = net.mu(body);
    const Mat2 rot = rotation(plan.states[h].theta);
    // lambda' = -mu' G R(s)', i.e. lambda = -R(s) G' mu
    features.lambda[h] = -(rot * (shape.G.transpose() * features.mu[h]));
    const Eigen::MatrixXd resid = (shape.G * body).colwise() - shape.h;
    features.dhat[h] = (features.mu[h].array() * resid.array()).colwise().sum();
    features.world[h] = flow.world[h];
  }
  return features;
}

DistanceFeatures sort_and_select(const DistanceFeatures& features, int m_keep) {
  DistanceFeatures out;
  const int steps = features.steps();
  out.mu.resize(steps);
  out.lambda.resize(steps);
  out.dhat.resize(steps);
  out.world.resize(steps);

  for (int h = 0; h < steps; ++h) {
    const int m = features.points(h);
    const int keep = std::min(m_keep, m);
    std::vector<int> idx(m);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
      return features.dhat[h][a] < features.dhat[h][b];
    });
    const int l = features.mu[h].rows();
    out.mu[h].resize(l, keep);
    out.lambda[h].resize(2, keep);
    out.dhat[h].resize(keep);
    out.world[h].resize(2, keep);
    for (int k = 0; k < keep; ++k) {
      const int i = idx[k];
      out.mu[h].col(k) = features.mu[h].col(i);
      out.lambda[h].col(k) = features.lambda[h].col(i);
      out.dhat[h][k] = features.dhat[h][i];
      out.world[h].col(k) = features.world[h].col(i);
    }
  }
  return out;
}

namespace {
constexpr std::uint64_t kWeightsMagic = 0x50564e5754533144ull;  // "PVNWTS1D"
constexpr std::uint32_t kWeightsVersion = 1;
}  // namespace

void save_weights(const EncoderNet& net, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open weights file for writing: " + path);

  const auto widths = layer_widths(net.output_dim());
  const std::uint32_t l = static_cast<std::uint32_t>(net.output_dim());
  const std::uint32_t n_widths = static_cast<std::uint32_t>(widths.size());
  out.write(reinterpret_cast<const char*>(&kWeightsMagic), sizeof(kWeightsMagic));
  out.write(reinterpret_cast<const char*>(&kWeightsVersion), sizeof(kWeightsVersion));
  out.write(reinterpret_cast<const char*>(&l), sizeof(l));
  out.write(reinterpret_cast<const char*>(&n_widths), sizeof(n_widths));
  for (int w : widths) {
    const std::uint32_t v = static_cast<std::uint32_t>(w);
    out.write(reinterpret_cast<const char*>(&v), sizeof(v));
  }
  out.write(reinterpret_cast<const char*>(&net.input_scale), sizeof(net.input_scale));
  for (size_t i = 0; i < net.weights.size(); ++i) {
    // row-major serialization
    const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> wr =
        net.weights[i];
    out.write(reinterpret_cast<const char*>(wr.data()),
              static_cast<std::streamsize>(sizeof(double) * wr.size()));
    out.write(reinterpret_cast<const char*>(net.biases[i].data()),
              static_cast<std::streamsize>(sizeof(double) * net.biases[i].size()));
  }
  if (!out) throw IoError("failed writing weights file: " + path);
}

EncoderNet load_weights(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open weights file: " + path);

  std::uint64_t magic = 0;
  std::uint32_t version = 0, l = 0, n_widths = 0;
  in.read(reinterpret_cast<char*>(&magic), sizeof(magic));
  in.read(reinterpret_cast<char*>(&version), sizeof(version));
  if (!in || magic != kWeightsMagic) throw IoError("not a weights file: " + path);
  if (version != kWeightsVersion) throw IoError("unsupported weights version");
  in.read(reinterpret_cast<char*>(&l), sizeof(l));
  in.read(reinterpret_cast<char*>(&n_widths), sizeof(n_widths));
  std::vector<std::uint32_t> widths(n_widths);
  for (auto& w : widths) in.read(reinterpret_cast<char*>(&w), sizeof(w));

  const auto expected = layer_widths(static_cast<int>(l));
  if (widths.size() != expected.size() ||
      !std::equal(widths.begin(), widths.end(), expected.begin(),
                  [](std::uint32_t a, int b) { return static_cast<int>(a) == b; })) {
    throw IoError("unexpected layer widths in weights file");
  }

  EncoderNet net;
  in.read(reinterpret_cast<char*>(&net.input_scale), sizeof(net.input_scale));
  net.weights.resize(kNumLayers);
  net.biases.resize(kNumLayers);
  for (int i = 0; i < kNumLayers; ++i) {
    const int rows = expected[i + 1], cols = expected[i];
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> wr(rows, cols);
    in.read(reinterpret_cast<char*>(wr.data()),
            static_cast<std::streamsize>(sizeof(double) * wr.size()));
    net.weights[i] = wr;
    net.biases[i].resize(rows);
    in.read(reinterpret_cast<char*>(net.biases[i].data()),
            static_cast<std::streamsize>(sizeof(double) * rows));
  }
  if (!in) throw IoError("truncated weights file: " + path);
  return net;
}

}  // namespace pointnav
