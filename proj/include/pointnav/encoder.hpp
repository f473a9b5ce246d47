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

#ifndef POINTNAV_ENCODER_HPP_
#define POINTNAV_ENCODER_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pointnav/distance.hpp"
#include "pointnav/geometry.hpp"

namespace pointnav {

// Supervised encoder mapping body-frame obstacle points to the edge-weight
// multipliers mu of the dual distance problem. The direction multiplier
// lambda is never predicted: it is reconstructed analytically from mu and the
// pose, which zeroes the rotation-consistency penalty by construction.

/// Anything that maps body-frame points to nonnegative mu vectors.
class MuEncoder {
 public:
  virtual ~MuEncoder() = default;
  virtual int output_dim() const = 0;
  /// points: 2 x N body frame -> mu: l x N, nonnegative.
  virtual Eigen::MatrixXd mu(const Eigen::Matrix2Xd& points) const = 0;
};

/// Six affine layers, 2 -> 32 -> 64 -> 128 -> 64 -> 32 -> l. Hidden units are
/// leaky rectifiers; the output map is a rectifier, so mu >= 0 holds for every
/// input by construction.
class EncoderNet : public MuEncoder {
 public:
  EncoderNet() = default;
  EncoderNet(int output_dim, double input_scale, std::uint64_t seed);

  int output_dim() const override;
  Eigen::MatrixXd mu(const Eigen::Matrix2Xd& points) const override;

  double input_scale = 1.0;
  std::vector<Eigen::MatrixXd> weights;  // out x in per layer
  std::vector<Eigen::VectorXd> biases;

  static constexpr double kLeakySlope = 0.01;
};

/// Reference encoder backed by the exact dual solver; used as ground truth in
/// tests and for encoder-free debugging runs.
class OracleEncoder : public MuEncoder {
 public:
  explicit OracleEncoder(RobotShape shape) : shape_(std::move(shape)) {}
  int output_dim() const override { return shape_.l; }
  Eigen::MatrixXd mu(const Eigen::Matrix2Xd& points) const override;

 private:
  RobotShape shape_;
};

struct TrainConfig {
  int sample_count = 50000;
  double r_max_m = 16.0;          // sampling disc radius, >= lidar max range
  double d_interior_cap_m = 0.25; // drop samples deeper inside than this
  double holdout_fraction = 0.1;
  int epochs = 60;
  int batch_size = 256;
  double learning_rate = 1e-3;
  double w_mu = 1.0;
  double w_d = 2.0;
  double w_c = 0.5;
  std::uint64_t seed = 1;
};

struct Dataset {
  Eigen::Matrix2Xd points;  // 2 x N body frame
  Eigen::MatrixXd mu;       // l x N labels
  Eigen::VectorXd d;        // N signed distances

  int size() const { return static_cast<int>(points.cols()); }
};

/// Uniform samples in the disc of radius r_max, labeled by the exact solver;
/// deep-interior points (d < -cap) are rejected and re-drawn.
Dataset sample_training_set(const RobotShape& shape, const TrainConfig& config);

struct DistanceErrorStats {
  double mean_abs = 0.0;
  double p99_abs = 0.0;
  double max_abs = 0.0;
};

struct TrainReport {
  std::vector<double> epoch_loss;   // mean combined loss per epoch
  DistanceErrorStats holdout;       // |dhat - d*| on the held-out slice
  int train_count = 0;
  int holdout_count = 0;
};

/// Mini-batch gradient training (Adam) of the combined mu / distance /
/// direction-norm loss. Throws TrainingDiverged on non-finite loss.
TrainReport train(EncoderNet& net, const Dataset& dataset, const RobotShape& shape,
                  const TrainConfig& config);

/// |mu' (G p - h) - d*| statistics of an encoder over labeled points.
DistanceErrorStats evaluate_distance_error(const MuEncoder& net, const RobotShape& shape,
                                           const Eigen::Matrix2Xd& points,
                                           const Eigen::VectorXd& d_true);

/// Per-point dual features over a horizon: mu, world-frame lambda, and the
/// estimated signed distance, alongside the generating world points.
struct DistanceFeatures {
  std::vector<Eigen::MatrixXd> mu;       // [h] l x M
  std::vector<Eigen::Matrix2Xd> lambda;  // [h] 2 x M, world frame
  std::vector<Eigen::VectorXd> dhat;     // [h] M
  std::vector<Eigen::Matrix2Xd> world;   // [h] 2 x M

  int steps() const { return static_cast<int>(mu.size()); }
  int points(int h) const { return static_cast<int>(dhat[h].size()); }
};

/// Run the encoder on every step of a point flow and reconstruct lambda in
/// the world frame: lambda' = -mu' G R(s_h)'.
DistanceFeatures encode(const MuEncoder& net, const PointFlow& flow, const Plan& plan,
                        const RobotShape& shape);

/// Keep the m_keep closest points per step (smallest dhat, ties to the lower
/// point index).
DistanceFeatures sort_and_select(const DistanceFeatures& features, int m_keep);

/// Versioned binary weights file.
void save_weights(const EncoderNet& net, const std::string& path);
EncoderNet load_weights(const std::string& path);

}  // namespace pointnav

#endif  // POINTNAV_ENCODER_HPP_
