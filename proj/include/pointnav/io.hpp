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

#ifndef POINTNAV_IO_HPP_
#define POINTNAV_IO_HPP_

#include <cstdint>
#include <string>

#include "pointnav/navigator.hpp"
#include "pointnav/sim.hpp"

namespace pointnav {

/// Trajectory CSV: header comment with the config hash, one row per control
/// tick plus a terminal row. Columns:
///   t_s, x_m, y_m, theta_rad, v_mps, <turn-column>, clearance_m
void write_trajectory_csv(const std::string& path, const EpisodeMetrics& metrics,
                          const std::string& turn_column, std::uint64_t config_hash);

struct TrajectoryData {
  std::vector<EpisodeTick> rows;
  std::uint64_t config_hash = 0;
};

TrajectoryData read_trajectory_csv(const std::string& path);

/// Metrics recomputed from CSV rows alone; must match the episode's values.
struct RecomputedMetrics {
  double navigation_time_s = 0.0;
  double path_length_m = 0.0;
  double average_speed_mps = 0.0;
  double min_clearance_m = 0.0;
};

RecomputedMetrics recompute_metrics(const TrajectoryData& data);

void write_metrics_file(const std::string& path, const EpisodeMetrics& metrics,
                        std::uint64_t config_hash);

/// Obstacles, nominal path, and the executed trajectory as a standalone SVG.
void write_episode_svg(const std::string& path, const Scenario& scenario,
                       const NominalPath& nominal, const EpisodeMetrics& metrics,
                       const RobotShape& shape, std::uint64_t config_hash);

std::uint64_t hash_file(const std::string& path);

std::string failure_name(FailureKind kind);

}  // namespace pointnav

#endif  // POINTNAV_IO_HPP_
