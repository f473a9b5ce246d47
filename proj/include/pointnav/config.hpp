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

#ifndef POINTNAV_CONFIG_HPP_
#define POINTNAV_CONFIG_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pointnav/sim.hpp"

namespace pointnav {

// Flat dotted-key configuration text. One `key = value` per line, `#`
// comments, optional `[section]` headers that prefix the keys that follow.
// Keys carry their unit as a suffix (dt_s, d_min_m, ...) so that unit
// mistakes are visible at the call site.

class ConfigMap {
 public:
  static ConfigMap parse_string(const std::string& text);
  static ConfigMap parse_file(const std::string& path);

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  std::string get_string(const std::string& key, const std::string& fallback) const;
  std::string require_string(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_doubles(const std::string& key,
                                  const std::vector<double>& fallback) const;

  void set(const std::string& key, const std::string& value);
  void set_double(const std::string& key, double value);

  /// Canonical text: sorted keys, one per line.
  std::string serialize() const;
  /// FNV-1a over the canonical text.
  std::uint64_t hash() const;

  /// Throws ConfigError naming the first key outside the known schema.
  void validate_schema() const;

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

/// Fully resolved operator configuration.
struct RunConfig {
  RobotShape shape;
  KinematicModel model;
  PlannerParams params;
  LoopConfig loop;
  LidarModel lidar;
  SolverOptions solver;
  int scan_cap = 100;
  TrainConfig train;
  std::string weights_path;

  // scenario source: generator kind + count, explicit file, or empty world
  std::string scenario_source = "empty";  // empty | convex | nonconvex | dynamic | file
  int obstacle_count = 11;
  std::string scenario_file;
  bool velocity_aware = false;
  double desired_speed_mps = 4.0;
  double time_limit_s = 60.0;
  double goal_radius_m = 1.0;
  std::optional<State> start_override;
  std::optional<Vec2> goal_override;

  std::uint64_t seed = 1;
  std::string out_dir = "out";

  std::uint64_t config_hash = 0;

  /// Instantiate the scenario for a specific episode seed.
  Scenario make_scenario(std::uint64_t episode_seed) const;
  PlannerStack make_stack(const MuEncoder& encoder) const;
};

RunConfig load_run_config(const ConfigMap& map);

/// Scenario files reuse the same text format.
Scenario load_scenario_file(const std::string& path);
void save_scenario_file(const Scenario& scenario, const std::string& path);

std::uint64_t fnv1a(const std::string& bytes);

}  // namespace pointnav

#endif  // POINTNAV_CONFIG_HPP_
