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

#include "pointnav/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <regex>
#include <sstream>

#include "pointnav/errors.hpp"

namespace pointnav {

namespace {

std::string trim(const std::string& s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

double to_double(const std::string& key, const std::string& v) {
  try {
    size_t used = 0;
    const double out = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return out;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': not a number: '" + v + "'");
  }
}

}  // namespace

ConfigMap ConfigMap::parse_string(const std::string& text) {
  ConfigMap map;
  std::istringstream in(text);
  std::string line, section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash_at = line.find('#');
    if (hash_at != std::string::npos) line = line.substr(0, hash_at);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[' && line.back() == ']') {
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
    if (!section.empty()) key = section + "." + key;
    map.values_[key] = value;
  }
  return map;
}

ConfigMap ConfigMap::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_string(buffer.str());
}

std::string ConfigMap::get_string(const std::string& key, const std::string& fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

std::string ConfigMap::require_string(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("missing required key '" + key + "'");
  return it->second;
}

double ConfigMap::get_double(const std::string& key, double fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : to_double(key, it->second);
}

int ConfigMap::get_int(const std::string& key, int fallback) const {
  const double v = get_double(key, static_cast<double>(fallback));
  return static_cast<int>(std::llround(v));
}

std::uint64_t ConfigMap::get_u64(const std::string& key, std::uint64_t fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  try {
    return std::stoull(it->second);
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': not an unsigned integer: '" + it->second + "'");
  }
}

bool ConfigMap::get_bool(const std::string& key, bool fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  if (it->second == "true" || it->second == "1") return true;
  if (it->second == "false" || it->second == "0") return false;
  throw ConfigError("key '" + key + "': not a boolean: '" + it->second + "'");
}

std::vector<double> ConfigMap::get_doubles(const std::string& key,
                                           const std::vector<double>& fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::vector<double> out;
  std::istringstream in(it->second);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(to_double(key, item));
  }
  return out;
}

void ConfigMap::set(const std::string& key, const std::string& value) { values_[key] = value; }

void ConfigMap::set_double(const std::string& key, double value) {
  std::ostringstream out;
  out.precision(17);
  out << value;
  values_[key] = out.str();
}

std::string ConfigMap::serialize() const {
  std::ostringstream out;
  for (const auto& [key, value] : values_) out << key << " = " << value << "\n";
  return out.str();
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (const unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ull;
  }
  return hash;
}

std::uint64_t ConfigMap::hash() const { return fnv1a(serialize()); }

namespace {

const char* const kExactKeys[] = {
    "robot.shape", "robot.length_m", "robot.width_m", "robot.vertices_m",
    "robot.kinematics", "robot.wheelbase_m", "robot.dt_s",
    "robot.v_min_mps", "robot.v_max_mps", "robot.turn_abs_max",
    "planner.q_weights", "planner.p_weights", "planner.d_min_m", "planner.d_max_m",
    "planner.eta", "planner.rho1", "planner.rho2", "planner.b_k",
    "planner.m_keep", "planner.horizon_steps", "planner.engine", "planner.tol",
    "loop.max_iterations", "loop.state_tol_m", "loop.cost_tol_rel",
    "lidar.beams", "lidar.max_range_m", "lidar.span_rad", "lidar.noise_sigma_m",
    "sim.scan_cap",
    "scenario.source", "scenario.count", "scenario.file", "scenario.velocity_aware",
    "scenario.desired_speed_mps", "scenario.time_limit_s", "scenario.goal_radius_m",
    "scenario.start_x_m", "scenario.start_y_m", "scenario.start_theta_rad",
    "scenario.goal_x_m", "scenario.goal_y_m",
    "train.samples", "train.r_max_m", "train.d_interior_cap_m", "train.holdout_fraction",
    "train.epochs", "train.batch_size", "train.learning_rate",
    "train.w_mu", "train.w_d", "train.w_c", "train.seed",
    "weights.path",
    "tune.episodes", "tune.alpha", "tune.loss",
    "run.seed", "run.out_dir",
};

const std::regex kObstacleKey(
    R"(obstacle\.\d+\.(type|vertices_m|center_m|radius_m|velocity_mps))");
const std::regex kWorldKey(
    R"(world\.(bounds_min_m|bounds_max_m|obstacle_count|seed|start_m|start_theta_rad|goal_m|goal_radius_m|desired_speed_mps|time_limit_s|velocity_aware))");

}  // namespace

void ConfigMap::validate_schema() const {
  for (const auto& [key, value] : values_) {
    (void)value;
    const bool exact =
        std::any_of(std::begin(kExactKeys), std::end(kExactKeys),
                    [&](const char* k) { return key == k; });
    if (exact) continue;
    if (std::regex_match(key, kObstacleKey) || std::regex_match(key, kWorldKey)) continue;
    throw ConfigError("unknown config key '" + key + "'");
  }
}

RunConfig load_run_config(const ConfigMap& map) {
  map.validate_schema();
  RunConfig cfg;
  cfg.config_hash = map.hash();

  const std::string shape_kind = map.get_string("robot.shape", "rectangle");
  if (shape_kind == "rectangle") {
    cfg.shape = make_rectangle(map.get_double("robot.length_m", 0.8),
                               map.get_double("robot.width_m", 0.5));
  } else if (shape_kind == "polygon") {
    const auto flat = map.get_doubles("robot.vertices_m", {});
    if (flat.size() < 6 || flat.size() % 2 != 0) {
      throw ConfigError("robot.vertices_m needs at least 3 x,y pairs");
    }
    std::vector<Vec2> vertices;
    for (size_t i = 0; i + 1 < flat.size(); i += 2) vertices.emplace_back(flat[i], flat[i + 1]);
    cfg.shape = make_polygon(vertices);
  } else {
    throw ConfigError("robot.shape must be rectangle or polygon");
  }

  const double dt = map.get_double("robot.dt_s", 0.2);
  const double v_min = map.get_double("robot.v_min_mps", -4.0);
  const double v_max = map.get_double("robot.v_max_mps", 4.0);
  const double turn = map.get_double("robot.turn_abs_max", 3.14);
  const std::string kin = map.get_string("robot.kinematics", "differential");
  if (kin == "differential") {
    cfg.model = KinematicModel::differential(dt, Control(v_min, -turn), Control(v_max, turn));
  } else if (kin == "ackermann") {
    cfg.model = KinematicModel::ackermann(map.get_double("robot.wheelbase_m", 0.6), dt,
                                          Control(v_min, -turn), Control(v_max, turn));
  } else {
    throw ConfigError("robot.kinematics must be differential or ackermann");
  }

  const auto q = map.get_doubles("planner.q_weights", {1.0, 1.0, 0.2});
  const auto p = map.get_doubles("planner.p_weights", {0.2, 0.2});
  if (q.size() != 3) throw ConfigError("planner.q_weights needs 3 values");
  if (p.size() != 2) throw ConfigError("planner.p_weights needs 2 values");
  cfg.params.q = Eigen::Vector3d(q[0], q[1], q[2]);
  cfg.params.p = Eigen::Vector2d(p[0], p[1]);
  cfg.params.d_min_m = map.get_double("planner.d_min_m", 0.1);
  cfg.params.d_max_m = map.get_double("planner.d_max_m", 1.0);
  cfg.params.eta = map.get_double("planner.eta", 1.0);
  cfg.params.rho1 = map.get_double("planner.rho1", 100.0);
  cfg.params.rho2 = map.get_double("planner.rho2", 0.0);
  cfg.params.b_k = map.get_double("planner.b_k", 1.0);
  cfg.params.m_keep = map.get_int("planner.m_keep", 100);
  cfg.params.horizon = map.get_int("planner.horizon_steps", 10);
  cfg.params.validate();

  const std::string engine = map.get_string("planner.engine", "prox");
  if (engine == "prox") {
    cfg.solver.engine = SolverEngine::kProxGradient;
  } else if (engine == "admm") {
    cfg.solver.engine = SolverEngine::kAdmmSlackQp;
  } else {
    throw ConfigError("planner.engine must be prox or admm");
  }
  cfg.solver.tol = map.get_double("planner.tol", 1e-6);

  cfg.loop.max_iterations = map.get_int("loop.max_iterations", 3);
  cfg.loop.state_tol_m = map.get_double("loop.state_tol_m", 1e-3);
  cfg.loop.cost_tol_rel = map.get_double("loop.cost_tol_rel", 1e-4);

  cfg.lidar.beam_count = map.get_int("lidar.beams", 100);
  cfg.lidar.max_range_m = map.get_double("lidar.max_range_m", 8.0);
  cfg.lidar.span_rad = map.get_double("lidar.span_rad", 2.0 * M_PI);
  cfg.lidar.noise_sigma_m = map.get_double("lidar.noise_sigma_m", 0.0);
  cfg.scan_cap = map.get_int("sim.scan_cap", 100);

  cfg.train.sample_count = map.get_int("train.samples", 50000);
  cfg.train.r_max_m = map.get_double("train.r_max_m", 16.0);
  cfg.train.d_interior_cap_m = map.get_double("train.d_interior_cap_m", 0.25);
  cfg.train.holdout_fraction = map.get_double("train.holdout_fraction", 0.1);
  cfg.train.epochs = map.get_int("train.epochs", 60);
  cfg.train.batch_size = map.get_int("train.batch_size", 256);
  cfg.train.learning_rate = map.get_double("train.learning_rate", 1e-3);
  cfg.train.w_mu = map.get_double("train.w_mu", 1.0);
  cfg.train.w_d = map.get_double("train.w_d", 2.0);
  cfg.train.w_c = map.get_double("train.w_c", 0.5);
  cfg.train.seed = map.get_u64("train.seed", 1);
  if (cfg.train.r_max_m < cfg.lidar.max_range_m) {
    throw ConfigError("train.r_max_m must be at least lidar.max_range_m");
  }
  cfg.weights_path = map.get_string("weights.path", "");

  cfg.scenario_source = map.get_string("scenario.source", "empty");
  cfg.obstacle_count = map.get_int("scenario.count", 11);
  cfg.scenario_file = map.get_string("scenario.file", "");
  cfg.velocity_aware = map.get_bool("scenario.velocity_aware", false);
  cfg.desired_speed_mps = map.get_double("scenario.desired_speed_mps", 4.0);
  cfg.time_limit_s = map.get_double("scenario.time_limit_s", 60.0);
  cfg.goal_radius_m = map.get_double("scenario.goal_radius_m", 1.0);
  if (map.has("scenario.start_x_m") || map.has("scenario.start_y_m")) {
    cfg.start_override = State(map.get_double("scenario.start_x_m", -1.0),
                               map.get_double("scenario.start_y_m", 25.0),
                               map.get_double("scenario.start_theta_rad", 0.0));
  }
  if (map.has("scenario.goal_x_m") || map.has("scenario.goal_y_m")) {
    cfg.goal_override = Vec2(map.get_double("scenario.goal_x_m", 50.0),
                             map.get_double("scenario.goal_y_m", 25.0));
  }

  cfg.seed = map.get_u64("run.seed", 1);
  cfg.out_dir = map.get_string("run.out_dir", "out");
  return cfg;
}

Scenario RunConfig::make_scenario(std::uint64_t episode_seed) const {
  Scenario sc;
  if (scenario_source == "file") {
    if (scenario_file.empty()) throw ConfigError("scenario.source=file needs scenario.file");
    sc = load_scenario_file(scenario_file);
  } else if (scenario_source == "empty") {
    sc = Scenario{};
    sc.obstacles.clear();
  } else {
    ScenarioKind kind;
    if (scenario_source == "convex") {
      kind = ScenarioKind::kConvex;
    } else if (scenario_source == "nonconvex") {
      kind = ScenarioKind::kNonconvex;
    } else if (scenario_source == "dynamic") {
      kind = ScenarioKind::kDynamic;
    } else {
      throw ConfigError("scenario.source must be empty, convex, nonconvex, dynamic, or file");
    }
    sc = generate_random_scenario(episode_seed, kind, obstacle_count);
  }
  sc.seed = episode_seed;
  sc.velocity_aware = velocity_aware;
  sc.desired_speed_mps = desired_speed_mps;
  sc.time_limit_s = time_limit_s;
  sc.goal_radius_m = goal_radius_m;
  if (start_override) sc.start = *start_override;
  if (goal_override) sc.goal = *goal_override;
  return sc;
}

PlannerStack RunConfig::make_stack(const MuEncoder& encoder) const {
  PlannerStack stack;
  stack.encoder = &encoder;
  stack.shape = shape;
  stack.model = model;
  stack.params = params;
  stack.loop = loop;
  stack.lidar = lidar;
  stack.solver = solver;
  stack.scan_cap = scan_cap;
  return stack;
}

Scenario load_scenario_file(const std::string& path) {
  const ConfigMap map = ConfigMap::parse_file(path);
  map.validate_schema();
  Scenario sc;
  const auto bmin = map.get_doubles("world.bounds_min_m", {-5.0, 0.0});
  const auto bmax = map.get_doubles("world.bounds_max_m", {55.0, 50.0});
  if (bmin.size() != 2 || bmax.size() != 2) throw ConfigError("world bounds need 2 values");
  sc.bounds_min = Vec2(bmin[0], bmin[1]);
  sc.bounds_max = Vec2(bmax[0], bmax[1]);
  const auto start = map.get_doubles("world.start_m", {-1.0, 25.0});
  sc.start = State(start[0], start[1], map.get_double("world.start_theta_rad", 0.0));
  const auto goal = map.get_doubles("world.goal_m", {50.0, 25.0});
  sc.goal = Vec2(goal[0], goal[1]);
  sc.goal_radius_m = map.get_double("world.goal_radius_m", 1.0);
  sc.desired_speed_mps = map.get_double("world.desired_speed_mps", 4.0);
  sc.time_limit_s = map.get_double("world.time_limit_s", 60.0);
  sc.seed = map.get_u64("world.seed", 0);
  sc.velocity_aware = map.get_bool("world.velocity_aware", false);

  const int count = map.get_int("world.obstacle_count", 0);
  for (int i = 0; i < count; ++i) {
    const std::string base = "obstacle." + std::to_string(i) + ".";
    const std::string type = map.get_string(base + "type", "polygon");
    const auto vel = map.get_doubles(base + "velocity_mps", {0.0, 0.0});
    if (vel.size() != 2) throw ConfigError(base + "velocity_mps needs 2 values");
    if (type == "circle") {
      const auto c = map.get_doubles(base + "center_m", {});
      if (c.size() != 2) throw ConfigError(base + "center_m needs 2 values");
      sc.obstacles.push_back(Obstacle::make_circle(Vec2(c[0], c[1]),
                                                   map.get_double(base + "radius_m", 0.5),
                                                   Vec2(vel[0], vel[1])));
    } else if (type == "polygon") {
      const auto flat = map.get_doubles(base + "vertices_m", {});
      if (flat.size() < 6 || flat.size() % 2 != 0) {
        throw ConfigError(base + "vertices_m needs at least 3 x,y pairs");
      }
      std::vector<Vec2> vertices;
      for (size_t k = 0; k + 1 < flat.size(); k += 2) {
        vertices.emplace_back(flat[k], flat[k + 1]);
      }
      sc.obstacles.push_back(Obstacle::make_polygon(vertices, Vec2(vel[0], vel[1])));
    } else {
      throw ConfigError(base + "type must be polygon or circle");
    }
  }
  return sc;
}

void save_scenario_file(const Scenario& scenario, const std::string& path) {
  ConfigMap map;
  auto pair = [](const Vec2& v) {
    std::ostringstream out;
    out.precision(17);
    out << v.x() << ", " << v.y();
    return out.str();
  };
  map.set("world.bounds_min_m", pair(scenario.bounds_min));
  map.set("world.bounds_max_m", pair(scenario.bounds_max));
  map.set("world.start_m", pair(scenario.start.translation()));
  map.set_double("world.start_theta_rad", scenario.start.theta);
  map.set("world.goal_m", pair(scenario.goal));
  map.set_double("world.goal_radius_m", scenario.goal_radius_m);
  map.set_double("world.desired_speed_mps", scenario.desired_speed_mps);
  map.set_double("world.time_limit_s", scenario.time_limit_s);
  map.set("world.seed", std::to_string(scenario.seed));
  map.set("world.velocity_aware", scenario.velocity_aware ? "true" : "false");
  map.set("world.obstacle_count", std::to_string(scenario.obstacles.size()));
  for (size_t i = 0; i < scenario.obstacles.size(); ++i) {
    const auto& o = scenario.obstacles[i];
    const std::string base = "obstacle." + std::to_string(i) + ".";
    map.set(base + "velocity_mps", pair(o.velocity));
    if (o.kind == Obstacle::Kind::kCircle) {
      map.set(base + "type", "circle");
      map.set(base + "center_m", pair(o.center));
      map.set_double(base + "radius_m", o.radius);
    } else {
      map.set(base + "type", "polygon");
      std::ostringstream out;
      out.precision(17);
      for (size_t k = 0; k < o.polygon.size(); ++k) {
        if (k) out << ", ";
        out << o.polygon[k].x() << ", " << o.polygon[k].y();
      }
      map.set(base + "vertices_m", out.str());
    }
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot write scenario file: " + path);
  out << map.serialize();
}

}  // namespace pointnav
