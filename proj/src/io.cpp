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

#include "pointnav/io.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "pointnav/config.hpp"
#include "pointnav/errors.hpp"

namespace pointnav {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string failure_name(FailureKind kind) {
  switch (kind) {
    case FailureKind::kNone: return "none";
    case FailureKind::kCollision: return "collision";
    case FailureKind::kTimeout: return "timeout";
    case FailureKind::kPlannerError: return "planner_error";
  }
  return "unknown";
}

void write_trajectory_csv(const std::string& path, const EpisodeMetrics& metrics,
                          const std::string& turn_column, std::uint64_t config_hash) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write trajectory csv: " + path);
  char hash_hex[32];
  std::snprintf(hash_hex, sizeof(hash_hex), "%016" PRIx64, config_hash);
  out << "# config_hash=" << hash_hex << "\n";
  out << "t_s,x_m,y_m,theta_rad,v_mps," << turn_column << ",clearance_m\n";
  for (const auto& tick : metrics.trajectory) {
    out << fmt(tick.t) << ',' << fmt(tick.state.x) << ',' << fmt(tick.state.y) << ','
        << fmt(tick.state.theta) << ',' << fmt(tick.control[0]) << ',' << fmt(tick.control[1])
        << ',' << fmt(tick.min_clearance_m) << "\n";
  }
}

TrajectoryData read_trajectory_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read trajectory csv: " + path);
  TrajectoryData data;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto at = line.find("config_hash=");
      if (at != std::string::npos) {
        data.config_hash = std::stoull(line.substr(at + 12), nullptr, 16);
      }
      continue;
    }
    if (!header_seen) {  // column header
      header_seen = true;
      continue;
    }
    std::istringstream row(line);
    std::string cell;
    std::vector<double> cells;
    while (std::getline(row, cell, ',')) cells.push_back(std::stod(cell));
    if (cells.size() != 7) throw IoError("bad csv row in " + path);
    EpisodeTick tick;
    tick.t = cells[0];
    tick.state = State(cells[1], cells[2], cells[3]);
    tick.control = Control(cells[4], cells[5]);
    tick.min_clearance_m = cells[6];
    data.rows.push_back(tick);
  }
  return data;
}

RecomputedMetrics recompute_metrics(const TrajectoryData& data) {
  RecomputedMetrics out;
  if (data.rows.empty()) return out;
  out.navigation_time_s = data.rows.back().t;
  out.min_clearance_m = data.rows.front().min_clearance_m;
  for (size_t i = 0; i < data.rows.size(); ++i) {
    out.min_clearance_m = std::min(out.min_clearance_m, data.rows[i].min_clearance_m);
    if (i > 0) {
      out.path_length_m +=
          (data.rows[i].state.translation() - data.rows[i - 1].state.translation()).norm();
    }
  }
  out.average_speed_mps =
      out.navigation_time_s > 0.0 ? out.path_length_m / out.navigation_time_s : 0.0;
  return out;
}

void write_metrics_file(const std::string& path, const EpisodeMetrics& metrics,
                        std::uint64_t config_hash) {
  ConfigMap map;
  char hash_hex[32];
  std::snprintf(hash_hex, sizeof(hash_hex), "%016" PRIx64, config_hash);
  map.set("metrics.config_hash", hash_hex);
  map.set("metrics.success", metrics.success ? "true" : "false");
  map.set("metrics.failure", failure_name(metrics.failure));
  map.set("metrics.navigation_time_s", fmt(metrics.navigation_time_s));
  map.set("metrics.average_speed_mps", fmt(metrics.average_speed_mps));
  map.set("metrics.min_clearance_m", fmt(metrics.min_clearance_m));
  map.set("metrics.path_length_m", fmt(metrics.path_length_m));
  map.set("metrics.ticks", std::to_string(metrics.trajectory.size()));
  std::ofstream out(path);
  if (!out) throw IoError("cannot write metrics file: " + path);
  out << map.serialize();
}

namespace {

struct SvgMapper {
  double min_x, min_y, max_x, max_y, scale;
  double sx(double x) const { return (x - min_x) * scale + 10.0; }
  double sy(double y) const { return (max_y - y) * scale + 10.0; }
};

void svg_polyline(std::ofstream& out, const SvgMapper& map, const std::vector<Vec2>& pts,
                  const char* style, bool closed) {
  out << (closed ? "<polygon" : "<polyline") << " points=\"";
  for (const auto& p : pts) out << map.sx(p.x()) << ',' << map.sy(p.y()) << ' ';
  out << "\" " << style << "/>\n";
}

}  // namespace

void write_episode_svg(const std::string& path, const Scenario& scenario,
                       const NominalPath& nominal, const EpisodeMetrics& metrics,
                       const RobotShape& shape, std::uint64_t config_hash) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write svg: " + path);

  SvgMapper map;
  map.min_x = scenario.bounds_min.x();
  map.min_y = scenario.bounds_min.y();
  map.max_x = scenario.bounds_max.x();
  map.max_y = scenario.bounds_max.y();
  const double width = map.max_x - map.min_x, height = map.max_y - map.min_y;
  map.scale = 900.0 / std::max(width, height);
  const double w_px = width * map.scale + 20.0, h_px = height * map.scale + 20.0;

  char hash_hex[32];
  std::snprintf(hash_hex, sizeof(hash_hex), "%016" PRIx64, config_hash);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w_px << "\" height=\""
      << h_px << "\">\n";
  out << "<!-- config_hash=" << hash_hex << " -->\n";
  out << "<rect x=\"10\" y=\"10\" width=\"" << width * map.scale << "\" height=\""
      << height * map.scale << "\" fill=\"white\" stroke=\"black\"/>\n";

  for (const auto& o : scenario.obstacles) {
    if (o.kind == Obstacle::Kind::kCircle) {
      out << "<circle cx=\"" << map.sx(o.center.x()) << "\" cy=\"" << map.sy(o.center.y())
          << "\" r=\"" << o.radius * map.scale
          << "\" fill=\"#b0b0b0\" stroke=\"#505050\"/>\n";
    } else {
      svg_polyline(out, map, o.polygon, "fill=\"#b0b0b0\" stroke=\"#505050\"", true);
    }
  }

  std::vector<Vec2> nominal_pts;
  nominal_pts.reserve(nominal.states.size());
  for (const auto& s : nominal.states) nominal_pts.push_back(s.translation());
  svg_polyline(out, map, nominal_pts,
               "fill=\"none\" stroke=\"green\" stroke-dasharray=\"6,4\"", false);

  std::vector<Vec2> executed;
  executed.reserve(metrics.trajectory.size());
  for (const auto& tick : metrics.trajectory) executed.push_back(tick.state.translation());
  svg_polyline(out, map, executed, "fill=\"none\" stroke=\"#1060c0\" stroke-width=\"2\"", false);

  // robot footprint at start and end
  for (const State& pose : {scenario.start, metrics.trajectory.empty()
                                                ? scenario.start
                                                : metrics.trajectory.back().state}) {
    std::vector<Vec2> poly;
    for (const auto& v : shape.vertices) poly.push_back(body_to_world(v, pose));
    svg_polyline(out, map, poly, "fill=\"none\" stroke=\"#c02020\"", true);
  }
  out << "<circle cx=\"" << map.sx(scenario.goal.x()) << "\" cy=\"" << map.sy(scenario.goal.y())
      << "\" r=\"" << scenario.goal_radius_m * map.scale
      << "\" fill=\"none\" stroke=\"green\"/>\n";
  out << "</svg>\n";
}

std::uint64_t hash_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot hash missing file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return fnv1a(buffer.str());
}

}  // namespace pointnav
