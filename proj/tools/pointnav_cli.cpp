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

#include <chrono>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "pointnav/config.hpp"
#include "pointnav/errors.hpp"
#include "pointnav/io.hpp"
#include "pointnav/tuning.hpp"

namespace fs = std::filesystem;
using namespace pointnav;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitTrainingDiverged = 3;
constexpr int kExitEpisodeFailure = 4;

std::string hash_hex(std::uint64_t h) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016" PRIx64, h);
  return buf;
}

RunConfig load_config_or_die(const std::string& path) {
  return load_run_config(ConfigMap::parse_file(path));
}

EncoderNet load_encoder_for(const RunConfig& cfg) {
  if (cfg.weights_path.empty()) {
    throw ConfigError("weights.path is not set; train an encoder first");
  }
  EncoderNet net = load_weights(cfg.weights_path);
  if (net.output_dim() != cfg.shape.l) {
    throw ConfigError("weights file encodes " + std::to_string(net.output_dim()) +
                      " edges but the configured robot shape has " +
                      std::to_string(cfg.shape.l));
  }
  return net;
}

struct LinearFit {
  double slope = 0.0, intercept = 0.0, r2 = 0.0;
};

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const int n = static_cast<int>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  LinearFit fit;
  const double denom = n * sxx - sx * sx;
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  double ss_res = 0, ss_tot = 0;
  const double mean_y = sy / n;
  for (int i = 0; i < n; ++i) {
    const double pred = fit.slope * x[i] + fit.intercept;
    ss_res += (y[i] - pred) * (y[i] - pred);
    ss_tot += (y[i] - mean_y) * (y[i] - mean_y);
  }
  fit.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

int cmd_train(const std::string& config_path, const std::string& out_override) {
  const RunConfig cfg = load_config_or_die(config_path);
  const std::string weights_path =
      out_override.empty() ? (cfg.weights_path.empty() ? "encoder.weights" : cfg.weights_path)
                           : out_override;

  std::printf("sampling %d labeled points (r_max %.2f m)...\n", cfg.train.sample_count,
              cfg.train.r_max_m);
  const Dataset data = sample_training_set(cfg.shape, cfg.train);
  EncoderNet net(cfg.shape.l, cfg.train.r_max_m, cfg.train.seed);

  const auto t0 = std::chrono::steady_clock::now();
  const TrainReport report = train(net, data, cfg.shape, cfg.train);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  save_weights(net, weights_path);

  std::ofstream rep(weights_path + ".report.txt");
  rep << "config_hash = " << hash_hex(cfg.config_hash) << "\n";
  rep << "train_samples = " << report.train_count << "\n";
  rep << "holdout_samples = " << report.holdout_count << "\n";
  rep << "epochs = " << report.epoch_loss.size() << "\n";
  if (!report.epoch_loss.empty()) {
    rep << "first_epoch_loss = " << report.epoch_loss.front() << "\n";
    rep << "last_epoch_loss = " << report.epoch_loss.back() << "\n";
  }
  rep << "holdout_mean_abs_d_err_m = " << report.holdout.mean_abs << "\n";
  rep << "holdout_p99_abs_d_err_m = " << report.holdout.p99_abs << "\n";
  rep << "holdout_max_abs_d_err_m = " << report.holdout.max_abs << "\n";
  rep << "train_seconds = " << secs << "\n";

  std::printf("trained %zu epochs in %.1f s; holdout mean |d_err| = %.4f m, p99 = %.4f m\n",
              report.epoch_loss.size(), secs, report.holdout.mean_abs, report.holdout.p99_abs);
  std::printf("weights written to %s (hash %s)\n", weights_path.c_str(),
              hash_hex(hash_file(weights_path)).c_str());
  return kExitOk;
}

EpisodeMetrics run_one(const RunConfig& cfg, const EncoderNet& net, std::uint64_t seed) {
  const Scenario scenario = cfg.make_scenario(seed);
  const PlannerStack stack = cfg.make_stack(net);
  return run_episode(scenario, stack, 1.0 / cfg.model.dt);
}

void write_episode_outputs(const RunConfig& cfg, const EncoderNet& net, std::uint64_t seed,
                           const EpisodeMetrics& metrics, const std::string& dir) {
  fs::create_directories(dir);
  const Scenario scenario = cfg.make_scenario(seed);
  const std::string base = dir + "/episode_" + std::to_string(seed);
  const std::string turn_col =
      cfg.model.kind == ModelKind::kAckermann ? "steer_rad" : "omega_radps";
  write_trajectory_csv(base + ".csv", metrics, turn_col, cfg.config_hash);
  write_metrics_file(base + ".metrics", metrics, cfg.config_hash);
  const NominalPath nominal = straight_path(scenario.start.translation(), scenario.goal,
                                            scenario.desired_speed_mps, cfg.model.dt);
  write_episode_svg(base + ".svg", scenario, nominal, metrics, cfg.shape, cfg.config_hash);
  (void)net;
}

int cmd_run(const std::string& config_path, std::uint64_t seed, const std::string& seeds_range,
            const std::string& out_dir, bool strict) {
  const RunConfig cfg = load_config_or_die(config_path);
  const EncoderNet net = load_encoder_for(cfg);
  const std::string dir = out_dir.empty() ? cfg.out_dir : out_dir;

  std::vector<std::uint64_t> seeds;
  if (!seeds_range.empty()) {
    const auto dots = seeds_range.find("..");
    if (dots == std::string::npos) throw ConfigError("--seeds expects A..B");
    const std::uint64_t a = std::stoull(seeds_range.substr(0, dots));
    const std::uint64_t b = std::stoull(seeds_range.substr(dots + 2));
    if (b < a) throw ConfigError("--seeds range is empty");
    for (std::uint64_t s = a; s <= b; ++s) seeds.push_back(s);
  } else {
    seeds.push_back(seed ? seed : cfg.seed);
  }

  // bounded worker pool; per-episode results are independent and seed-keyed
  const int workers =
      std::max(1, std::min<int>(static_cast<int>(std::thread::hardware_concurrency()),
                                static_cast<int>(seeds.size())));
  std::vector<EpisodeMetrics> results(seeds.size());
  std::atomic<size_t> next{0};
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (size_t i = next.fetch_add(1); i < seeds.size(); i = next.fetch_add(1)) {
        results[i] = run_one(cfg, net, seeds[i]);
      }
    });
  }
  for (auto& th : pool) th.join();

  int successes = 0;
  double time_sum = 0.0, speed_sum = 0.0;
  for (size_t i = 0; i < seeds.size(); ++i) {
    write_episode_outputs(cfg, net, seeds[i], results[i], dir);
    successes += results[i].success ? 1 : 0;
    if (results[i].success) {
      time_sum += results[i].navigation_time_s;
      speed_sum += results[i].average_speed_mps;
    }
    std::printf("seed %" PRIu64 ": %s  time %.2f s  avg speed %.2f m/s  min clearance %.3f m\n",
                seeds[i], results[i].success ? "success" : failure_name(results[i].failure).c_str(),
                results[i].navigation_time_s, results[i].average_speed_mps,
                results[i].min_clearance_m);
  }
  if (seeds.size() > 1) {
    const double rate = 100.0 * successes / static_cast<double>(seeds.size());
    std::printf("aggregate: %d/%zu success (%.1f%%)", successes, seeds.size(), rate);
    if (successes > 0) {
      std::printf("  mean time %.2f s  mean speed %.2f m/s", time_sum / successes,
                  speed_sum / successes);
    }
    std::printf("\n");
    std::ofstream agg(dir + "/sweep_summary.txt");
    agg << "config_hash = " << hash_hex(cfg.config_hash) << "\n";
    agg << "episodes = " << seeds.size() << "\n";
    agg << "successes = " << successes << "\n";
    agg << "success_rate = " << rate << "\n";
  }
  if (strict && successes < static_cast<int>(seeds.size())) return kExitEpisodeFailure;
  return kExitOk;
}

int cmd_bench(const std::string& config_path, const std::string& mode) {
  const RunConfig cfg = load_config_or_die(config_path);

  EncoderNet net = [&] {
    if (!cfg.weights_path.empty() && fs::exists(cfg.weights_path)) {
      return load_encoder_for(cfg);
    }
    std::printf("no weights file; training a small encoder for the benchmark...\n");
    TrainConfig quick = cfg.train;
    quick.sample_count = 5000;
    quick.epochs = 10;
    EncoderNet fresh(cfg.shape.l, quick.r_max_m, quick.seed);
    const Dataset data = sample_training_set(cfg.shape, quick);
    train(fresh, data, cfg.shape, quick);
    return fresh;
  }();

  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unit(-cfg.train.r_max_m, cfg.train.r_max_m);

  std::vector<double> sizes, times;
  if (mode == "distance-scaling") {
    std::printf("%10s %12s\n", "M", "encode_ms");
    for (const int m : {1000, 10000, 100000}) {
      Eigen::Matrix2Xd pts(2, m);
      for (int i = 0; i < m; ++i) pts.col(i) = Vec2(unit(rng), unit(rng));
      Plan still;
      still.states.emplace_back(0.0, 0.0, 0.0);
      const PointFlow flow = build_point_flow(pts, {}, still, cfg.model.dt);
      double best = 1e300;
      for (int rep = 0; rep < 3; ++rep) {
        const auto t0 = std::chrono::steady_clock::now();
        const DistanceFeatures f = encode(net, flow, still, cfg.shape);
        best = std::min(best, std::chrono::duration<double, std::milli>(
                                  std::chrono::steady_clock::now() - t0).count());
        (void)f;
      }
      std::printf("%10d %12.3f\n", m, best);
      sizes.push_back(m);
      times.push_back(best);
    }
  } else if (mode == "pan-latency") {
    std::printf("%10s %16s\n", "M", "per_iter_ms");
    for (const int m : {100, 1000, 10000}) {
      Eigen::Matrix2Xd pts(2, m);
      for (int i = 0; i < m; ++i) {
        const double ang = 2.0 * M_PI * i / m;
        const double r = 3.0 + 2.0 * std::cos(3.0 * ang);
        pts.col(i) = Vec2(r * std::cos(ang), r * std::sin(ang) + 25.0 - 0.0);
      }
      ScanPoints scan;
      scan.points = pts;
      scan.velocities = Eigen::Matrix2Xd::Zero(2, m);
      const NominalPath path = straight_path(Vec2(-1.0, 25.0), Vec2(50.0, 25.0),
                                             cfg.desired_speed_mps, cfg.model.dt);
      PlannerParams params = cfg.params;
      params.m_keep = std::min(params.m_keep, 100);
      LoopConfig loop = cfg.loop;
      loop.state_tol_m = 0.0;  // force the full iteration budget
      loop.cost_tol_rel = -1.0;
      double best = 1e300;
      for (int rep = 0; rep < 3; ++rep) {
        PlannerBackend backend(cfg.solver);
        const auto t0 = std::chrono::steady_clock::now();
        const LoopResult result = plan_once(State(-1.0, 25.0, 0.0), scan, path, net, cfg.shape,
                                            cfg.model, params, loop, backend);
        const double ms = std::chrono::duration<double, std::milli>(
                              std::chrono::steady_clock::now() - t0).count();
        best = std::min(best, ms / std::max(result.iterations, 1));
      }
      std::printf("%10d %16.3f\n", m, best);
      sizes.push_back(m);
      times.push_back(best);
    }
  } else {
    throw ConfigError("--mode must be distance-scaling or pan-latency");
  }
  const LinearFit fit = fit_line(sizes, times);
  std::printf("linear fit: time_ms = %.3e * M + %.3f   R^2 = %.4f\n", fit.slope, fit.intercept,
              fit.r2);
  return kExitOk;
}

int cmd_tune(const std::string& config_path, int episodes, const std::string& out_dir) {
  const RunConfig cfg = load_config_or_die(config_path);
  const EncoderNet net = load_encoder_for(cfg);
  const std::string dir = out_dir.empty() ? cfg.out_dir : out_dir;
  fs::create_directories(dir);
  const std::string params_path = dir + "/tuned_params.cfg";
  const std::string curve_path = dir + "/loss_curve.csv";

  TunableParams initial;
  initial.d_min_m = cfg.params.d_min_m;
  initial.d_max_m = cfg.params.d_max_m;
  initial.eta = cfg.params.eta;
  if (fs::exists(params_path)) {  // resume from the last persisted step
    const ConfigMap persisted = ConfigMap::parse_file(params_path);
    initial.q_gain = persisted.get_double("tuned.q_gain", initial.q_gain);
    initial.p_gain = persisted.get_double("tuned.p_gain", initial.p_gain);
    initial.d_min_m = persisted.get_double("tuned.d_min_m", initial.d_min_m);
    initial.d_max_m = persisted.get_double("tuned.d_max_m", initial.d_max_m);
    initial.eta = persisted.get_double("tuned.eta", initial.eta);
    std::printf("resuming from %s\n", params_path.c_str());
  }

  const Scenario scenario = cfg.make_scenario(cfg.seed);
  const PlannerStack stack = cfg.make_stack(net);
  LonOptions options;

  std::ofstream curve(curve_path, fs::exists(params_path) ? std::ios::app : std::ios::out);
  auto persist = [&](int ep, const TuneResult& r) {
    ConfigMap map;
    map.set_double("tuned.q_gain", r.params.q_gain);
    map.set_double("tuned.p_gain", r.params.p_gain);
    map.set_double("tuned.d_min_m", r.params.d_min_m);
    map.set_double("tuned.d_max_m", r.params.d_max_m);
    map.set_double("tuned.eta", r.params.eta);
    std::ofstream out(params_path);
    out << map.serialize();
    curve << ep << ',' << r.loss_curve.back() << ',' << (r.successes.back() ? 1 : 0) << "\n";
    curve.flush();
    std::printf("episode %d: loss %.4f %s\n", ep, r.loss_curve.back(),
                r.successes.back() ? "(success)" : "(failure)");
  };

  const TuneResult result =
      tune_params(scenario, stack, initial, episodes, options, LossCombo::kAuto, persist);
  if (!result.loss_curve.empty()) {
    std::printf("initial loss %.4f, final loss %.4f over %zu episodes\n",
                result.loss_curve.front(), result.loss_curve.back(), result.loss_curve.size());
  }
  return kExitOk;
}

int cmd_verify(const std::string& csv_path, const std::string& metrics_path) {
  const TrajectoryData data = read_trajectory_csv(csv_path);
  const RecomputedMetrics re = recompute_metrics(data);
  const ConfigMap metrics = ConfigMap::parse_file(metrics_path);

  const double tol = 1e-9;
  bool ok = true;
  auto check = [&](const char* key, double expected) {
    const double stored = metrics.get_double(key, std::nan(""));
    const bool match = std::abs(stored - expected) <= tol * std::max(1.0, std::abs(expected));
    std::printf("%-32s stored %.12g recomputed %.12g  %s\n", key, stored, expected,
                match ? "ok" : "MISMATCH");
    ok = ok && match;
  };
  check("metrics.navigation_time_s", re.navigation_time_s);
  check("metrics.path_length_m", re.path_length_m);
  check("metrics.average_speed_mps", re.average_speed_mps);
  check("metrics.min_clearance_m", re.min_clearance_m);
  return ok ? kExitOk : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"point-cloud-in, action-out navigation stack"};
  app.require_subcommand(1);

  std::string config_path, out, seeds_range, mode = "distance-scaling";
  std::string csv_path, metrics_path;
  std::uint64_t seed = 0;
  int episodes = 60;
  bool strict = false;

  auto* train_cmd = app.add_subcommand("train", "train the distance-feature encoder");
  train_cmd->add_option("--config", config_path)->required();
  train_cmd->add_option("--out", out);

  auto* run_cmd = app.add_subcommand("run", "run one episode or a seed sweep");
  run_cmd->add_option("--config", config_path)->required();
  run_cmd->add_option("--seed", seed);
  run_cmd->add_option("--seeds", seeds_range, "inclusive range A..B");
  run_cmd->add_option("--out", out);
  run_cmd->add_flag("--strict", strict, "exit 4 unless every episode succeeds");

  auto* bench_cmd = app.add_subcommand("bench", "scaling benchmarks");
  bench_cmd->add_option("--config", config_path)->required();
  bench_cmd->add_option("--mode", mode, "distance-scaling | pan-latency");

  auto* tune_cmd = app.add_subcommand("tune", "fine-tune planner weights from failures");
  tune_cmd->add_option("--config", config_path)->required();
  tune_cmd->add_option("--episodes", episodes);
  tune_cmd->add_option("--out", out);

  auto* verify_cmd = app.add_subcommand("verify", "recompute metrics from a trajectory CSV");
  verify_cmd->add_option("--csv", csv_path)->required();
  verify_cmd->add_option("--metrics", metrics_path)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (train_cmd->parsed()) return cmd_train(config_path, out);
    if (run_cmd->parsed()) return cmd_run(config_path, seed, seeds_range, out, strict);
    if (bench_cmd->parsed()) return cmd_bench(config_path, mode);
    if (tune_cmd->parsed()) return cmd_tune(config_path, episodes, out);
    if (verify_cmd->parsed()) return cmd_verify(csv_path, metrics_path);
  } catch (const TrainingDiverged& err) {
    std::fprintf(stderr, "training diverged: %s\n", err.what());
    return kExitTrainingDiverged;
  } catch (const ConfigError& err) {
    std::fprintf(stderr, "config error: %s\n", err.what());
    return kExitConfig;
  } catch (const IoError& err) {
    std::fprintf(stderr, "io error: %s\n", err.what());
    return kExitConfig;
  } catch (const std::exception& err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return 1;
  }
  return kExitOk;
}
