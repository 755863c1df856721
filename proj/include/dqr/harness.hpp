// Copyright 2026 The dqrecover Authors
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

// Wall-impact experiments.
//
// The body hovers at the reference pose, a wall stands `standoff` metres away
// along +x (plane normal −e_x), and the body is launched at `impact_speed`
// toward an aim point on the wall. Until the first impact both controllers
// fly the same open-loop feed-forward, so the impact state is identical and
// only the recovery differs. Metrics are taken from the first impact onward
// against the hover reference.

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "dqr/hybridsim.hpp"

namespace dqr {

struct ScenarioParams {
  double mass = 1.0;
  Vec3 inertia{0.0082, 0.0082, 0.0149};  // principal moments
  double gravity = 9.81;
  double arm = 0.17;
  double arm_height = 0.03;
  double below = 0.05;
  bool sphere = false;
  double sphere_radius = 0.1;
  double standoff = 0.35;
  double impact_speed = 2.0;
  double approach_angle = 20.0;  // deg off the wall normal, in the wall's horizontal direction
  double yaw = 45.0;             // deg; 45 puts one arm tip ahead
};

struct ExperimentConfig {
  std::string scenario = "wall";
  ScenarioParams scenario_params{};
  ContactParams contact{};
  ControllerConfig controller{};
  SimConfig sim{};
  ImpulseModel impulse = ImpulseModel::kDecoupled;
  int trials = 20;
  std::uint64_t seed = 1;
  double jitter = 0.2;         // m, half-width of the uniform start-position jitter in the wall plane
  bool random_yaw = true;      // Monte Carlo: yaw uniform in [0, 360) deg
  double settle_threshold = 0.05;
  double settle_dwell = 1.0;
  int threads = 0;             // 0: hardware concurrency

  void validate() const;
};

struct Metrics {
  double peak_l2 = 0.0;
  double rmse_l2 = 0.0;
  double peak_ek = 0.0;
  double settling = 0.0;
  bool settled = false;
  bool failed = false;
};

struct InitialCondition {
  Vec3 offset = Vec3::Zero();  // start position relative to the hover reference
  double yaw = 0.0;            // deg
};

/// Builds the episode for one initial condition and controller kind.
EpisodeConfig build_episode(const ExperimentConfig& cfg, const InitialCondition& ic, ControllerKind kind);

/// Metrics over samples with t ≥ t_start. Throws std::invalid_argument when
/// the window holds no samples. Settling time is measured from t_start; when
/// the error never settles it is the window length and settled = false.
Metrics compute_metrics(const EpisodeLog& log, const Vec3& hover_position, double t_start,
                        double settle_threshold = 0.05, double settle_dwell = 1.0);

/// As above, restricted to samples with jump counter ≥ min_j.
Metrics compute_metrics(const EpisodeLog& log, const Vec3& hover_position, double t_start,
                        double settle_threshold, double settle_dwell, int min_j);

/// Metrics from the first impact (or the episode start if none).
Metrics episode_metrics(const EpisodeLog& log, const EpisodeConfig& episode, const ExperimentConfig& cfg);

struct TrialResult {
  int trial = 0;
  std::string controller;
  InitialCondition ic;
  Metrics metrics;
};

struct Aggregate {
  double mean = 0.0;
  double stddev = 0.0;
};

struct MonteCarloSummary {
  std::vector<TrialResult> trials;  // sorted by (trial, controller)
  Aggregate dq[4];                  // peak_l2, rmse_l2, peak_ek, settling
  Aggregate baseline[4];
  double improvement[4] = {0.0, 0.0, 0.0, 0.0};  // (baseline − dq)/baseline × 100
  int failed = 0;
};

inline constexpr const char* kMetricNames[4] = {"peak_l2_m", "rmse_l2_m", "peak_ek_J", "settling_s"};

std::vector<InitialCondition> sample_initial_conditions(const ExperimentConfig& cfg);

/// Runs every initial condition under both controllers, in parallel; the
/// result is independent of the thread count. `second` overrides the
/// controller compared against the dual-quaternion one (self-comparison).
MonteCarloSummary run_monte_carlo(const ExperimentConfig& cfg, ControllerKind second = ControllerKind::kBaseline);

std::string format_summary(const MonteCarloSummary& s);

/// Writes `content` to `path` via a temporary file and rename.
void write_atomic(const std::filesystem::path& path, const std::string& content);

/// 17 significant digits.
std::string format_double(double v);

std::string episode_csv(const EpisodeLog& log);
std::string metrics_csv(const std::vector<TrialResult>& rows);

void emit_csv(const EpisodeLog& log, const std::filesystem::path& path);
void emit_csv(const std::vector<TrialResult>& rows, const std::filesystem::path& path);

/// Standalone SVG with stacked panels: position error, attitude error, V and Ek.
std::string episode_svg(const EpisodeLog& log, const Vec3& hover_position, const std::string& title);
void emit_plot(const EpisodeLog& log, const Vec3& hover_position, const std::filesystem::path& path,
               const std::string& title = "episode");

/// Monte Carlo overlay of the position error of every trial, one colour per
/// controller.
std::string overlay_svg(const std::vector<std::pair<std::string, EpisodeLog>>& logs, const Vec3& hover_position);

}  // namespace dqr
