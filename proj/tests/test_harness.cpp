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

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "dqr/harness.hpp"
#include "support.hpp"

using namespace dqr;

namespace {

// Synthetic log: position error err(t) along x, constant twist.
template <class F>
EpisodeLog synthetic(F&& err, double dt, double t_end, const DualVector& twist = {}, double ek = 0.0) {
  EpisodeLog log;
  const int n = static_cast<int>(std::lround(t_end / dt));
  for (int i = 0; i <= n; ++i) {
    Sample s;
    s.t = i * dt;
    s.j = 1;
    s.x.pose = dq_from_pose(UnitQuaternion(), Vec3(err(s.t), 0.0, 0.0));
    s.x.twist = twist;
    s.ek = ek;
    log.samples.push_back(s);
  }
  return log;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> split_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    std::vector<std::string> cells;
    std::istringstream cs(line);
    std::string cell;
    while (std::getline(cs, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

ExperimentConfig small_experiment() {
  ExperimentConfig cfg;
  cfg.impulse = ImpulseModel::kCoupled;
  cfg.trials = 4;
  cfg.seed = 7;
  cfg.sim.t_end = 4.0;
  return cfg;
}

}  // namespace

TEST_CASE("metrics of a perfect hover are zero") {
  const EpisodeLog log = synthetic([](double) { return 0.0; }, 0.01, 2.0);
  const Metrics m = compute_metrics(log, Vec3::Zero(), 0.0);
  CHECK(m.peak_l2 == 0.0);
  CHECK(m.rmse_l2 == 0.0);
  CHECK(m.peak_ek == 0.0);
  CHECK(m.settling == 0.0);
  CHECK(m.settled);
}

TEST_CASE("exponential decay settles at ln(10)/2 within one step") {
  const double dt = 1e-3;
  const EpisodeLog log = synthetic([](double t) { return 0.5 * std::exp(-2.0 * t); }, dt, 5.0);
  const Metrics m = compute_metrics(log, Vec3::Zero(), 0.0, 0.05, 1.0);
  CHECK(m.settled);
  CHECK(std::abs(m.settling - std::log(10.0) / 2.0) <= dt);
  CHECK(m.peak_l2 == doctest::Approx(0.5));
  // Sample mean of 0.25 e^{-4t}: close to the integral mean over [0, 5].
  CHECK(m.rmse_l2 == doctest::Approx(std::sqrt(0.25 / (4.0 * 5.0))).epsilon(1e-2));
}

TEST_CASE("a dip shorter than the dwell does not count as settled") {
  const EpisodeLog log =
      synthetic([](double t) { return (t > 1.0 && t < 1.5) || t > 3.0 ? 0.0 : 0.2; }, 0.01, 5.0);
  const Metrics m = compute_metrics(log, Vec3::Zero(), 0.0, 0.05, 1.0);
  CHECK(m.settled);
  CHECK(m.settling == doctest::Approx(3.01));
  const Metrics never = compute_metrics(log, Vec3::Zero(), 0.0, 0.05, 10.0);
  CHECK_FALSE(never.settled);
  CHECK(never.settling == doctest::Approx(5.0));
}

TEST_CASE("peak kinetic energy of a constant twist is one half <xi, M xi>") {
  const BodyParams bp(1.3, Vec3(0.01, 0.02, 0.03).asDiagonal().toDenseMatrix());
  const DualInertia m(bp);
  const DualVector xi{Vec3(1.0, -2.0, 0.5), Vec3(0.3, 0.0, -0.4)};
  const double ek = 0.5 * (0.01 * 1.0 + 0.02 * 4.0 + 0.03 * 0.25) + 0.5 * 1.3 * 0.25;
  CHECK(m.kinetic_energy(xi) == doctest::Approx(ek));
  const EpisodeLog log = synthetic([](double) { return 0.0; }, 0.01, 1.0, xi, m.kinetic_energy(xi));
  CHECK(compute_metrics(log, Vec3::Zero(), 0.0).peak_ek == doctest::Approx(ek));
}

TEST_CASE("doubling the error doubles peak and RMSE") {
  auto f = [](double t) { return 0.3 * std::sin(3.0 * t) * std::exp(-t); };
  const Metrics a = compute_metrics(synthetic(f, 0.01, 4.0), Vec3::Zero(), 0.0);
  const Metrics b = compute_metrics(synthetic([&](double t) { return 2.0 * f(t); }, 0.01, 4.0), Vec3::Zero(), 0.0);
  CHECK(b.peak_l2 == doctest::Approx(2.0 * a.peak_l2));
  CHECK(b.rmse_l2 == doctest::Approx(2.0 * a.rmse_l2));
}

TEST_CASE("window selection") {
  const EpisodeLog log = synthetic([](double t) { return t; }, 0.1, 1.0);
  CHECK(compute_metrics(log, Vec3::Zero(), 0.5).peak_l2 == doctest::Approx(1.0));
  CHECK_THROWS_AS(compute_metrics(log, Vec3::Zero(), 2.0), std::invalid_argument);
  CHECK_THROWS_AS(compute_metrics(log, Vec3::Zero(), 0.0, 0.05, 1.0, 2), std::invalid_argument);
  CHECK_THROWS_AS(compute_metrics(EpisodeLog{}, Vec3::Zero(), 0.0), std::invalid_argument);
}

TEST_CASE("nominal episode: single impact at the wall") {
  const ExperimentConfig cfg;
  InitialCondition ic;
  ic.yaw = cfg.scenario_params.yaw;
  const EpisodeConfig ep = build_episode(cfg, ic, ControllerKind::kDualQuaternion);
  const EpisodeLog log = run_episode(ep);
  REQUIRE_FALSE(log.failed);
  CHECK(log.jumps.size() == 1);
  REQUIRE(log.first_impact.has_value());
  CHECK(log.jumps[0].certificate.ok);
  CHECK(log.max_residual <= 1e-6);
  const Metrics m = episode_metrics(log, ep, cfg);
  CHECK(m.peak_l2 > 0.0);
  CHECK(m.settled);
}

TEST_CASE("self comparison improves nothing") {
  ExperimentConfig cfg;
  cfg.trials = 1;
  const MonteCarloSummary s = run_monte_carlo(cfg, ControllerKind::kDualQuaternion);
  REQUIRE(s.trials.size() == 2);
  for (double imp : s.improvement) CHECK(imp == 0.0);
  CHECK(s.failed == 0);
}

TEST_CASE("Monte Carlo output is reproducible and independent of the thread count") {
  ExperimentConfig cfg = small_experiment();
  cfg.threads = 1;
  const std::string one = metrics_csv(run_monte_carlo(cfg).trials);
  cfg.threads = 4;
  const std::string four = metrics_csv(run_monte_carlo(cfg).trials);
  CHECK(one == four);
  cfg.seed = 8;
  CHECK(metrics_csv(run_monte_carlo(cfg).trials) != one);

  const auto ics = sample_initial_conditions(small_experiment());
  REQUIRE(ics.size() == 4);
  for (const InitialCondition& ic : ics) {
    CHECK(std::abs(ic.offset.y()) <= 0.2);
    CHECK(std::abs(ic.offset.z()) <= 0.2);
    CHECK(ic.offset.x() == 0.0);
    CHECK(ic.yaw >= 0.0);
    CHECK(ic.yaw < 360.0);
  }
}

TEST_CASE("Monte Carlo metrics match the golden snapshot") {
  const std::filesystem::path golden = std::filesystem::path(DQR_TEST_DATA_DIR) / "golden" / "metrics_small.csv";
  const std::string actual = metrics_csv(run_monte_carlo(small_experiment()).trials);
  if (std::getenv("DQR_UPDATE_GOLDEN")) write_atomic(golden, actual);
  const auto want = split_csv(read_file(golden));
  const auto got = split_csv(actual);
  REQUIRE(want.size() == got.size());
  REQUIRE(want.size() == 9);
  CHECK(want[0] == got[0]);
  for (std::size_t r = 1; r < want.size(); ++r) {
    REQUIRE(want[r].size() == got[r].size());
    CHECK(want[r][0] == got[r][0]);
    CHECK(want[r][1] == got[r][1]);
    for (std::size_t c = 2; c < want[r].size(); ++c) {
      const double w = std::stod(want[r][c]), g = std::stod(got[r][c]);
      CHECK(std::abs(w - g) <= 1e-9 * std::max(1.0, std::abs(w)));
    }
  }
}

TEST_CASE("CSV shapes") {
  CHECK(metrics_csv({}) == "trial,controller,peak_l2_m,rmse_l2_m,peak_ek_J,settling_s,failed\n");
  const EpisodeLog log = synthetic([](double t) { return t; }, 0.1, 1.0);
  const std::string csv = episode_csv(log);
  const auto rows = split_csv(csv);
  CHECK(rows.size() == log.samples.size() + 1);
  CHECK(rows[0].size() == 20);
  CHECK(rows[1].size() >= 19);
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(std::stod(format_double(M_PI)) == M_PI);
}

TEST_CASE("atomic writes create directories and replace files") {
  const std::filesystem::path dir = std::filesystem::temp_directory_path() / "dqr_test_harness_write";
  std::filesystem::remove_all(dir);
  write_atomic(dir / "sub" / "a.txt", "first");
  write_atomic(dir / "sub" / "a.txt", "second");
  CHECK(read_file(dir / "sub" / "a.txt") == "second");
  std::filesystem::remove_all(dir);
}

TEST_CASE("invalid experiments are rejected") {
  ExperimentConfig cfg;
  cfg.trials = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.settle_threshold = -1.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.contact.e = 1.5;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}
