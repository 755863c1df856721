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

// Subcommands of the dqrecover tool. Each returns the process exit code:
// 0 success, 1 a failed check or episode, 2 bad usage or configuration.

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "dqr/harness.hpp"

namespace dqr::cli {

struct Options {
  std::string config;  // empty: built-in defaults
  std::optional<std::uint64_t> seed;
  std::string out = "out";
  std::optional<std::string> controller;  // dq | baseline
  std::optional<std::string> impulse;     // decoupled | matrix | coupled
  std::optional<int> trials;
  std::size_t samples = 10000;
  std::size_t iterations = 1000000;
  std::vector<std::string> formulations{"inertial", "matrix", "dq"};
  bool inject_fault = false;
  bool verbose = false;
};

/// Config file (or defaults) with the command-line overrides applied.
/// Throws ConfigError or std::invalid_argument.
ExperimentConfig resolve_config(const Options& opt);

int cmd_simulate(const Options& opt, std::ostream& out, std::ostream& err);
int cmd_montecarlo(const Options& opt, std::ostream& out, std::ostream& err);
int cmd_equivalence(const Options& opt, std::ostream& out, std::ostream& err);
int cmd_bench(const Options& opt, std::ostream& out, std::ostream& err);
int cmd_plot(const Options& opt, std::ostream& out, std::ostream& err);

/// Nominal episode of the configured scenario (no jitter, configured yaw).
EpisodeConfig nominal_episode(const ExperimentConfig& cfg, ControllerKind kind);

}  // namespace dqr::cli
