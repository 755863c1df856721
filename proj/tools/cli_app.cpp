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

#include "cli_app.hpp"

#include <functional>

#include "CLI11.hpp"
#include "commands.hpp"
#include "config.hpp"

namespace dqr::cli {

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"dqrecover: impact recovery experiments with dual-quaternion rigid-body dynamics"};
  app.require_subcommand(1);
  app.footer(config_reference());

  Options opt;
  std::uint64_t seed = 0;
  std::string controller, impulse;
  int trials = 0;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config, "configuration file (YAML); built-in defaults when omitted")
        ->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out, "output directory")->capture_default_str();
    sub->add_flag("--verbose", opt.verbose, "extra diagnostics");
  };
  auto seeded = [&](CLI::App* sub) { sub->add_option("--seed", seed, "random seed (overrides experiment.seed)"); };
  auto scenario = [&](CLI::App* sub) {
    sub->add_option("--controller", controller, "controller override")->check(CLI::IsMember({"dq", "baseline"}));
    sub->add_option("--impulse", impulse, "impulse model override")
        ->check(CLI::IsMember({"decoupled", "matrix", "coupled"}));
  };

  CLI::App* simulate = app.add_subcommand("simulate", "run the nominal wall-impact episode; writes episode.csv and episode.svg");
  common(simulate);
  seeded(simulate);
  scenario(simulate);

  CLI::App* montecarlo = app.add_subcommand("montecarlo", "run dq and baseline over seeded initial conditions; writes metrics.csv and summary.txt");
  common(montecarlo);
  seeded(montecarlo);
  scenario(montecarlo);
  montecarlo->add_option("--trials", trials, "number of initial conditions (overrides experiment.trials)")
      ->check(CLI::PositiveNumber);

  CLI::App* equivalence = app.add_subcommand("equivalence", "compare the dual-quaternion and matrix reset maps on random impacts");
  common(equivalence);
  seeded(equivalence);
  equivalence->add_option("--samples", opt.samples, "number of random impacts")->capture_default_str();
  equivalence->add_flag("--inject-fault", opt.inject_fault, "test hook: scale J by 1+1e-6 in the matrix path");

  CLI::App* bench = app.add_subcommand("bench", "operation counts and latency of the impulse formulations; writes bench.csv");
  common(bench);
  seeded(bench);
  bench->add_option("--iterations", opt.iterations, "timed calls per formulation")->capture_default_str();
  bench->add_option("--formulations", opt.formulations, "subset of inertial, matrix, dq")
      ->check(CLI::IsMember({"inertial", "matrix", "dq"}))
      ->capture_default_str();

  CLI::App* plot = app.add_subcommand("plot", "write SVG plots of the nominal episodes and a Monte Carlo overlay");
  common(plot);
  seeded(plot);
  scenario(plot);
  plot->add_option("--trials", trials, "overlay initial conditions (overrides experiment.trials)")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;  // usage errors share the config-error exit code
  }

  CLI::App* used = app.get_subcommands().front();
  if (used->count("--seed")) opt.seed = seed;
  if (used->get_option_no_throw("--controller") && used->count("--controller")) opt.controller = controller;
  if (used->get_option_no_throw("--impulse") && used->count("--impulse")) opt.impulse = impulse;
  if (used->get_option_no_throw("--trials") && used->count("--trials")) opt.trials = trials;
  if (used->get_option_no_throw("--samples") && used->count("--samples") && opt.samples == 0) {
    err << "error: --samples must be > 0\n";
    return 2;
  }

  const std::function<int(const Options&, std::ostream&, std::ostream&)> commands[] = {
      cmd_simulate, cmd_montecarlo, cmd_equivalence, cmd_bench, cmd_plot};
  const CLI::App* subs[] = {simulate, montecarlo, equivalence, bench, plot};
  for (int i = 0; i < 5; ++i) {
    if (used == subs[i]) return commands[i](opt, out, err);
  }
  return 2;
}

}  // namespace dqr::cli
