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

#include "commands.hpp"

#include <cstdio>
#include <filesystem>
#include <utility>

#include "config.hpp"
#include "dqr/bench.hpp"
#include "dqr/equivalence.hpp"

namespace dqr::cli {

namespace {

namespace fs = std::filesystem;

template <class F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const ConfigError& ex) {
    err << "config error: " << ex.what() << "\n";
  } catch (const std::invalid_argument& ex) {
    err << "error: " << ex.what() << "\n";
  }
  return 2;
}

ControllerKind parse_controller(const std::string& s) {
  if (s == "dq") return ControllerKind::kDualQuaternion;
  if (s == "baseline") return ControllerKind::kBaseline;
  if (s == "none") return ControllerKind::kNone;
  throw std::invalid_argument("unknown controller '" + s + "' (expected dq or baseline)");
}

ImpulseModel parse_impulse(const std::string& s) {
  if (s == "decoupled") return ImpulseModel::kDecoupled;
  if (s == "matrix") return ImpulseModel::kMatrix;
  if (s == "coupled") return ImpulseModel::kCoupled;
  throw std::invalid_argument("unknown impulse model '" + s + "' (expected decoupled, matrix or coupled)");
}

const char* controller_name(ControllerKind k) {
  switch (k) {
    case ControllerKind::kDualQuaternion: return "dq";
    case ControllerKind::kBaseline: return "baseline";
    case ControllerKind::kNone: return "none";
  }
  return "?";
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

void print_metrics(std::ostream& out, const Metrics& m) {
  out << "peak_l2_m   " << fmt("%.6f", m.peak_l2) << "\n"
      << "rmse_l2_m   " << fmt("%.6f", m.rmse_l2) << "\n"
      << "peak_ek_J   " << fmt("%.6f", m.peak_ek) << "\n"
      << "settling_s  " << fmt("%.4f", m.settling) << (m.settled ? "" : " (not settled)") << "\n";
}

}  // namespace

ExperimentConfig resolve_config(const Options& opt) {
  ExperimentConfig cfg = opt.config.empty() ? ExperimentConfig{} : load_config(opt.config);
  if (opt.seed) cfg.seed = *opt.seed;
  if (opt.controller) cfg.controller.kind = parse_controller(*opt.controller);
  if (opt.impulse) cfg.impulse = parse_impulse(*opt.impulse);
  if (opt.trials) {
    if (*opt.trials < 1) throw std::invalid_argument("--trials must be >= 1");
    cfg.trials = *opt.trials;
  }
  cfg.validate();
  return cfg;
}

EpisodeConfig nominal_episode(const ExperimentConfig& cfg, ControllerKind kind) {
  InitialCondition ic;
  ic.yaw = cfg.scenario_params.yaw;
  return build_episode(cfg, ic, kind);
}

int cmd_simulate(const Options& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const ExperimentConfig cfg = resolve_config(opt);
    const EpisodeConfig ep = nominal_episode(cfg, cfg.controller.kind);
    const EpisodeLog log = run_episode(ep);
    const fs::path dir(opt.out);
    emit_csv(log, dir / "episode.csv");
    emit_plot(log, ep.hover.translation(), dir / "episode.svg",
              std::string("episode, controller ") + controller_name(cfg.controller.kind));

    out << "controller  " << controller_name(cfg.controller.kind) << "\n"
        << "samples     " << log.samples.size() << "\n"
        << "jumps       " << log.jumps.size() << "\n";
    for (const JumpRecord& j : log.jumps) {
      out << "  t=" << fmt("%.6f", j.t) << " point " << j.point << " Lambda=" << fmt("%.6f", j.impulse.impulse)
          << " dV=" << fmt("%.6f", j.V_plus - j.V_minus) << " dEk=" << fmt("%.6f", j.ke_plus - j.ke_minus)
          << " injected=" << fmt("%.6f", j.certificate.injected) << " budget=" << fmt("%.6f", j.certificate.budget)
          << (j.certificate.ok ? "" : " BUDGET EXCEEDED") << "\n";
    }
    out << "max flow residual " << fmt("%.3e", log.max_residual) << " W\n"
        << "max unit-norm drift " << fmt("%.3e", log.max_drift) << "\n";
    if (opt.verbose) {
      for (const std::string& w : log.warnings) out << "warning: " << w << "\n";
    }
    if (log.failed) {
      err << "episode failed: " << log.failure << "\n";
      return 1;
    }
    print_metrics(out, episode_metrics(log, ep, cfg));
    out << "wrote " << (dir / "episode.csv").string() << ", " << (dir / "episode.svg").string() << "\n";
    return 0;
  });
}

int cmd_montecarlo(const Options& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const ExperimentConfig cfg = resolve_config(opt);
    const MonteCarloSummary s = run_monte_carlo(cfg);
    const fs::path dir(opt.out);
    emit_csv(s.trials, dir / "metrics.csv");
    const std::string summary = format_summary(s);
    write_atomic(dir / "summary.txt", summary);
    out << summary;
    if (opt.verbose) {
      for (const TrialResult& r : s.trials) {
        out << "trial " << r.trial << " " << r.controller << " peak " << fmt("%.4f", r.metrics.peak_l2) << " rmse "
            << fmt("%.4f", r.metrics.rmse_l2) << " ek " << fmt("%.4f", r.metrics.peak_ek) << " settle "
            << fmt("%.3f", r.metrics.settling) << (r.metrics.failed ? " FAILED" : "") << "\n";
      }
    }
    out << "wrote " << (dir / "metrics.csv").string() << ", " << (dir / "summary.txt").string() << "\n";
    return 0;
  });
}

int cmd_equivalence(const Options& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (opt.samples == 0) throw std::invalid_argument("--samples must be > 0");
    const EquivalenceReport r = run_equivalence(opt.samples, opt.seed.value_or(1), opt.inject_fault ? 1.0 + 1e-6 : 1.0);
    out << "samples        " << r.samples << (opt.inject_fault ? " (fault injected: J scaled by 1+1e-6)" : "") << "\n"
        << "max rel rho    " << fmt("%.3e", r.max_rho) << "\n"
        << "max rel Lambda " << fmt("%.3e", r.max_lambda) << "\n"
        << "max rel dv     " << fmt("%.3e", r.max_dv) << "\n"
        << "max rel dw     " << fmt("%.3e", r.max_dw) << "\n";
    const bool ok = r.pass(1e-9);
    out << (ok ? "PASS" : "FAIL") << " (tolerance 1e-9)\n";
    return ok ? 0 : 1;
  });
}

int cmd_bench(const Options& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (opt.iterations == 0) throw std::invalid_argument("--iterations must be > 0");
    std::vector<bench::Formulation> forms;
    for (const std::string& f : opt.formulations) forms.push_back(bench::parse_formulation(f));
    const std::uint64_t seed = opt.seed.value_or(1);

    const double mismatch = bench::max_impulse_mismatch(bench::make_inputs(10000, seed));
    out << "impulse agreement across formulations: max rel " << fmt("%.3e", mismatch) << "\n";
    if (!(mismatch <= 1e-10)) {
      err << "formulations disagree beyond 1e-10; not timing\n";
      return 1;
    }

    std::vector<bench::LatencyStats> rows;
    for (bench::Formulation f : forms) {
      const bench::OpCount c = bench::flop_count(f);
      out << bench::formulation_name(f) << ": " << c.total << " ops (" << c.adds << " add, " << c.muls
          << " mul), prelude " << bench::prelude_count(f).total << "\n";
      if (opt.verbose) {
        for (const bench::OpItem& i : bench::flop_breakdown(f)) out << "    " << i.name << ": " << i.count.total << "\n";
      }
      rows.push_back(bench::latency_bench(f, opt.iterations, seed));
      out << "    median " << fmt("%.3f", rows.back().median_ns) << " ns, p95 " << fmt("%.3f", rows.back().p95_ns)
          << " ns over " << rows.back().iterations << " calls\n";
    }
    const auto find = [&](bench::Formulation f) -> const bench::LatencyStats* {
      for (const auto& r : rows) {
        if (r.formulation == f) return &r;
      }
      return nullptr;
    };
    const auto* dq = find(bench::Formulation::kDq);
    const auto* mx = find(bench::Formulation::kMatrix);
    if (dq && mx) {
      const double c_dq = static_cast<double>(bench::flop_count(bench::Formulation::kDq).total);
      const double c_mx = static_cast<double>(bench::flop_count(bench::Formulation::kMatrix).total);
      out << "op-count reduction matrix -> dq: " << fmt("%.1f", (c_mx - c_dq) / c_mx * 100.0) << "%\n"
          << "median latency ratio dq/matrix: " << fmt("%.3f", dq->median_ns / mx->median_ns) << "\n";
    }
    const fs::path path = fs::path(opt.out) / "bench.csv";
    write_atomic(path, bench::bench_csv(rows));
    out << "wrote " << path.string() << "\n";
    return 0;
  });
}

int cmd_plot(const Options& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const ExperimentConfig cfg = resolve_config(opt);
    const fs::path dir(opt.out);
    for (ControllerKind k : {ControllerKind::kDualQuaternion, ControllerKind::kBaseline}) {
      const EpisodeConfig ep = nominal_episode(cfg, k);
      const EpisodeLog log = run_episode(ep);
      const fs::path path = dir / (std::string("episode_") + controller_name(k) + ".svg");
      emit_plot(log, ep.hover.translation(), path, std::string("episode, controller ") + controller_name(k));
      out << "wrote " << path.string() << "\n";
    }
    std::vector<std::pair<std::string, EpisodeLog>> logs;
    for (const InitialCondition& ic : sample_initial_conditions(cfg)) {
      for (ControllerKind k : {ControllerKind::kDualQuaternion, ControllerKind::kBaseline}) {
        logs.emplace_back(controller_name(k), run_episode(build_episode(cfg, ic, k)));
      }
    }
    const fs::path overlay = dir / "overlay.svg";
    write_atomic(overlay, overlay_svg(logs, Vec3::Zero()));
    out << "wrote " << overlay.string() << "\n";
    return 0;
  });
}

}  // namespace dqr::cli
