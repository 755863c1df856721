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

#include "dqr/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace dqr {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

const char* kind_name(ControllerKind k) {
  switch (k) {
    case ControllerKind::kDualQuaternion: return "dq";
    case ControllerKind::kBaseline: return "baseline";
    case ControllerKind::kNone: return "none";
  }
  return "?";
}

Aggregate aggregate(const std::vector<double>& v) {
  Aggregate a;
  if (v.empty()) return a;
  for (double x : v) a.mean += x;
  a.mean /= static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - a.mean) * (x - a.mean);
    a.stddev = std::sqrt(ss / static_cast<double>(v.size() - 1));
  }
  return a;
}

double metric_value(const Metrics& m, int i) {
  switch (i) {
    case 0: return m.peak_l2;
    case 1: return m.rmse_l2;
    case 2: return m.peak_ek;
    default: return m.settling;
  }
}

}  // namespace

void ExperimentConfig::validate() const {
  if (trials < 1) throw std::invalid_argument("experiment: trials must be >= 1");
  if (!std::isfinite(jitter) || jitter < 0.0) throw std::invalid_argument("experiment: jitter must be finite and >= 0");
  if (!(settle_threshold > 0.0) || !(settle_dwell >= 0.0)) {
    throw std::invalid_argument("experiment: settle threshold must be > 0 and dwell >= 0");
  }
  if (!(scenario_params.impact_speed > 0.0)) throw std::invalid_argument("scenario: impact_speed must be > 0");
  if (!(std::abs(scenario_params.approach_angle) < 80.0)) {
    throw std::invalid_argument("scenario: approach_angle must lie in (-80, 80) deg");
  }
  if (!(contact.e >= 0.0 && contact.e < 1.0)) throw std::invalid_argument("contact: e must lie in [0, 1)");
  if (!(contact.mu >= 0.0)) throw std::invalid_argument("contact: mu must be >= 0");
  controller.gains.validate();
}

EpisodeConfig build_episode(const ExperimentConfig& cfg, const InitialCondition& ic, ControllerKind kind) {
  const ScenarioParams& sp = cfg.scenario_params;
  EpisodeConfig ep;
  ep.body = BodyParams(sp.mass, sp.inertia.asDiagonal().toDenseMatrix(), sp.gravity);
  const Vec3 n(-1.0, 0.0, 0.0);
  ep.geometry = sp.sphere ? WorldGeometry::sphere(n, -sp.standoff, sp.sphere_radius)
                          : WorldGeometry::quad_hull(n, -sp.standoff, sp.arm, sp.arm_height, sp.below);
  ep.contact = cfg.contact;
  ep.controller = cfg.controller;
  ep.controller.kind = kind;
  ep.sim = cfg.sim;
  ep.impulse = cfg.impulse;

  const UnitQuaternion q = UnitQuaternion::from_axis_angle(kUnitZ, ic.yaw * kDeg);
  ep.hover = dq_from_pose(q, Vec3::Zero());
  const double a = sp.approach_angle * kDeg;
  const Vec3 aim(sp.standoff, sp.standoff * std::tan(a), 0.0);
  const Vec3 dir = (aim - ic.offset).normalized();
  ep.initial.pose = dq_from_pose(q, ic.offset);
  ep.initial.twist = {Vec3::Zero(), quat_rotate(q.conjugate(), sp.impact_speed * dir)};
  return ep;
}

Metrics compute_metrics(const EpisodeLog& log, const Vec3& hover_position, double t_start,
                        double settle_threshold, double settle_dwell, int min_j) {
  std::vector<const Sample*> w;
  for (const Sample& s : log.samples) {
    if (s.t >= t_start && s.j >= min_j) w.push_back(&s);
  }
  if (w.empty()) throw std::invalid_argument("compute_metrics: window holds no samples");

  Metrics m;
  m.failed = log.failed;
  double sum_sq = 0.0;
  bool in_run = false;
  double run_start = 0.0;
  for (const Sample* s : w) {
    const double e = (s->x.pose.translation() - hover_position).norm();
    m.peak_l2 = std::max(m.peak_l2, e);
    sum_sq += e * e;
    m.peak_ek = std::max(m.peak_ek, s->ek);
    if (m.settled) continue;
    if (e >= settle_threshold) {
      in_run = false;
    } else {
      if (!in_run) {
        in_run = true;
        run_start = s->t;
      }
      if (s->t - run_start >= settle_dwell) {
        m.settled = true;
        m.settling = run_start - t_start;
      }
    }
  }
  m.rmse_l2 = std::sqrt(sum_sq / static_cast<double>(w.size()));
  if (!m.settled) m.settling = w.back()->t - t_start;
  return m;
}

Metrics compute_metrics(const EpisodeLog& log, const Vec3& hover_position, double t_start,
                        double settle_threshold, double settle_dwell) {
  return compute_metrics(log, hover_position, t_start, settle_threshold, settle_dwell, 0);
}

Metrics episode_metrics(const EpisodeLog& log, const EpisodeConfig& episode, const ExperimentConfig& cfg) {
  const Vec3 hover = episode.hover.translation();
  if (!log.first_impact) {
    return compute_metrics(log, hover, 0.0, cfg.settle_threshold, cfg.settle_dwell, 0);
  }
  // Post-jump samples only: the pre-impact sample at t_c shares the time stamp.
  return compute_metrics(log, hover, *log.first_impact, cfg.settle_threshold, cfg.settle_dwell, 1);
}

std::vector<InitialCondition> sample_initial_conditions(const ExperimentConfig& cfg) {
  std::vector<InitialCondition> out;
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> jitter(-cfg.jitter, cfg.jitter);
  std::uniform_real_distribution<double> yaw(0.0, 360.0);
  for (int i = 0; i < cfg.trials; ++i) {
    InitialCondition ic;
    ic.offset = {0.0, jitter(rng), jitter(rng)};
    ic.yaw = cfg.random_yaw ? yaw(rng) : cfg.scenario_params.yaw;
    out.push_back(ic);
  }
  return out;
}

MonteCarloSummary run_monte_carlo(const ExperimentConfig& cfg, ControllerKind second) {
  cfg.validate();
  const std::vector<InitialCondition> ics = sample_initial_conditions(cfg);
  const ControllerKind kinds[2] = {ControllerKind::kDualQuaternion, second};
  const std::size_t jobs = ics.size() * 2;
  std::vector<TrialResult> results(jobs);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < jobs; k = next++) {
      const std::size_t trial = k / 2;
      const ControllerKind kind = kinds[k % 2];
      const EpisodeConfig ep = build_episode(cfg, ics[trial], kind);
      const EpisodeLog log = run_episode(ep);
      results[k] = {static_cast<int>(trial), kind_name(kind), ics[trial], episode_metrics(log, ep, cfg)};
    }
  };
  unsigned n = cfg.threads > 0 ? static_cast<unsigned>(cfg.threads) : std::thread::hardware_concurrency();
  n = std::max(1u, std::min<unsigned>(n, static_cast<unsigned>(jobs)));
  std::vector<std::thread> pool;
  for (unsigned i = 0; i < n; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  MonteCarloSummary s;
  s.trials = results;
  for (int i = 0; i < 4; ++i) {
    std::vector<double> a, b;
    for (std::size_t k = 0; k < jobs; ++k) {
      if (results[k].metrics.failed) continue;
      (k % 2 == 0 ? a : b).push_back(metric_value(results[k].metrics, i));
    }
    s.dq[i] = aggregate(a);
    s.baseline[i] = aggregate(b);
    s.improvement[i] = s.baseline[i].mean != 0.0
                           ? (s.baseline[i].mean - s.dq[i].mean) / s.baseline[i].mean * 100.0
                           : 0.0;
  }
  for (const auto& r : results) s.failed += r.metrics.failed ? 1 : 0;
  return s;
}

std::string format_summary(const MonteCarloSummary& s) {
  std::ostringstream os;
  char line[256];
  std::snprintf(line, sizeof line, "%-12s %24s %24s %12s\n", "metric", "dq mean (sd)", "baseline mean (sd)",
                "improv. %");
  os << line;
  for (int i = 0; i < 4; ++i) {
    std::snprintf(line, sizeof line, "%-12s %12.4f (%9.4f) %12.4f (%9.4f) %12.2f\n", kMetricNames[i], s.dq[i].mean,
                  s.dq[i].stddev, s.baseline[i].mean, s.baseline[i].stddev, s.improvement[i]);
    os << line;
  }
  os << "trials: " << s.trials.size() / 2 << ", failed episodes: " << s.failed << "\n";
  os << "note: only the sign of each improvement is meaningful; absolute magnitudes depend on the\n"
        "      contact model and are not expected to match soft-contact physics engines.\n";
  return os.str();
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string episode_csv(const EpisodeLog& log) {
  std::string out = "t,j,px,py,pz,qw,qx,qy,qz,wx,wy,wz,vbx,vby,vbz,V,Vpos,Vkin,Ek,event\n";
  for (const Sample& s : log.samples) {
    const Vec3 p = s.x.pose.translation();
    const Quaternion& q = s.x.pose.rotation().q();
    const double vals[] = {s.t, p.x(), p.y(), p.z(), q.w, q.x, q.y, q.z,
                           s.x.twist.real.x(), s.x.twist.real.y(), s.x.twist.real.z(),
                           s.x.twist.dual.x(), s.x.twist.dual.y(), s.x.twist.dual.z(),
                           s.lyap.V, s.lyap.V_pos, s.lyap.V_kin, s.ek};
    out += format_double(vals[0]);
    out += ',' + std::to_string(s.j);
    for (std::size_t i = 1; i < std::size(vals); ++i) out += ',' + format_double(vals[i]);
    out += ',' + s.event + '\n';
  }
  return out;
}

std::string metrics_csv(const std::vector<TrialResult>& rows) {
  std::string out = "trial,controller,peak_l2_m,rmse_l2_m,peak_ek_J,settling_s,failed\n";
  for (const TrialResult& r : rows) {
    out += std::to_string(r.trial) + ',' + r.controller + ',' + format_double(r.metrics.peak_l2) + ',' +
           format_double(r.metrics.rmse_l2) + ',' + format_double(r.metrics.peak_ek) + ',' +
           format_double(r.metrics.settling) + ',' + (r.metrics.failed ? "1" : "0") + '\n';
  }
  return out;
}

void emit_csv(const EpisodeLog& log, const std::filesystem::path& path) { write_atomic(path, episode_csv(log)); }

void emit_csv(const std::vector<TrialResult>& rows, const std::filesystem::path& path) {
  write_atomic(path, metrics_csv(rows));
}

namespace {

struct Series {
  std::string label;
  std::string colour;
  std::vector<double> t;
  std::vector<double> y;
};

void panel(std::ostringstream& os, double top, const std::string& title, const std::vector<Series>& series) {
  constexpr double kLeft = 70.0, kWidth = 620.0, kHeight = 150.0;
  double t0 = 1e300, t1 = -1e300, y0 = 1e300, y1 = -1e300;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.t.size(); ++i) {
      t0 = std::min(t0, s.t[i]);
      t1 = std::max(t1, s.t[i]);
      y0 = std::min(y0, s.y[i]);
      y1 = std::max(y1, s.y[i]);
    }
  }
  if (!(t1 > t0)) t1 = t0 + 1.0;
  if (!(y1 > y0)) {
    y0 -= 0.5;
    y1 += 0.5;
  }
  auto X = [&](double t) { return kLeft + (t - t0) / (t1 - t0) * kWidth; };
  auto Y = [&](double y) { return top + kHeight - (y - y0) / (y1 - y0) * kHeight; };
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "<rect x=\"%.1f\" y=\"%.1f\" width=\"%.1f\" height=\"%.1f\" fill=\"none\" stroke=\"#888\"/>\n",
                kLeft, top, kWidth, kHeight);
  os << buf;
  std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" font-size=\"12\">%s</text>\n", kLeft, top - 6.0,
                title.c_str());
  os << buf;
  std::snprintf(buf, sizeof buf,
                "<text x=\"4\" y=\"%.1f\" font-size=\"10\">%.3g</text>\n<text x=\"4\" y=\"%.1f\" "
                "font-size=\"10\">%.3g</text>\n",
                top + 10.0, y1, top + kHeight, y0);
  os << buf;
  std::snprintf(buf, sizeof buf,
                "<text x=\"%.1f\" y=\"%.1f\" font-size=\"10\">%.3g s</text>\n<text x=\"%.1f\" y=\"%.1f\" "
                "font-size=\"10\">%.3g s</text>\n",
                kLeft, top + kHeight + 12.0, t0, kLeft + kWidth - 30.0, top + kHeight + 12.0, t1);
  os << buf;
  double legend = kLeft + kWidth - 10.0;
  for (const auto& s : series) {
    os << "<polyline fill=\"none\" stroke=\"" << s.colour << "\" stroke-width=\"1\" points=\"";
    for (std::size_t i = 0; i < s.t.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.2f,%.2f ", X(s.t[i]), Y(s.y[i]));
      os << buf;
    }
    os << "\"/>\n";
    if (!s.label.empty()) {
      legend -= 60.0;
      std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" font-size=\"10\" fill=\"%s\">%s</text>\n",
                    legend, top + 12.0, s.colour.c_str(), s.label.c_str());
      os << buf;
    }
  }
}

std::string svg_document(double height, const std::string& body) {
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"720\" height=\"" << height << "\" viewBox=\"0 0 720 "
     << height << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     << body << "</svg>\n";
  return os.str();
}

}  // namespace

std::string episode_svg(const EpisodeLog& log, const Vec3& hover_position, const std::string& title) {
  Series px{"x", "#1f77b4", {}, {}}, py{"y", "#2ca02c", {}, {}}, pz{"z", "#d62728", {}, {}};
  Series att{"", "#9467bd", {}, {}}, v{"", "#333333", {}, {}}, ek{"", "#ff7f0e", {}, {}};
  const UnitQuaternion q0 = log.samples.empty() ? UnitQuaternion{} : log.samples.front().x.pose.rotation();
  for (const Sample& s : log.samples) {
    const Vec3 p = s.x.pose.translation() - hover_position;
    px.t.push_back(s.t), px.y.push_back(p.x());
    py.t.push_back(s.t), py.y.push_back(p.y());
    pz.t.push_back(s.t), pz.y.push_back(p.z());
    att.t.push_back(s.t);
    att.y.push_back(quat_log(q0.conjugate() * s.x.pose.rotation()).norm() * 180.0 / std::numbers::pi);
    v.t.push_back(s.t), v.y.push_back(s.lyap.V);
    ek.t.push_back(s.t), ek.y.push_back(s.ek);
  }
  std::ostringstream os;
  os << "<text x=\"10\" y=\"18\" font-size=\"14\">" << title << "</text>\n";
  panel(os, 50.0, "position relative to hover reference [m]", {px, py, pz});
  panel(os, 240.0, "attitude change from start [deg]", {att});
  panel(os, 430.0, "Lyapunov function V [J]", {v});
  panel(os, 620.0, "kinetic energy Ek [J]", {ek});
  return svg_document(800.0, os.str());
}

void emit_plot(const EpisodeLog& log, const Vec3& hover_position, const std::filesystem::path& path,
               const std::string& title) {
  write_atomic(path, episode_svg(log, hover_position, title));
}

std::string overlay_svg(const std::vector<std::pair<std::string, EpisodeLog>>& logs, const Vec3& hover_position) {
  std::vector<Series> err, ek;
  for (const auto& [label, log] : logs) {
    const std::string colour = label == "dq" ? "#1f77b4" : "#d62728";
    const double t0 = log.first_impact.value_or(0.0);
    Series e{"", colour, {}, {}}, k{"", colour, {}, {}};
    for (const Sample& s : log.samples) {
      if (s.t < t0) continue;
      e.t.push_back(s.t - t0), e.y.push_back((s.x.pose.translation() - hover_position).norm());
      k.t.push_back(s.t - t0), k.y.push_back(s.ek);
    }
    err.push_back(std::move(e));
    ek.push_back(std::move(k));
  }
  if (!err.empty()) {
    err.front().label = logs.front().first;
    for (std::size_t i = 1; i < logs.size(); ++i) {
      if (logs[i].first != logs.front().first) {
        err[i].label = logs[i].first;
        break;
      }
    }
  }
  std::ostringstream os;
  os << "<text x=\"10\" y=\"18\" font-size=\"14\">recovery after first impact</text>\n";
  panel(os, 50.0, "L2 position error [m]", err);
  panel(os, 240.0, "kinetic energy Ek [J]", ek);
  return svg_document(420.0, os.str());
}

}  // namespace dqr
