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

#include "config.hpp"

#include <yaml-cpp/yaml.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <utility>

namespace dqr::cli {

namespace {

enum class Range { kAny, kPositive, kNonNegative, kUnitOpen };

using Setter = std::function<void(ExperimentConfig&, const YAML::Node&)>;
using Getter = std::function<std::string(const ExperimentConfig&)>;

struct Entry {
  KeyInfo info;
  Setter set;
  Getter get;
};

struct ValueError {
  std::string what;
};

std::string render(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, r.ptr);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

std::string render(const Vec3& v) { return "[" + render(v.x()) + ", " + render(v.y()) + ", " + render(v.z()) + "]"; }

void check(double v, Range range) {
  if (!std::isfinite(v)) throw ValueError{"value must be finite"};
  switch (range) {
    case Range::kAny: break;
    case Range::kPositive:
      if (!(v > 0.0)) throw ValueError{"value must be > 0"};
      break;
    case Range::kNonNegative:
      if (!(v >= 0.0)) throw ValueError{"value must be >= 0"};
      break;
    case Range::kUnitOpen:
      if (!(v >= 0.0 && v < 1.0)) throw ValueError{"value must lie in [0, 1)"};
      break;
  }
}

double read_real(const YAML::Node& n, Range range) {
  if (!n.IsScalar()) throw ValueError{"expected a number"};
  double v = 0.0;
  if (!YAML::convert<double>::decode(n, v)) throw ValueError{"expected a number, got '" + n.Scalar() + "'"};
  check(v, range);
  return v;
}

const char* range_text(Range r) {
  switch (r) {
    case Range::kAny: return "real";
    case Range::kPositive: return "real > 0";
    case Range::kNonNegative: return "real >= 0";
    case Range::kUnitOpen: return "real in [0, 1)";
  }
  return "real";
}

template <class Ref>
Entry real(const char* sec, const char* key, Range range, const char* help, Ref ref) {
  return {{sec, key, range_text(range), "", help},
          [ref, range](ExperimentConfig& c, const YAML::Node& n) { ref(c) = read_real(n, range); },
          [ref](const ExperimentConfig& c) { return render(ref(c)); }};
}

template <class Get, class Set>
Entry vec3(const char* sec, const char* key, Range range, const char* help, Get get, Set set) {
  return {{sec, key, std::string("[x, y, z], each ") + range_text(range), "", help},
          [set, range](ExperimentConfig& c, const YAML::Node& n) {
            if (!n.IsSequence() || n.size() != 3) throw ValueError{"expected a list of three numbers"};
            set(c, Vec3(read_real(n[0], range), read_real(n[1], range), read_real(n[2], range)));
          },
          [get](const ExperimentConfig& c) { return render(get(c)); }};
}

template <class Ref>
Entry integer(const char* sec, const char* key, long min, const char* help, Ref ref) {
  return {{sec, key, "integer >= " + std::to_string(min), "", help},
          [ref, min](ExperimentConfig& c, const YAML::Node& n) {
            long v = 0;
            if (!n.IsScalar() || !YAML::convert<long>::decode(n, v)) throw ValueError{"expected an integer"};
            if (v < min) throw ValueError{"value must be >= " + std::to_string(min)};
            ref(c) = static_cast<std::remove_reference_t<decltype(ref(c))>>(v);
          },
          [ref](const ExperimentConfig& c) { return std::to_string(ref(c)); }};
}

template <class Ref>
Entry boolean(const char* sec, const char* key, const char* help, Ref ref) {
  return {{sec, key, "bool", "", help},
          [ref](ExperimentConfig& c, const YAML::Node& n) {
            bool v = false;
            if (!n.IsScalar() || !YAML::convert<bool>::decode(n, v)) throw ValueError{"expected true or false"};
            ref(c) = v;
          },
          [ref](const ExperimentConfig& c) { return std::string(ref(c) ? "true" : "false"); }};
}

template <class T, class Ref>
Entry choice(const char* sec, const char* key, std::vector<std::pair<std::string, T>> options, const char* help,
             Ref ref) {
  std::string type = "one of";
  for (const auto& [name, v] : options) type += " " + name;
  return {{sec, key, type, "", help},
          [ref, options](ExperimentConfig& c, const YAML::Node& n) {
            if (!n.IsScalar()) throw ValueError{"expected a name"};
            for (const auto& [name, v] : options) {
              if (n.Scalar() == name) {
                ref(c) = v;
                return;
              }
            }
            std::string msg = "unknown value '" + n.Scalar() + "', expected one of";
            for (const auto& [name, v] : options) msg += " " + name;
            throw ValueError{msg};
          },
          [ref, options](const ExperimentConfig& c) {
            for (const auto& [name, v] : options) {
              if (ref(c) == v) return name;
            }
            return std::string("?");
          }};
}

Vec3 diag(const Mat3& m) { return m.diagonal(); }
Mat3 diag(const Vec3& v) { return v.asDiagonal().toDenseMatrix(); }

const std::vector<Entry>& entries() {
  static const std::vector<Entry> table = [] {
    std::vector<Entry> t;
    // body
    t.push_back(real("body", "mass", Range::kPositive, "body mass [kg]",
                     [](auto& c) -> auto& { return c.scenario_params.mass; }));
    t.push_back(vec3(
        "body", "inertia", Range::kPositive, "principal moments of inertia [kg m^2]",
        [](const ExperimentConfig& c) { return c.scenario_params.inertia; },
        [](ExperimentConfig& c, const Vec3& v) { c.scenario_params.inertia = v; }));
    t.push_back(real("body", "gravity", Range::kNonNegative, "gravitational acceleration along world +z (down) [m/s^2]",
                     [](auto& c) -> auto& { return c.scenario_params.gravity; }));
    // geometry
    t.push_back(choice<bool>("geometry", "shape", {{"quad", false}, {"sphere", true}},
                             "contact hull: quad (arm tips and a point below the centre) or sphere",
                             [](auto& c) -> auto& { return c.scenario_params.sphere; }));
    t.push_back(real("geometry", "arm", Range::kPositive, "arm-tip offset along body x and y [m]",
                     [](auto& c) -> auto& { return c.scenario_params.arm; }));
    t.push_back(real("geometry", "arm_height", Range::kAny, "arm tips sit this far above the centre (body -z) [m]",
                     [](auto& c) -> auto& { return c.scenario_params.arm_height; }));
    t.push_back(real("geometry", "below", Range::kNonNegative, "hull point this far below the centre (body +z) [m]",
                     [](auto& c) -> auto& { return c.scenario_params.below; }));
    t.push_back(real("geometry", "sphere_radius", Range::kPositive, "sphere radius when shape = sphere [m]",
                     [](auto& c) -> auto& { return c.scenario_params.sphere_radius; }));
    t.push_back(real("geometry", "standoff", Range::kPositive,
                     "distance from the hover reference to the wall (wall normal -x) [m]",
                     [](auto& c) -> auto& { return c.scenario_params.standoff; }));
    // contact
    t.push_back(real("contact", "restitution", Range::kUnitOpen, "coefficient of restitution e",
                     [](auto& c) -> auto& { return c.contact.e; }));
    t.push_back(real("contact", "friction", Range::kNonNegative, "Coulomb friction coefficient mu",
                     [](auto& c) -> auto& { return c.contact.mu; }));
    t.push_back(choice<FrictionLaw>("contact", "friction_law",
                                    {{"capped", FrictionLaw::kCoulombCapped}, {"one_shot", FrictionLaw::kOneShot}},
                                    "capped: friction impulse limited to what stops the slip; one_shot: mu * Lambda",
                                    [](auto& c) -> auto& { return c.sim.impact.friction; }));
    t.push_back(choice<ImpulseModel>(
        "contact", "impulse",
        {{"decoupled", ImpulseModel::kDecoupled}, {"matrix", ImpulseModel::kMatrix}, {"coupled", ImpulseModel::kCoupled}},
        "impulse model used by the simulator", [](auto& c) -> auto& { return c.impulse; }));
    t.push_back(real("contact", "slip_threshold", Range::kPositive,
                     "tangential contact speed below which there is no friction [m/s]",
                     [](auto& c) -> auto& { return c.sim.impact.slip; }));
    t.push_back(real("contact", "resting_speed", Range::kPositive,
                     "closing speed below which contact is treated as resting, no impulse [m/s]",
                     [](auto& c) -> auto& { return c.sim.impact.resting; }));
    // controller
    t.push_back(choice<ControllerKind>("controller", "kind",
                                       {{"dq", ControllerKind::kDualQuaternion},
                                        {"baseline", ControllerKind::kBaseline},
                                        {"none", ControllerKind::kNone}},
                                       "controller for simulate and plot (montecarlo always runs dq and baseline)",
                                       [](auto& c) -> auto& { return c.controller.kind; }));
    t.push_back(real("controller", "k_q", Range::kPositive, "attitude stiffness",
                     [](auto& c) -> auto& { return c.controller.gains.k_q; }));
    t.push_back(real("controller", "k_p", Range::kPositive, "position stiffness",
                     [](auto& c) -> auto& { return c.controller.gains.k_p; }));
    t.push_back(vec3(
        "controller", "damping_rot", Range::kPositive, "angular damping, diagonal of the real block of K_d",
        [](const ExperimentConfig& c) { return diag(c.controller.gains.K_d.A); },
        [](ExperimentConfig& c, const Vec3& v) { c.controller.gains.K_d.A = diag(v); }));
    t.push_back(vec3(
        "controller", "damping_lin", Range::kPositive, "linear damping, diagonal of the dual block of K_d",
        [](const ExperimentConfig& c) { return diag(c.controller.gains.K_d.B); },
        [](ExperimentConfig& c, const Vec3& v) { c.controller.gains.K_d.B = diag(v); }));
    t.push_back(vec3(
        "controller", "admittance_rot", Range::kPositive, "setpoint shift per unit post-impact angular rate [s]",
        [](const ExperimentConfig& c) { return diag(c.controller.gains.Gamma.A); },
        [](ExperimentConfig& c, const Vec3& v) { c.controller.gains.Gamma.A = diag(v); }));
    t.push_back(vec3(
        "controller", "admittance_lin", Range::kPositive, "setpoint shift per unit post-impact body velocity [s]",
        [](const ExperimentConfig& c) { return diag(c.controller.gains.Gamma.B); },
        [](ExperimentConfig& c, const Vec3& v) { c.controller.gains.Gamma.B = diag(v); }));
    t.push_back(real("controller", "alpha", Range::kUnitOpen,
                     "share of the energy budget given to the rotational setpoint shift, in (0, 1)",
                     [](auto& c) -> auto& { return c.controller.gains.alpha; }));
    t.push_back(real("controller", "max_gamma", Range::kPositive,
                     "admittance bound used when a post-impact rate is zero [s]",
                     [](auto& c) -> auto& { return c.controller.gains.max_gamma; }));
    t.push_back(boolean("controller", "clamp_admittance",
                        "scale the admittance down to 0.99 of the energy bound at every impact",
                        [](auto& c) -> auto& { return c.controller.clamp_gamma; }));
    t.push_back(real("controller", "hold_time", Range::kNonNegative,
                     "time the recovery setpoint is held after an impact before returning to hover [s]",
                     [](auto& c) -> auto& { return c.controller.hold_time; }));
    t.push_back(boolean("controller", "approach_open_loop",
                        "fly gravity and gyroscopic feed-forward only until the first impact",
                        [](auto& c) -> auto& { return c.controller.approach_open_loop; }));
    t.push_back(real("controller", "max_torque", Range::kNonNegative, "torque saturation, 0 disables [N m]",
                     [](auto& c) -> auto& { return c.controller.limits.max_torque; }));
    t.push_back(real("controller", "max_force", Range::kNonNegative, "force saturation, 0 disables [N]",
                     [](auto& c) -> auto& { return c.controller.limits.max_force; }));
    t.push_back(real("controller", "baseline_k_p", Range::kPositive, "baseline position gain",
                     [](auto& c) -> auto& { return c.controller.baseline.k_p; }));
    t.push_back(real("controller", "baseline_k_d", Range::kPositive, "baseline velocity gain",
                     [](auto& c) -> auto& { return c.controller.baseline.k_d; }));
    t.push_back(real("controller", "baseline_k_att", Range::kPositive, "baseline attitude gain",
                     [](auto& c) -> auto& { return c.controller.baseline.k_att; }));
    t.push_back(vec3(
        "controller", "baseline_k_rate", Range::kPositive, "baseline angular-rate gains",
        [](const ExperimentConfig& c) { return c.controller.baseline.k_rate; },
        [](ExperimentConfig& c, const Vec3& v) { c.controller.baseline.k_rate = v; }));
    t.push_back(real("controller", "baseline_max_tilt", Range::kPositive, "baseline thrust-axis tilt limit [rad]",
                     [](auto& c) -> auto& { return c.controller.baseline.max_tilt; }));
    // sim
    t.push_back(real("sim", "dt", Range::kPositive, "integration and logging step [s]",
                     [](auto& c) -> auto& { return c.sim.dt; }));
    t.push_back(real("sim", "t_end", Range::kPositive, "episode length [s]",
                     [](auto& c) -> auto& { return c.sim.t_end; }));
    t.push_back(integer("sim", "max_jumps_per_window", 1, "more jumps than this inside zeno_window switch to resting contact",
                        [](auto& c) -> auto& { return c.sim.max_jumps_per_window; }));
    t.push_back(real("sim", "zeno_window", Range::kPositive, "window of the jump-rate guard [s]",
                     [](auto& c) -> auto& { return c.sim.zeno_window; }));
    t.push_back(real("sim", "blowup", Range::kPositive, "twist norm above which an episode is marked failed",
                     [](auto& c) -> auto& { return c.sim.blowup; }));
    t.push_back(real("sim", "event_tolerance", Range::kPositive, "guard tolerance of the event bisection [m]",
                     [](auto& c) -> auto& { return c.sim.event_tolerance; }));
    t.push_back(integer("sim", "max_bisection", 1, "bisection iteration cap",
                        [](auto& c) -> auto& { return c.sim.max_bisection; }));
    // experiment
    t.push_back(real("experiment", "impact_speed", Range::kPositive, "launch speed toward the wall [m/s]",
                     [](auto& c) -> auto& { return c.scenario_params.impact_speed; }));
    t.push_back(real("experiment", "approach_angle", Range::kAny,
                     "nominal approach direction off the wall normal, in the horizontal plane [deg]",
                     [](auto& c) -> auto& { return c.scenario_params.approach_angle; }));
    t.push_back(real("experiment", "yaw", Range::kAny, "hover yaw of the nominal episode [deg]",
                     [](auto& c) -> auto& { return c.scenario_params.yaw; }));
    t.push_back(integer("experiment", "trials", 1, "Monte Carlo initial conditions",
                        [](auto& c) -> auto& { return c.trials; }));
    t.push_back({{"experiment", "seed", "unsigned integer", "", "Monte Carlo seed"},
                 [](ExperimentConfig& c, const YAML::Node& n) {
                   std::uint64_t v = 0;
                   if (!n.IsScalar() || !YAML::convert<std::uint64_t>::decode(n, v)) {
                     throw ValueError{"expected an unsigned integer"};
                   }
                   c.seed = v;
                 },
                 [](const ExperimentConfig& c) { return std::to_string(c.seed); }});
    t.push_back(real("experiment", "jitter", Range::kNonNegative,
                     "half-width of the uniform start-position jitter in the wall plane [m]",
                     [](auto& c) -> auto& { return c.jitter; }));
    t.push_back(boolean("experiment", "random_yaw", "Monte Carlo yaw uniform in [0, 360) deg instead of the nominal yaw",
                        [](auto& c) -> auto& { return c.random_yaw; }));
    t.push_back(real("experiment", "settle_threshold", Range::kPositive,
                     "position error below which the body counts as settled [m]",
                     [](auto& c) -> auto& { return c.settle_threshold; }));
    t.push_back(real("experiment", "settle_dwell", Range::kNonNegative,
                     "time the error must stay below the threshold [s]",
                     [](auto& c) -> auto& { return c.settle_dwell; }));
    t.push_back(integer("experiment", "threads", 0, "Monte Carlo worker threads, 0 uses every core",
                        [](auto& c) -> auto& { return c.threads; }));

    const ExperimentConfig defaults;
    for (Entry& e : t) e.info.default_value = e.get(defaults);
    return t;
  }();
  return table;
}

const Entry* find(const std::string& sec, const std::string& key) {
  for (const Entry& e : entries()) {
    if (e.info.section == sec && e.info.key == key) return &e;
  }
  return nullptr;
}

ConfigError at(const std::string& source, const YAML::Node& n, const std::string& what) {
  const YAML::Mark m = n.Mark();
  return ConfigError(source, m.line + 1, m.column + 1, what);
}

}  // namespace

ConfigError::ConfigError(const std::string& source, int line, int column, const std::string& what)
    : std::runtime_error(source + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + what),
      line_(line),
      column_(column) {}

std::vector<KeyInfo> config_keys() {
  std::vector<KeyInfo> out;
  for (const Entry& e : entries()) out.push_back(e.info);
  return out;
}

ExperimentConfig parse_config(const std::string& text, const std::string& source) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& ex) {
    throw ConfigError(source, ex.mark.line + 1, ex.mark.column + 1, ex.msg);
  }
  if (!root.IsMap()) throw ConfigError(source, 1, 1, "expected a mapping of sections");

  ExperimentConfig cfg;
  std::set<std::string> seen;
  for (const auto& sec : root) {
    const std::string name = sec.first.Scalar();
    if (std::find(kSections.begin(), kSections.end(), name) == kSections.end()) {
      throw at(source, sec.first, "unknown section '" + name + "'");
    }
    if (!seen.insert(name).second) throw at(source, sec.first, "duplicate section '" + name + "'");
    if (sec.second.IsNull()) continue;
    if (!sec.second.IsMap()) throw at(source, sec.second, "section '" + name + "' must be a mapping");
    std::set<std::string> keys;
    for (const auto& kv : sec.second) {
      const std::string key = kv.first.Scalar();
      const Entry* e = find(name, key);
      if (!e) throw at(source, kv.first, "unknown key '" + key + "' in section '" + name + "'");
      if (!keys.insert(key).second) throw at(source, kv.first, "duplicate key '" + name + "." + key + "'");
      try {
        e->set(cfg, kv.second);
      } catch (const ValueError& err) {
        throw at(source, kv.second, name + "." + key + ": " + err.what);
      }
    }
  }
  for (const std::string& s : kSections) {
    if (!seen.count(s)) throw ConfigError(source, 1, 1, "missing section '" + s + "'");
  }
  try {
    cfg.validate();
  } catch (const std::invalid_argument& ex) {
    throw ConfigError(source, 1, 1, ex.what());
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path, 0, 0, "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

std::string config_reference() {
  std::ostringstream os;
  os << "Configuration file (YAML; every section required, unknown keys rejected):\n";
  std::string section;
  for (const Entry& e : entries()) {
    if (e.info.section != section) {
      section = e.info.section;
      os << "\n  " << section << ":\n";
    }
    os << "    " << e.info.key << " (" << e.info.type << ", default " << e.info.default_value << ")\n"
       << "        " << e.info.help << "\n";
  }
  return os.str();
}

std::string dump_config(const ExperimentConfig& cfg) {
  std::ostringstream os;
  std::string section;
  for (const Entry& e : entries()) {
    if (e.info.section != section) {
      section = e.info.section;
      os << (os.tellp() > 0 ? "\n" : "") << section << ":\n";
    }
    os << "  " << e.info.key << ": " << e.get(cfg) << "\n";
  }
  return os.str();
}

}  // namespace dqr::cli
