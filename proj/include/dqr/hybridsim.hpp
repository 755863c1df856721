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

// Hybrid executor: fixed-step RK4 flow, guard φ(q̂) ≤ 0 on a plane, event
// bisection, impulsive jumps, Zeno guard and a resting-contact mode.
//
// The control wrench is evaluated at every RK4 stage. Alongside the state,
// each step integrates the dissipation D = ∫⟨ξ̂, K_d ∘ ξ̂⟩dt with the same
// stages, so (ΔV + ΔD)/dt is the flow certificate residual of the step.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dqr/controller.hpp"
#include "dqr/dualquat.hpp"
#include "dqr/dynamics.hpp"
#include "dqr/impact.hpp"

namespace dqr {

/// Plane {x : n·x = d} with the free side n·x > d, and the body hull as a set
/// of body-frame points, or a sphere about the CoM when sphere_radius > 0.
struct WorldGeometry {
  Vec3 n = -kUnitZ;
  double d = 0.0;
  std::vector<Vec3> points{Vec3::Zero()};
  double sphere_radius = 0.0;

  void validate() const;

  /// Arm tips (±L, ±L, −h) and a point `below` under the CoM.
  static WorldGeometry quad_hull(const Vec3& n, double d, double arm, double height, double below);
  static WorldGeometry sphere(const Vec3& n, double d, double radius);
};

struct SignedDistance {
  double phi = 0.0;
  std::size_t index = 0;
  Vec3 r_c = Vec3::Zero();  // body frame
};

/// φ = min_i n·(p + q⊙r_i) − d.
SignedDistance signed_distance(const UnitDualQuaternion& pose, const WorldGeometry& geom);

/// φ for one hull point (sphere: the single support point).
SignedDistance point_distance(const UnitDualQuaternion& pose, const WorldGeometry& geom, std::size_t index);

struct HybridState {
  DualState x{};
  double t = 0.0;
  int j = 0;
};

enum class ImpulseModel { kDecoupled, kMatrix, kCoupled };

struct ContactParams {
  double e = 0.7;
  double mu = 0.3;
};

struct SimConfig {
  double dt = 1e-3;
  double t_end = 8.0;
  int max_jumps_per_window = 20;
  double zeno_window = 0.1;
  double blowup = 1e3;          // ‖ξ̂‖ above which the episode is failed
  double event_tolerance = 1e-9;
  int max_bisection = 60;
  ImpactOptions impact{};
};

struct FlowStep {
  HybridState x;
  double dissipation = 0.0;  // ∫⟨ξ̂, K_d ∘ ξ̂⟩dt over the step
  bool certified = false;    // every stage ran the dual-quaternion law
};

/// One RK4 step of size dt from x.
FlowStep step_flow(const HybridState& x, const RecoveryController& ctrl, const BodyParams& bp, double dt);

struct EventLocation {
  double h = 0.0;   // time from x_before
  FlowStep step;    // state at the event
};

/// Bisection on the step size from x_before; the guard must be crossed
/// within [0, dt] (φ > 0 at 0, φ ≤ 0 at dt) or std::invalid_argument is
/// thrown. Starting on the guard returns x_before.
EventLocation locate_event(const HybridState& x_before, double dt, const RecoveryController& ctrl,
                           const BodyParams& bp, const WorldGeometry& geom, const SimConfig& sim);

struct JumpRecord {
  double t = 0.0;
  int j = 0;  // jump count after the jump
  std::size_t point = 0;
  ImpulseResult impulse{};
  JumpCertificate certificate{};
  double V_minus = 0.0;
  double V_plus = 0.0;
  double ke_minus = 0.0;
  double ke_plus = 0.0;
  bool gamma_clamped = false;
  bool fallback = false;  // coupled model failed, decoupled used
};

struct JumpOutcome {
  HybridState x;
  std::optional<JumpRecord> record;  // nullopt: resting contact, no impulse
  bool resting = false;
};

/// Resolves the contact at hull point `point` with the selected model,
/// applies the reset, latches the recovery setpoint and audits the energy.
/// A closing speed above −resting fires no impulse; the contact-point normal
/// velocity is removed instead and the contact flagged resting.
JumpOutcome apply_jump(const HybridState& x, const WorldGeometry& geom, std::size_t point,
                       const ContactParams& contact, RecoveryController& ctrl, ImpulseModel model,
                       const BodyParams& bp, const SimConfig& sim);

struct Sample {
  double t = 0.0;
  int j = 0;
  DualState x{};
  LyapunovSample lyap{};
  double ek = 0.0;
  DualVector wrench{};
  double phi = 0.0;
  double residual = 0.0;  // flow certificate residual of the step ending here [W]; 0 if not certified
  bool certified = false;
  std::string event;
};

struct EpisodeLog {
  std::vector<Sample> samples;
  std::vector<JumpRecord> jumps;
  std::vector<std::string> warnings;
  bool failed = false;
  std::string failure;
  bool ended_resting = false;
  std::optional<double> first_impact;
  double max_residual = 0.0;  // max certified residual [W]
  double max_drift = 0.0;     // max unit-DQ violation over logged samples
  double min_phi = 0.0;
};

struct EpisodeConfig {
  BodyParams body{1.0, Mat3::Identity()};
  WorldGeometry geometry{};
  ContactParams contact{};
  ControllerConfig controller{};
  SimConfig sim{};
  ImpulseModel impulse = ImpulseModel::kDecoupled;
  DualState initial{};
  UnitDualQuaternion hover{};
};

EpisodeLog run_episode(const EpisodeConfig& cfg);

}  // namespace dqr
