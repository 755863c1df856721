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

// Impact recovery control.
//
// Setpoints are composed on the right, q̂_d = q̂(t_c) ⊗ q̂_Δ, so the braking
// displacement δ̂ (built from the body twist) acts along body axes.
//
// The position term of the control law is k_p q_e*⊙p_e: p_e is extracted in
// the setpoint frame and rotated into the body frame so it pairs with v_B.
// Its norm, and so V, is unchanged.

#pragma once

#include <memory>
#include <optional>

#include "dqr/dualquat.hpp"
#include "dqr/dynamics.hpp"
#include "dqr/impact.hpp"

namespace dqr {

struct ControllerGains {
  double k_q = 1.0;
  double k_p = 4.0;
  DualMatrix K_d = DualMatrix::diagonal({0.15, 0.15, 0.25}, {4.0, 4.0, 4.0});
  DualMatrix Gamma = DualMatrix::diagonal({0.1, 0.1, 0.1}, {0.15, 0.15, 0.15});
  double alpha = 0.5;
  double max_gamma = 10.0;  // cap returned by gain_bounds when a bound is unbounded

  /// Throws std::invalid_argument unless k_q, k_p > 0, K_d and Γ positive
  /// diagonal, 0 < α < 1, max_gamma > 0.
  void validate() const;
};

struct RecoverySetpoint {
  DualVector delta{};
  UnitDualQuaternion q_delta{};
  UnitDualQuaternion q_d{};
  double t_c = 0.0;
};

struct PoseError {
  UnitDualQuaternion q_e{};
  double q_e_w = 1.0;          // canonicalized, ≥ 0
  Vec3 q_e_vec = Vec3::Zero();
  Vec3 p_e = Vec3::Zero();     // setpoint frame
};

struct LyapunovSample {
  double V = 0.0;
  double V_pos = 0.0;
  double V_kin = 0.0;
  double Vdot = 0.0;    // −⟨ξ̂, K_d ∘ ξ̂⟩
  double E_diss = 0.0;  // jumps only
};

struct JumpCertificate {
  double dV_kin = 0.0;              // ½⟨ξ̂⁺,Mξ̂⁺⟩ − ½⟨ξ̂⁻,Mξ̂⁻⟩
  double dV_kin_expanded = 0.0;     // ⟨ξ̂⁻,Ŵ⟩ + ½⟨Ŵ,M⁻¹Ŵ⟩
  double dV_kin_normal = 0.0;       // −½Λ²⟨ŝ_n,M⁻¹ŝ_n⟩(1−e)/(1+e)
  double E_diss = 0.0;              // −dV_kin
  double V_pos_pre = 0.0;
  double injected = 0.0;            // ¼k_q‖Γ_ω ω⁺‖² + ½k_p‖Γ_v v_B⁺‖²
  double budget = 0.0;              // E_diss + V_pos_pre
  bool ok = false;                  // injected < budget
};

struct GainBounds {
  double gamma_w_max = 0.0;
  double gamma_v_max = 0.0;
};

/// δ̂ = Γ_ω ω⁺ + ε Γ_v v_B⁺
DualVector braking_displacement(const DualVector& xi_plus, const DualMatrix& gamma);

RecoverySetpoint make_setpoint(const DualVector& xi_plus, const UnitDualQuaternion& pose_at_impact,
                               const ControllerGains& gains, double t_c = 0.0);

/// q̂_e = q̂_d* ⊗ q̂, canonicalized so q_e^w ≥ 0.
PoseError pose_error(const UnitDualQuaternion& q_d, const UnitDualQuaternion& q);

/// ê = k_q q_e^v + ε k_p (q_e* ⊙ p_e)
DualVector error_wrench(const PoseError& err, const ControllerGains& gains);

/// F̂_a = −F̂_g + ξ̂ ×* M(ξ̂) − ê − K_d ∘ ξ̂
DualVector control_wrench(const DualState& s, const PoseError& err, const ControllerGains& gains,
                          const DualInertia& m, const BodyParams& bp);

/// 2k_q(1 − q_e^w) + ½k_p‖p_e‖²
double potential_energy(const PoseError& err, const ControllerGains& gains);

LyapunovSample lyapunov(const DualState& s, const PoseError& err, const ControllerGains& gains,
                        const DualInertia& m);

/// Energy audit of one impact. `restitution` is only used by the closed-form
/// normal term, which equals the total change when no friction acts.
JumpCertificate jump_certificate(const DualVector& xi_minus, const DualVector& xi_plus,
                                 const ImpulseResult& imp, const DualInertia& m, const ControllerGains& gains,
                                 const PoseError& pre_error, double restitution);

/// Upper bounds on ‖Γ_ω‖₂ and ‖Γ_v‖₂ for a budget E. A zero
/// velocity leaves its bound unconstrained and returns gains.max_gamma.
GainBounds gain_bounds(const Vec3& w_plus, const Vec3& v_b_plus, double e_budget, const ControllerGains& gains);

/// Scales each block of Γ so its largest diagonal entry is at most
/// margin × bound. Returns the input unchanged when already inside.
DualMatrix clamp_admittance(const DualMatrix& gamma, const GainBounds& bounds, double margin = 0.99);

struct BaselineGains {
  double k_p = 4.0;
  double k_d = 4.0;
  double k_att = 1.0;
  Vec3 k_rate{0.15, 0.15, 0.25};
  double max_tilt = 1.2;  // rad, limit on the commanded thrust-axis tilt
};

struct BaselineSetpoint {
  Vec3 p_d = Vec3::Zero();
  UnitQuaternion q_d{};
};

/// Decoupled admittance: p_d = p(t_c) + Γ_v v⁺ (world), q_d = q(t_c) ⊗ exp(Γ_ω ω⁺).
BaselineSetpoint make_baseline_setpoint(const ClassicState& post_impact, const DualMatrix& gamma);

/// Cascaded PD: position error → desired thrust vector → desired attitude
/// (heading from the setpoint) → attitude PD with gyroscopic cancellation.
/// Returns (f ≥ 0, τ).
std::pair<double, Vec3> baseline_control(const ClassicState& s, const BaselineSetpoint& sp,
                                         const BaselineGains& gains, const BodyParams& bp);

enum class ControllerKind { kDualQuaternion, kBaseline, kNone };

enum class ControlPhase { kApproach, kRecovery, kHover };

struct ControllerConfig {
  ControllerKind kind = ControllerKind::kDualQuaternion;
  ControllerGains gains{};
  BaselineGains baseline{};
  double hold_time = 3.0;       // s the recovery setpoint is held after the last impact
  bool clamp_gamma = true;      // clamp Γ to gain_bounds at every impact
  bool approach_open_loop = true;  // feed-forward only until the first impact
  WrenchLimits limits{};
};

/// One controller instance per episode. kNone applies zero actuation
/// throughout; V is still reported against the reference. Otherwise, before
/// the first impact the body flies either open loop (gravity and gyroscopic
/// feed-forward, identical for both kinds) or under the selected law toward
/// the hover reference. At each impact the recovery setpoint is latched, held
/// for hold_time, then the hover reference is restored.
class RecoveryController {
 public:
  RecoveryController(const ControllerConfig& cfg, const BodyParams& bp, const UnitDualQuaternion& hover);

  DualVector wrench(const DualState& s) const;

  /// Reference that V and the position error are measured against.
  const UnitDualQuaternion& reference() const { return reference_; }
  ControlPhase phase() const { return phase_; }
  const ControllerConfig& config() const { return cfg_; }

  /// ⟨ξ̂, K_d ∘ ξ̂⟩ when the dual-quaternion law is active, else nullopt.
  std::optional<double> dissipation_rate(const DualState& s) const;

  LyapunovSample lyapunov(const DualState& s) const;

  struct LatchResult {
    JumpCertificate certificate;
    DualMatrix gamma;       // admittance actually used
    bool gamma_clamped = false;
  };

  /// Latches a recovery setpoint from the post-impact state.
  LatchResult on_impact(double t_c, const DualState& pre, const DualState& post, const ImpulseResult& imp,
                        double restitution);

  /// Advances the phase machine; true when the reference changed at t.
  bool update(double t);

 private:
  ControllerConfig cfg_;
  BodyParams bp_;
  DualInertia m_;
  UnitDualQuaternion hover_;
  UnitDualQuaternion reference_;
  BaselineSetpoint baseline_sp_{};
  ControlPhase phase_ = ControlPhase::kApproach;
  double release_time_ = 0.0;
};

}  // namespace dqr
