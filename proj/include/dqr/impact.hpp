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

// Single-point rigid impact reset maps.
//
// Three impulse models share one contract:
//   * impulse_dq            closed-form magnitude on the normal screw, friction
//                           cross-coupling neglected;
//   * impulse_matrix        the classical effective-mass formulation;
//   * impulse_coupled_oracle  solves the restitution law with the friction
//                           cross-coupling term kept.
//
// Friction acts along the friction screw, the line through r_c opposite to
// the sliding direction t_B. Two laws are available:
//   * kCoulombCapped (default): F_t = min(μΛ, F_stick), where F_stick is the
//     impulse that stops the slip left after the normal impulse. Never adds
//     kinetic energy.
//   * kOneShot: F_t = μΛ unconditionally. Can reverse the slip and, for small
//     slip with large μΛ, increase kinetic energy; flagged via slip_reversed.

#pragma once

#include <optional>
#include <stdexcept>

#include "dqr/dualquat.hpp"
#include "dqr/dynamics.hpp"

namespace dqr {

struct ContactSpec {
  Vec3 r_c = Vec3::Zero();   // contact point, body frame [m]
  Vec3 n = kUnitZ;           // surface normal, world frame, pointing into the body
  double e = 0.0;            // restitution, [0, 1)
  double mu = 0.0;           // Coulomb friction, ≥ 0

  /// Throws std::invalid_argument on a non-unit normal or out-of-range e, μ.
  void validate() const;
};

enum class FrictionLaw { kCoulombCapped, kOneShot };

struct ImpactOptions {
  double slip = 1e-8;      // m/s, below this no friction direction exists
  double resting = 1e-6;   // m/s, closing speeds below this do not fire an impulse
  FrictionLaw friction = FrictionLaw::kCoulombCapped;
};

struct ImpulseResult {
  double impulse = 0.0;        // Λ [N s]
  DualVector wrench{};         // Ŵ = Λ(ŝ_n + μ ŝ_t), body frame
  double inverse_mass = 0.0;   // ρ [1/kg]
  Vec3 lambda_body = Vec3::Zero();  // total impulse, body frame [N s]
  Vec3 lambda_world = Vec3::Zero(); // total impulse, world frame [N s]
  Vec3 contact_point = Vec3::Zero(); // r_c, body frame
  DualVector normal_screw{};   // ŝ_n
  DualVector friction_screw{}; // ŝ_t, zero when no slip
  double closing_speed = 0.0;  // ⟨ξ̂⁻, ŝ_n⟩ [m/s]
  double mu_effective = 0.0;   // F_t / Λ; μ unless capped or not sliding
  bool friction_capped = false; // F_t limited by the sticking impulse
  bool slip_reversed = false;  // post-impact tangential velocity opposes t_B
};

/// Thrown when a reset map is asked to resolve a contact that is not
/// approaching (closing speed ≥ −resting threshold). Signals a guard bug.
class SeparatingContactError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Velocity of the body-frame point r_c: v_B + ω × r_c.
Vec3 contact_point_velocity(const DualVector& twist, const Vec3& r_c);

/// Unit sliding direction in the body frame, or nullopt when the tangential
/// contact-point speed is below `slip_threshold`.
std::optional<Vec3> tangent_direction(const DualVector& twist, const Vec3& r_c, const Vec3& n_b,
                                      double slip_threshold = 1e-8);

ImpulseResult impulse_dq(const DualVector& twist, const ContactSpec& c, const UnitQuaternion& q,
                         const DualInertia& m, const ImpactOptions& opt = {});

ImpulseResult impulse_matrix(const ClassicState& s, const ContactSpec& c, const BodyParams& bp,
                             const ImpactOptions& opt = {});

/// Sliding branch: Λ = −(1+e)⟨ξ̂⁻, ŝ_n⟩ / ⟨M⁻¹(ŝ_n + μ ŝ_t), ŝ_n⟩, F_t = μΛ.
/// Under kCoulombCapped, when that would reverse the slip the sticking branch
/// solves restitution and zero final slip together, and is accepted only
/// inside the friction cone (Λ ≥ 0, 0 ≤ F_t ≤ μΛ).
/// Throws std::domain_error when ⟨M⁻¹(ŝ_n + μ ŝ_t), ŝ_n⟩ ≤ 0 or no branch is
/// consistent; callers fall back to impulse_dq.
ImpulseResult impulse_coupled_oracle(const DualVector& twist, const ContactSpec& c, const UnitQuaternion& q,
                                     const DualInertia& m, const ImpactOptions& opt = {});

/// ξ̂⁺ = ξ̂⁻ + M⁻¹(Ŵ). The pose is untouched by an impact.
DualVector reset_dq(const DualVector& twist, const ImpulseResult& imp, const DualInertia& m);

struct ClassicVelocities {
  Vec3 v;  // world
  Vec3 w;  // body
};

/// v⁺ = v⁻ + m⁻¹λ,  ω⁺ = ω⁻ + J⁻¹(r_c × Rᵀλ)
ClassicVelocities reset_matrix(const ClassicState& s, const ImpulseResult& imp, const BodyParams& bp);

}  // namespace dqr
