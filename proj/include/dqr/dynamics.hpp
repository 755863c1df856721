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

// Rigid-body flight dynamics in two representations:
//
//   classic:  ṗ = v, q̇ = ½ q ⊗ ω, v̇ = g e_z − (f/m) q ⊙ e_z, Jω̇ = τ − ω × Jω
//   dual:     q̂̇ = ½ q̂ ⊗ ξ̂,  ξ̂̇ = M⁻¹(F̂ − ξ̂ ×* M(ξ̂))
//
// World z points down: gravity is +g e_z and hover thrust f = m g acts along
// −e_z of the body. The scalar thrust f of the classic form corresponds to
// the body-frame thrust vector −f e_z of the dual form.

#pragma once

#include <functional>

#include "dqr/dualquat.hpp"
#include "dqr/quat.hpp"

namespace dqr {

inline const Vec3 kUnitZ{0.0, 0.0, 1.0};

/// Mass m > 0 [kg], symmetric positive-definite inertia J [kg m²], gravity
/// magnitude g [m/s²].
class BodyParams {
 public:
  BodyParams(double mass, const Mat3& inertia, double gravity = 9.81);

  double mass() const { return mass_; }
  const Mat3& inertia() const { return inertia_; }
  const Mat3& inertia_inverse() const { return inertia_inv_; }
  double gravity() const { return gravity_; }

 private:
  double mass_;
  Mat3 inertia_;
  Mat3 inertia_inv_;
  double gravity_;
};

/// Dual inertia operator M(ω + εv) = Jω + ε m v and its exact inverse.
struct DualInertia {
  Mat3 J;
  Mat3 J_inv;
  double m;
  double m_inv;

  explicit DualInertia(const BodyParams& bp)
      : J(bp.inertia()), J_inv(bp.inertia_inverse()), m(bp.mass()), m_inv(1.0 / bp.mass()) {}

  DualVector apply(const DualVector& xi) const { return {J * xi.real, m * xi.dual}; }
  DualVector apply_inverse(const DualVector& h) const { return {J_inv * h.real, m_inv * h.dual}; }

  /// ½⟨ξ̂, M(ξ̂)⟩
  double kinetic_energy(const DualVector& xi) const { return 0.5 * dual_dot(xi, apply(xi)); }
};

/// M⁻¹ on an arbitrary scalar type; used by the instrumented impulse kernels.
template <class T>
BasicDualVector<T> inertia_apply_inverse(const Mat3T<T>& j_inv, const T& m_inv, const BasicDualVector<T>& h) {
  return {j_inv * h.real, m_inv * h.dual};
}

inline DualVector inertia_apply(const DualInertia& m, const DualVector& xi) { return m.apply(xi); }

/// (p^W, v^W, q, ω^B)
struct ClassicState {
  Vec3 p = Vec3::Zero();
  Vec3 v = Vec3::Zero();
  UnitQuaternion q{};
  Vec3 w = Vec3::Zero();
};

struct ClassicDerivative {
  Vec3 p_dot;
  Vec3 v_dot;
  Quaternion q_dot;
  Vec3 w_dot;
};

/// Pose q̂ and body twist ξ̂ = ω + ε v_B with v_B = q* ⊙ v.
struct DualState {
  UnitDualQuaternion pose{};
  DualVector twist{};
};

struct DualDerivative {
  DualQuaternion pose_dot;  // 8-component tangent element
  DualVector twist_dot;
};

DualState to_dual(const ClassicState& s);
ClassicState to_classic(const DualState& s);

ClassicDerivative classic_derivative(const ClassicState& s, double thrust, const Vec3& torque,
                                     const BodyParams& bp);

/// F̂_g = 0 + ε q* ⊙ (m g e_z)
DualVector gravity_wrench(const DualState& s, const BodyParams& bp);

/// F̂_a = τ + ε f
inline DualVector actuation_wrench(const Vec3& torque, const Vec3& force) { return {torque, force}; }

/// Dual wrench equivalent to the classic (scalar thrust, torque) input.
inline DualVector thrust_torque_wrench(double thrust, const Vec3& torque) {
  return actuation_wrench(torque, -thrust * kUnitZ);
}

/// Derivative with total wrench F̂ = F_a + gravity_wrench(s).
DualDerivative dual_derivative(const DualState& s, const DualVector& actuation, const BodyParams& bp);

/// Optional symmetric box limits on each wrench component. Zero disables.
struct WrenchLimits {
  double max_torque = 0.0;
  double max_force = 0.0;
};

DualVector saturate(const DualVector& wrench, const WrenchLimits& limits);

using ClassicInput = std::function<std::pair<double, Vec3>(double t, const ClassicState&)>;
using DualInput = std::function<DualVector(double t, const DualState&)>;

/// One RK4 step; the input is evaluated at every stage and the attitude
/// renormalized afterwards.
ClassicState rk4_classic(const ClassicState& s, double t, double dt, const ClassicInput& input,
                         const BodyParams& bp);

/// One RK4 step of the dual dynamics over the 8 raw pose components plus the
/// twist. Stage poses are normalized before the vector field is evaluated;
/// the final pose is normalized and its dual part re-orthogonalized.
DualState rk4_dual(const DualState& s, double t, double dt, const DualInput& input, const BodyParams& bp);

}  // namespace dqr
