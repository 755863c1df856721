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

// Straight-line impulse-magnitude kernels shared by the reset maps and the
// benchmarks. Each kernel starts from the contact normal already expressed in
// the body frame (n_B); that transform is common to every formulation and is
// accounted separately by the benchmark.
//
// The kernels are templated on the scalar so bench::CountingScalar can flow
// through exactly the code the simulator runs.

#pragma once

#include "dqr/dualquat.hpp"
#include "dqr/dynamics.hpp"

namespace dqr {

template <class T>
struct ImpulseMagnitude {
  T impulse;        // Λ
  T inverse_mass;   // ρ
  T closing_speed;  // normal velocity of the contact point, < 0 approaching
};

/// Λ = −(1+e)⟨ξ̂⁻, ŝ_n⟩ / ⟨M⁻¹(ŝ_n), ŝ_n⟩ with ŝ_n = (r_c × n_B) + ε n_B.
template <class T>
ImpulseMagnitude<T> dq_impulse_magnitude(const BasicDualVector<T>& twist, const Vec3T<T>& r_c,
                                         const Vec3T<T>& n_b, const Mat3T<T>& j_inv, const T& m_inv,
                                         const T& restitution) {
  const BasicDualVector<T> s_n{r_c.cross(n_b), n_b};
  const T closing = dual_dot(twist, s_n);
  const T rho = dual_dot(inertia_apply_inverse(j_inv, m_inv, s_n), s_n);
  const T impulse = -((T(1.0) + restitution) * closing) / rho;
  return {impulse, rho, closing};
}

/// Body-frame matrix formulation:
///   ρ = m⁻¹ + n_Bᵀ[J⁻¹(r_c × n_B) × r_c]          (nᵀR = n_Bᵀ)
///   v_c = v + R(ω × r_c),  Λ = −(1+e) v_cᵀn / ρ
/// with v and n in the world frame, ω in the body frame.
template <class T>
ImpulseMagnitude<T> matrix_impulse_magnitude(const Vec3T<T>& v, const Vec3T<T>& w, const Mat3T<T>& rot,
                                             const Vec3T<T>& r_c, const Vec3T<T>& n, const Vec3T<T>& n_b,
                                             const Mat3T<T>& j_inv, const T& m_inv, const T& restitution) {
  const Vec3T<T> a = j_inv * r_c.cross(n_b);
  const T rho = m_inv + n_b.dot(a.cross(r_c));
  const Vec3T<T> v_c = v + rot * w.cross(r_c);
  const T closing = v_c.dot(n);
  const T impulse = -((T(1.0) + restitution) * closing) / rho;
  return {impulse, rho, closing};
}

/// World-frame (inertial) formulation: the inertia is rotated into the world
/// frame, J_W⁻¹ = R J⁻¹ Rᵀ, and every vector is taken to world coordinates.
template <class T>
ImpulseMagnitude<T> inertial_impulse_magnitude(const Vec3T<T>& v, const Vec3T<T>& w, const Mat3T<T>& rot,
                                               const Vec3T<T>& r_c, const Vec3T<T>& n, const Mat3T<T>& j_inv,
                                               const T& m_inv, const T& restitution) {
  const Mat3T<T> j_inv_w = (rot * j_inv).eval() * rot.transpose();
  const Vec3T<T> r_w = rot * r_c;
  const Vec3T<T> w_w = rot * w;
  const Vec3T<T> v_c = v + w_w.cross(r_w);
  const Vec3T<T> a = j_inv_w * r_w.cross(n);
  const T rho = m_inv + n.dot(a.cross(r_w));
  const T closing = v_c.dot(n);
  const T impulse = -((T(1.0) + restitution) * closing) / rho;
  return {impulse, rho, closing};
}

}  // namespace dqr
