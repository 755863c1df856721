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

#include "dqr/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dqr {

BodyParams::BodyParams(double mass, const Mat3& inertia, double gravity)
    : mass_(mass), inertia_(inertia), gravity_(gravity) {
  if (!(mass > 0.0) || !std::isfinite(mass)) {
    throw std::invalid_argument("BodyParams: mass must be positive");
  }
  if (!inertia.allFinite() || (inertia - inertia.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
    throw std::invalid_argument("BodyParams: inertia must be finite and symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Mat3> eig(inertia, Eigen::EigenvaluesOnly);
  if (!(eig.eigenvalues().minCoeff() > 0.0)) {
    throw std::invalid_argument("BodyParams: inertia must be positive definite");
  }
  if (!std::isfinite(gravity)) {
    throw std::invalid_argument("BodyParams: gravity must be finite");
  }
  inertia_inv_ = inertia.inverse();
}

DualState to_dual(const ClassicState& s) {
  return {dq_from_pose(s.q, s.p), {s.w, quat_rotate(s.q.conjugate(), s.v)}};
}

ClassicState to_classic(const DualState& s) {
  const Pose pose = dq_to_pose(s.pose);
  return {pose.position, quat_rotate(pose.rotation, s.twist.dual), pose.rotation, s.twist.real};
}

ClassicDerivative classic_derivative(const ClassicState& s, double thrust, const Vec3& torque,
                                     const BodyParams& bp) {
  ClassicDerivative d;
  d.p_dot = s.v;
  d.q_dot = quat_mul(s.q.q(), Quaternion::pure(s.w)) * 0.5;
  d.v_dot = bp.gravity() * kUnitZ - (thrust / bp.mass()) * quat_rotate(s.q, kUnitZ);
  d.w_dot = bp.inertia_inverse() * (torque - s.w.cross(bp.inertia() * s.w));
  return d;
}

DualVector gravity_wrench(const DualState& s, const BodyParams& bp) {
  return {Vec3::Zero(), quat_rotate(s.pose.rotation().conjugate(), bp.mass() * bp.gravity() * kUnitZ)};
}

DualDerivative dual_derivative(const DualState& s, const DualVector& actuation, const BodyParams& bp) {
  const DualInertia m(bp);
  const DualVector total = actuation + gravity_wrench(s, bp);
  const DualVector h = m.apply(s.twist);
  DualDerivative d;
  d.pose_dot = dq_mul_raw(s.pose.raw(), DualQuaternion::pure(s.twist)) * 0.5;
  d.twist_dot = m.apply_inverse(total - dual_cross_adjoint(s.twist, h));
  return d;
}

DualVector saturate(const DualVector& wrench, const WrenchLimits& limits) {
  DualVector out = wrench;
  if (limits.max_torque > 0.0) {
    out.real = out.real.cwiseMax(-limits.max_torque).cwiseMin(limits.max_torque);
  }
  if (limits.max_force > 0.0) {
    out.dual = out.dual.cwiseMax(-limits.max_force).cwiseMin(limits.max_force);
  }
  return out;
}

namespace {

struct ClassicRaw {
  Vec3 p, v;
  Quaternion q;
  Vec3 w;
};

ClassicState classic_from_raw(const ClassicRaw& r) {
  return {r.p, r.v, UnitQuaternion::normalized(r.q), r.w};
}

ClassicRaw classic_axpy(const ClassicState& s, double h, const ClassicDerivative& d) {
  return {s.p + h * d.p_dot, s.v + h * d.v_dot, s.q.q() + d.q_dot * h, s.w + h * d.w_dot};
}

DualState dual_from_raw(const DualQuaternion& pose, const DualVector& twist) {
  return {UnitDualQuaternion::normalized(pose), twist};
}

}  // namespace

ClassicState rk4_classic(const ClassicState& s, double t, double dt, const ClassicInput& input,
                         const BodyParams& bp) {
  auto eval = [&](double tt, const ClassicState& x) {
    const auto [f, tau] = input(tt, x);
    return classic_derivative(x, f, tau, bp);
  };
  const ClassicDerivative k1 = eval(t, s);
  const ClassicDerivative k2 = eval(t + 0.5 * dt, classic_from_raw(classic_axpy(s, 0.5 * dt, k1)));
  const ClassicDerivative k3 = eval(t + 0.5 * dt, classic_from_raw(classic_axpy(s, 0.5 * dt, k2)));
  const ClassicDerivative k4 = eval(t + dt, classic_from_raw(classic_axpy(s, dt, k3)));
  const double h6 = dt / 6.0;
  ClassicRaw out;
  out.p = s.p + h6 * (k1.p_dot + 2.0 * k2.p_dot + 2.0 * k3.p_dot + k4.p_dot);
  out.v = s.v + h6 * (k1.v_dot + 2.0 * k2.v_dot + 2.0 * k3.v_dot + k4.v_dot);
  out.q = s.q.q() + (k1.q_dot + k2.q_dot * 2.0 + k3.q_dot * 2.0 + k4.q_dot) * h6;
  out.w = s.w + h6 * (k1.w_dot + 2.0 * k2.w_dot + 2.0 * k3.w_dot + k4.w_dot);
  return classic_from_raw(out);
}

DualState rk4_dual(const DualState& s, double t, double dt, const DualInput& input, const BodyParams& bp) {
  auto eval = [&](double tt, const DualState& x) { return dual_derivative(x, input(tt, x), bp); };
  auto stage = [&](const DualDerivative& d, double h) {
    return dual_from_raw(s.pose.raw() + d.pose_dot * h, s.twist + h * d.twist_dot);
  };
  const DualDerivative k1 = eval(t, s);
  const DualDerivative k2 = eval(t + 0.5 * dt, stage(k1, 0.5 * dt));
  const DualDerivative k3 = eval(t + 0.5 * dt, stage(k2, 0.5 * dt));
  const DualDerivative k4 = eval(t + dt, stage(k3, dt));
  const double h6 = dt / 6.0;
  const DualQuaternion pose =
      s.pose.raw() + (k1.pose_dot + k2.pose_dot * 2.0 + k3.pose_dot * 2.0 + k4.pose_dot) * h6;
  const DualVector twist =
      s.twist + h6 * (k1.twist_dot + 2.0 * k2.twist_dot + 2.0 * k3.twist_dot + k4.twist_dot);
  return dual_from_raw(pose, twist);
}

}  // namespace dqr
