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

#include "dqr/dualquat.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace dqr {

namespace {

Mat3 skew(const Vec3& v) {
  Mat3 s;
  s << 0, -v.z(), v.y(), v.z(), 0, -v.x(), -v.y(), v.x(), 0;
  return s;
}

// Left Jacobian of SO(3): ∫₀¹ exp(t[ω]×) dt.
Mat3 so3_left_jacobian(const Vec3& w) {
  const double th = w.norm();
  const Mat3 k = skew(w);
  double a, b;
  if (th < 1e-4) {
    const double th2 = th * th;
    a = 0.5 - th2 / 24.0;
    b = 1.0 / 6.0 - th2 / 120.0;
  } else {
    a = (1.0 - std::cos(th)) / (th * th);
    b = (th - std::sin(th)) / (th * th * th);
  }
  return Mat3::Identity() + a * k + b * k * k;
}

Mat3 so3_left_jacobian_inverse(const Vec3& w) {
  const double th = w.norm();
  const Mat3 k = skew(w);
  double c;
  if (th < 1e-4) {
    c = 1.0 / 12.0 + th * th / 720.0;
  } else {
    c = (1.0 - th * std::sin(th) / (2.0 * (1.0 - std::cos(th)))) / (th * th);
  }
  return Mat3::Identity() - 0.5 * k + c * k * k;
}

}  // namespace

bool DualMatrix::is_positive_diagonal() const {
  auto check = [](const Mat3& m) {
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) {
        if (r == c ? !(m(r, c) > 0.0) : m(r, c) != 0.0) return false;
      }
    }
    return true;
  };
  return check(A) && check(B);
}

DualVector dual_matrix_apply(const DualMatrix& k, const DualVector& a) {
  return {k.A * a.real, k.B * a.dual};
}

DualQuaternion dq_mul_raw(const DualQuaternion& a, const DualQuaternion& b) {
  return {quat_mul(a.real, b.real), quat_mul(a.real, b.dual) + quat_mul(a.dual, b.real)};
}

UnitDualQuaternion::UnitDualQuaternion(const DualQuaternion& d)
    : real_(d.real), dual_(d.dual) {
  if (!d.dual.is_finite()) {
    throw std::invalid_argument("UnitDualQuaternion: non-finite dual part");
  }
  const double ortho = std::abs(quat_dot(d.real, d.dual));
  if (ortho > kTolerance) {
    throw std::invalid_argument("UnitDualQuaternion: <real, dual> = " + std::to_string(ortho));
  }
}

UnitDualQuaternion UnitDualQuaternion::normalized(const DualQuaternion& d) {
  const double n = d.real.norm();
  if (!d.real.is_finite() || !d.dual.is_finite() || n == 0.0) {
    throw std::invalid_argument("UnitDualQuaternion::normalized: degenerate input");
  }
  const Quaternion r = d.real * (1.0 / n);
  const Quaternion du = d.dual * (1.0 / n);
  const Quaternion dp = du - r * quat_dot(r, du);
  return {UnitQuaternion::normalized(r), dp, Trusted{}};
}

Vec3 UnitDualQuaternion::translation() const {
  return 2.0 * quat_mul(dual_, real_.q().conjugate()).vec();
}

double UnitDualQuaternion::norm_violation() const { return std::abs(real_.q().norm() - 1.0); }

double UnitDualQuaternion::orthogonality_violation() const {
  return std::abs(quat_dot(real_.q(), dual_));
}

UnitDualQuaternion dq_from_pose(const UnitQuaternion& q, const Vec3& p) {
  return UnitDualQuaternion::normalized({q.q(), quat_mul(Quaternion::pure(p), q.q()) * 0.5});
}

UnitDualQuaternion dq_from_pose(const Quaternion& q, const Vec3& p) {
  return dq_from_pose(UnitQuaternion(q), p);
}

Pose dq_to_pose(const UnitDualQuaternion& d) { return {d.rotation(), d.translation()}; }

UnitDualQuaternion dq_mul(const UnitDualQuaternion& a, const UnitDualQuaternion& b) {
  return UnitDualQuaternion::normalized(dq_mul_raw(a.raw(), b.raw()));
}

UnitDualQuaternion dq_conjugate(const UnitDualQuaternion& a) {
  return UnitDualQuaternion::normalized({a.rotation().q().conjugate(), a.dual().conjugate()});
}

UnitDualQuaternion dq_exp(const DualVector& delta) {
  const double th = delta.real.norm();
  if (!(th < 2.0 * std::numbers::pi)) {
    throw std::domain_error("dq_exp: rotational displacement " + std::to_string(th) +
                            " rad outside the principal domain");
  }
  const UnitQuaternion r = quat_exp(delta.real);
  const Vec3 p = so3_left_jacobian(delta.real) * delta.dual;
  return dq_from_pose(r, p);
}

DualVector dq_log(const UnitDualQuaternion& d) {
  const Pose pose = dq_to_pose(d);
  const Vec3 w = quat_log(pose.rotation);
  return {w, so3_left_jacobian_inverse(w) * pose.position};
}

Vec3 dq_transform_point(const UnitDualQuaternion& pose, const Vec3& x) {
  return quat_rotate(pose.rotation(), x) + pose.translation();
}

DualVector screw_from_contact(const Vec3& r_c, const Vec3& u) {
  if (std::abs(u.norm() - 1.0) > 1e-9) {
    throw std::invalid_argument("screw_from_contact: direction is not unit");
  }
  return {r_c.cross(u), u};
}

}  // namespace dqr
