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

#include "dqr/quat.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace dqr {

double Quaternion::norm() const { return std::sqrt(w * w + x * x + y * y + z * z); }

bool Quaternion::is_finite() const {
  return std::isfinite(w) && std::isfinite(x) && std::isfinite(y) && std::isfinite(z);
}

double quat_dot(const Quaternion& a, const Quaternion& b) {
  return a.w * b.w + a.x * b.x + a.y * b.y + a.z * b.z;
}

Quaternion quat_mul(const Quaternion& a, const Quaternion& b) {
  return {a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
          a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
          a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
          a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w};
}

bool is_unit(const Quaternion& q, double tol) {
  return q.is_finite() && std::abs(q.norm() - 1.0) <= tol;
}

UnitQuaternion::UnitQuaternion(const Quaternion& q) : q_(q) {
  if (!q.is_finite()) {
    throw std::invalid_argument("UnitQuaternion: non-finite component");
  }
  const double dev = std::abs(q.norm() - 1.0);
  if (dev > kTolerance) {
    throw std::invalid_argument("UnitQuaternion: norm deviates from 1 by " + std::to_string(dev));
  }
}

UnitQuaternion UnitQuaternion::normalized(const Quaternion& q) {
  const double n = q.norm();
  if (!q.is_finite() || n == 0.0) {
    throw std::invalid_argument("UnitQuaternion::normalized: zero or non-finite quaternion");
  }
  return UnitQuaternion(q * (1.0 / n), Trusted{});
}

UnitQuaternion UnitQuaternion::from_axis_angle(const Vec3& axis, double angle) {
  const double n = axis.norm();
  if (n == 0.0) return identity();
  return quat_exp(axis * (angle / n));
}

UnitQuaternion UnitQuaternion::canonical() const {
  return q_.w < 0.0 ? UnitQuaternion(-q_, Trusted{}) : *this;
}

Mat3 UnitQuaternion::to_rotation_matrix() const {
  const double w = q_.w, x = q_.x, y = q_.y, z = q_.z;
  Mat3 r;
  r << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
      2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
      2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
  return r;
}

UnitQuaternion operator*(const UnitQuaternion& a, const UnitQuaternion& b) {
  // Products of unit quaternions drift by O(eps); renormalize so long
  // chains keep the invariant.
  return UnitQuaternion::normalized(quat_mul(a.q_, b.q_));
}

Vec3 quat_rotate(const Quaternion& q, const Vec3& v) {
  if (!is_unit(q, 1e-6)) {
    throw std::invalid_argument("quat_rotate: quaternion is not unit (norm " +
                                std::to_string(q.norm()) + ")");
  }
  // t = 2 q_v × v ; v' = v + w t + q_v × t
  const Vec3 qv = q.vec();
  const Vec3 t = 2.0 * qv.cross(v);
  return v + q.w * t + qv.cross(t);
}

UnitQuaternion quat_exp(const Vec3& v) {
  const double angle = v.norm();
  const double half = 0.5 * angle;
  // sin(θ/2)/θ, with its Taylor series near zero.
  const double k = angle < 1e-6 ? 0.5 - angle * angle / 48.0 : std::sin(half) / angle;
  return UnitQuaternion::normalized({std::cos(half), k * v.x(), k * v.y(), k * v.z()});
}

Vec3 quat_log(const UnitQuaternion& q) {
  const UnitQuaternion c = q.canonical();
  const Vec3 qv = c.vec();
  const double s = qv.norm();
  if (s < 1e-12) {
    // θ ≈ 2 s / w; first-order branch.
    return 2.0 * qv / c.w();
  }
  const double angle = 2.0 * std::atan2(s, c.w());
  return qv * (angle / s);
}

}  // namespace dqr
