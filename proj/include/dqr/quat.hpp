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

#pragma once

#include <Eigen/Dense>

namespace dqr {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Hamilton quaternion, scalar-first (w, x, y, z). This component order is
/// used everywhere in the library, including CSV output.
struct Quaternion {
  double w = 1.0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr Quaternion() = default;
  constexpr Quaternion(double w_, double x_, double y_, double z_)
      : w(w_), x(x_), y(y_), z(z_) {}

  /// Pure quaternion (0, v).
  static Quaternion pure(const Vec3& v) { return {0.0, v.x(), v.y(), v.z()}; }
  static constexpr Quaternion identity() { return {1.0, 0.0, 0.0, 0.0}; }

  Vec3 vec() const { return {x, y, z}; }
  double norm() const;
  Quaternion conjugate() const { return {w, -x, -y, -z}; }
  bool is_finite() const;

  Quaternion operator+(const Quaternion& o) const { return {w + o.w, x + o.x, y + o.y, z + o.z}; }
  Quaternion operator-(const Quaternion& o) const { return {w - o.w, x - o.x, y - o.y, z - o.z}; }
  Quaternion operator-() const { return {-w, -x, -y, -z}; }
  Quaternion operator*(double s) const { return {w * s, x * s, y * s, z * s}; }
  friend Quaternion operator*(double s, const Quaternion& q) { return q * s; }
};

/// 4-component inner product.
double quat_dot(const Quaternion& a, const Quaternion& b);

/// Hamilton product a ⊗ b.
Quaternion quat_mul(const Quaternion& a, const Quaternion& b);

/// Quaternion known to lie on S³ (|‖q‖ − 1| ≤ 1e-9).
class UnitQuaternion {
 public:
  static constexpr double kTolerance = 1e-9;

  UnitQuaternion() = default;

  /// Throws std::invalid_argument when ‖q‖ deviates from 1 by more than
  /// kTolerance, or when q has non-finite components.
  explicit UnitQuaternion(const Quaternion& q);

  /// Normalizes q. Throws on zero or non-finite input.
  static UnitQuaternion normalized(const Quaternion& q);

  /// Rotation of `angle` radians about `axis` (normalized internally).
  static UnitQuaternion from_axis_angle(const Vec3& axis, double angle);

  static UnitQuaternion identity() { return UnitQuaternion(); }

  const Quaternion& q() const { return q_; }
  double w() const { return q_.w; }
  Vec3 vec() const { return q_.vec(); }

  UnitQuaternion conjugate() const { return UnitQuaternion(q_.conjugate(), Trusted{}); }
  /// Representative with w ≥ 0 (same rotation).
  UnitQuaternion canonical() const;
  UnitQuaternion operator-() const { return UnitQuaternion(-q_, Trusted{}); }

  /// Rotation matrix R(q) with R v = q ⊙ v.
  Mat3 to_rotation_matrix() const;

  friend UnitQuaternion operator*(const UnitQuaternion& a, const UnitQuaternion& b);

 private:
  struct Trusted {};
  UnitQuaternion(const Quaternion& q, Trusted) : q_(q) {}
  friend UnitQuaternion quat_exp(const Vec3& v);

  Quaternion q_{};
};

/// Checks ‖q‖ within `tol` of one, without constructing.
bool is_unit(const Quaternion& q, double tol);

/// q ⊙ v = q ⊗ v ⊗ q*. Throws std::invalid_argument when ‖q‖ deviates from
/// one by more than 1e-6 (caller forgot to normalize).
Vec3 quat_rotate(const Quaternion& q, const Vec3& v);
inline Vec3 quat_rotate(const UnitQuaternion& q, const Vec3& v) { return quat_rotate(q.q(), v); }

/// Rotation vector → unit quaternion: exp(v) = (cos(‖v‖/2), sin(‖v‖/2) v/‖v‖).
/// The rotation angle is ‖v‖.
UnitQuaternion quat_exp(const Vec3& v);

/// Inverse of quat_exp on the principal branch. The input is canonicalized
/// to w ≥ 0 first, so the result has norm ≤ π. When the rotation angle is
/// within 1e-9 of π the axis is taken from the vector part as-is (its sign
/// after canonicalization is arbitrary, both choices describe the same
/// rotation).
Vec3 quat_log(const UnitQuaternion& q);

}  // namespace dqr
