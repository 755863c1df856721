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

// Dual numbers over quaternions and 3-vectors.
//
// Twists, screws and wrenches are pure dual quaternions; they are stored as a
// pair of 3-vectors (BasicDualVector) so the zero scalar parts never exist in
// memory. Poses are unit dual quaternions q + ε ½ p ⊗ q with p expressed in
// the world frame.

#pragma once

#include <Eigen/Dense>

#include "dqr/quat.hpp"

namespace dqr {

template <class T>
using Vec3T = Eigen::Matrix<T, 3, 1>;
template <class T>
using Mat3T = Eigen::Matrix<T, 3, 3>;

/// real + ε dual, both 3-vectors. Templated so the impulse kernels can be
/// re-run on an operation-counting scalar.
template <class T>
struct BasicDualVector {
  Vec3T<T> real = Vec3T<T>::Zero();
  Vec3T<T> dual = Vec3T<T>::Zero();

  BasicDualVector() = default;
  BasicDualVector(const Vec3T<T>& r, const Vec3T<T>& d) : real(r), dual(d) {}

  static BasicDualVector zero() { return {}; }

  BasicDualVector operator+(const BasicDualVector& o) const { return {real + o.real, dual + o.dual}; }
  BasicDualVector operator-(const BasicDualVector& o) const { return {real - o.real, dual - o.dual}; }
  BasicDualVector operator-() const { return {-real, -dual}; }
  BasicDualVector& operator+=(const BasicDualVector& o) {
    real += o.real;
    dual += o.dual;
    return *this;
  }
  friend BasicDualVector operator*(const T& s, const BasicDualVector& a) { return {s * a.real, s * a.dual}; }
};

using DualVector = BasicDualVector<double>;

/// ⟨a + εb, c + εd⟩ = a·c + b·d
template <class T>
T dual_dot(const BasicDualVector<T>& a, const BasicDualVector<T>& b) {
  return a.real.dot(b.real) + a.dual.dot(b.dual);
}

/// Kinematic cross product: a×c + ε(a×d + b×c).
template <class T>
BasicDualVector<T> dual_cross(const BasicDualVector<T>& a, const BasicDualVector<T>& b) {
  return {a.real.cross(b.real), a.real.cross(b.dual) + a.dual.cross(b.real)};
}

/// Kinetic (adjoint) cross product: (a×c + b×d) + ε(a×d).
template <class T>
BasicDualVector<T> dual_cross_adjoint(const BasicDualVector<T>& a, const BasicDualVector<T>& b) {
  return {a.real.cross(b.real) + a.dual.cross(b.dual), a.real.cross(b.dual)};
}

/// K̂ = A + εB acting block-wise: K̂ ∘ (a + εb) = Aa + εBb.
struct DualMatrix {
  Mat3 A = Mat3::Identity();
  Mat3 B = Mat3::Identity();

  static DualMatrix identity() { return {}; }
  static DualMatrix diagonal(const Vec3& a, const Vec3& b) {
    return {a.asDiagonal().toDenseMatrix(), b.asDiagonal().toDenseMatrix()};
  }
  static DualMatrix scalar(double a, double b) {
    return {a * Mat3::Identity(), b * Mat3::Identity()};
  }

  /// Both blocks diagonal with strictly positive diagonal.
  bool is_positive_diagonal() const;
};

DualVector dual_matrix_apply(const DualMatrix& k, const DualVector& a);

/// General (not necessarily unit) dual quaternion.
struct DualQuaternion {
  Quaternion real{};
  Quaternion dual{0.0, 0.0, 0.0, 0.0};

  DualQuaternion operator+(const DualQuaternion& o) const { return {real + o.real, dual + o.dual}; }
  DualQuaternion operator*(double s) const { return {real * s, dual * s}; }
  static DualQuaternion pure(const DualVector& v) { return {Quaternion::pure(v.real), Quaternion::pure(v.dual)}; }
};

/// (a + εb)(c + εd) = ac + ε(ad + bc)
DualQuaternion dq_mul_raw(const DualQuaternion& a, const DualQuaternion& b);

struct Pose {
  UnitQuaternion rotation;
  Vec3 position = Vec3::Zero();
};

/// Unit dual quaternion q + ε ½ p ⊗ q: real part on S³ and ⟨real, dual⟩₄ = 0,
/// both within 1e-9.
class UnitDualQuaternion {
 public:
  static constexpr double kTolerance = 1e-9;

  UnitDualQuaternion() = default;

  /// Validates both unit-DQ constraints; throws std::invalid_argument.
  explicit UnitDualQuaternion(const DualQuaternion& d);

  /// Normalizes the real part and removes the dual component along it.
  static UnitDualQuaternion normalized(const DualQuaternion& d);

  static UnitDualQuaternion identity() { return {}; }

  const UnitQuaternion& rotation() const { return real_; }
  const Quaternion& dual() const { return dual_; }
  DualQuaternion raw() const { return {real_.q(), dual_}; }

  /// p = 2 (dual ⊗ real*), vector part.
  Vec3 translation() const;

  /// Constraint violations: |‖real‖ − 1| and |⟨real, dual⟩₄|.
  double norm_violation() const;
  double orthogonality_violation() const;

 private:
  struct Trusted {};
  UnitDualQuaternion(const UnitQuaternion& r, const Quaternion& d, Trusted) : real_(r), dual_(d) {}

  UnitQuaternion real_{};
  Quaternion dual_{0.0, 0.0, 0.0, 0.0};
};

UnitDualQuaternion dq_from_pose(const UnitQuaternion& q, const Vec3& p);
/// Rejects a non-unit q (beyond 1e-9) with std::invalid_argument.
UnitDualQuaternion dq_from_pose(const Quaternion& q, const Vec3& p);
Pose dq_to_pose(const UnitDualQuaternion& d);

/// Composition of SE(3) transforms, a then b in a's frame (T_a T_b). The
/// result is re-normalized so arbitrarily long chains keep both constraints.
UnitDualQuaternion dq_mul(const UnitDualQuaternion& a, const UnitDualQuaternion& b);
UnitDualQuaternion dq_conjugate(const UnitDualQuaternion& a);

/// Pose reached from the identity by the constant body twist δ̂ applied over
/// unit time, i.e. exp(½ δ̂). The ½ is applied here; pass the full
/// displacement. Throws std::domain_error when ‖δ.real‖ ≥ 2π.
UnitDualQuaternion dq_exp(const DualVector& delta);

/// Inverse of dq_exp on the principal branch (rotation angle ≤ π, real part
/// canonicalized to w ≥ 0).
DualVector dq_log(const UnitDualQuaternion& d);

/// Point x expressed in the frame of `pose` mapped to world: q ⊙ x + p.
Vec3 dq_transform_point(const UnitDualQuaternion& pose, const Vec3& x);

/// Plücker line through r_c along the unit direction u: (r_c × u) + ε u.
/// Throws std::invalid_argument when |‖u‖ − 1| > 1e-9.
DualVector screw_from_contact(const Vec3& r_c, const Vec3& u);

}  // namespace dqr
