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

// Seeded random draws shared by the property tests.

#pragma once

#include <random>

#include "dqr/dynamics.hpp"
#include "dqr/impact.hpp"

namespace dqr::test {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : g_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(g_); }
  Vec3 vec(double scale) { return Vec3(uniform(-1, 1), uniform(-1, 1), uniform(-1, 1)) * scale; }
  Vec3 unit() { return vec(1.0).normalized(); }
  UnitQuaternion rotation() { return quat_exp(vec(3.0)); }

  /// Symmetric positive-definite inertia with principal moments in [0.005, 0.055].
  Mat3 inertia() {
    const Mat3 r = rotation().to_rotation_matrix();
    const Vec3 d(uniform(0.005, 0.055), uniform(0.005, 0.055), uniform(0.005, 0.055));
    Mat3 j = r * d.asDiagonal() * r.transpose();
    return 0.5 * (j + j.transpose());
  }
  BodyParams body() { return BodyParams(uniform(0.5, 2.0), inertia()); }

  DualState state() {
    DualState s;
    s.pose = dq_from_pose(rotation(), vec(2.0));
    s.twist = {vec(10.0), vec(3.0)};
    return s;
  }

  /// Contact on `s` that is approaching (closing speed below −1e-3).
  ContactSpec approaching(const DualState& s, double mu_max) {
    for (;;) {
      ContactSpec c;
      c.r_c = vec(0.3);
      c.n = unit();
      c.e = uniform(0.0, 0.999);
      c.mu = uniform(0.0, mu_max);
      const Vec3 n_b = quat_rotate(s.pose.rotation().conjugate(), c.n);
      if (dual_dot(s.twist, screw_from_contact(c.r_c, n_b)) < -1e-3) return c;
    }
  }

 private:
  std::mt19937_64 g_;
};

inline Mat3 rot(const UnitQuaternion& q) { return q.to_rotation_matrix(); }

}  // namespace dqr::test
