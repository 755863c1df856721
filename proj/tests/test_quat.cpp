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

#include <cmath>
#include <numbers>

#include "doctest.h"
#include "dqr/quat.hpp"
#include "support.hpp"

using namespace dqr;

namespace {

Eigen::Quaterniond eig(const Quaternion& q) { return {q.w, q.x, q.y, q.z}; }

}  // namespace

TEST_CASE("product matches Eigen's Hamilton product") {
  test::Rng rng(1);
  for (int i = 0; i < 200; ++i) {
    const Quaternion a{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
    const Quaternion b{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
    const Quaternion c = quat_mul(a, b);
    const Eigen::Quaterniond e = eig(a) * eig(b);
    CHECK(c.w == doctest::Approx(e.w()).epsilon(1e-14));
    CHECK(c.x == doctest::Approx(e.x()).epsilon(1e-14));
    CHECK(c.y == doctest::Approx(e.y()).epsilon(1e-14));
    CHECK(c.z == doctest::Approx(e.z()).epsilon(1e-14));
  }
}

TEST_CASE("rotation agrees with the axis-angle matrix") {
  test::Rng rng(2);
  for (int i = 0; i < 200; ++i) {
    const Vec3 axis = rng.unit();
    const double angle = rng.uniform(-3.0, 3.0);
    const UnitQuaternion q = UnitQuaternion::from_axis_angle(axis, angle);
    const Mat3 r = Eigen::AngleAxisd(angle, axis).toRotationMatrix();
    const Vec3 v = rng.vec(5.0);
    CHECK((quat_rotate(q, v) - r * v).norm() < 1e-13);
    CHECK((q.to_rotation_matrix() - r).norm() < 1e-14);
    CHECK(quat_rotate(q, v).norm() == doctest::Approx(v.norm()).epsilon(1e-14));
  }
}

TEST_CASE("exp of a quarter turn about z maps x to y") {
  const UnitQuaternion q = quat_exp(Vec3(0.0, 0.0, std::numbers::pi / 2));
  CHECK(q.w() == doctest::Approx(std::cos(std::numbers::pi / 4)));
  CHECK((quat_rotate(q, Vec3::UnitX()) - Vec3::UnitY()).norm() < 1e-15);
}

TEST_CASE("exp of zero is the identity and log inverts exp") {
  const UnitQuaternion one = quat_exp(Vec3::Zero());
  CHECK(one.w() == 1.0);
  CHECK(one.vec().norm() == 0.0);
  test::Rng rng(3);
  for (int i = 0; i < 500; ++i) {
    Vec3 v = rng.unit() * rng.uniform(0.0, std::numbers::pi - 1e-6);
    CHECK((quat_log(quat_exp(v)) - v).norm() < 1e-12);
  }
  // Small angles go through the series branch.
  const Vec3 tiny(1e-9, -2e-9, 3e-9);
  CHECK((quat_log(quat_exp(tiny)) - tiny).norm() < 1e-20);
}

TEST_CASE("log returns the short way round") {
  const UnitQuaternion q = quat_exp(Vec3(0.0, 0.0, 1.5 * std::numbers::pi));
  const Vec3 v = quat_log(q);
  CHECK(v.norm() <= std::numbers::pi + 1e-12);
  CHECK(v.z() == doctest::Approx(-0.5 * std::numbers::pi));
}

TEST_CASE("unit quaternion construction validates its input") {
  CHECK_THROWS_AS(UnitQuaternion(Quaternion{2.0, 0.0, 0.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(UnitQuaternion::normalized(Quaternion{0.0, 0.0, 0.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(UnitQuaternion::normalized(Quaternion{NAN, 0.0, 0.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(quat_rotate(Quaternion{1.1, 0.0, 0.0, 0.0}, Vec3::UnitX()), std::invalid_argument);
  const UnitQuaternion q = UnitQuaternion::normalized(Quaternion{2.0, 0.0, 0.0, 0.0});
  CHECK(q.w() == 1.0);
}

TEST_CASE("canonical representative has w >= 0 and the same rotation") {
  const UnitQuaternion q = -quat_exp(Vec3(0.3, -0.2, 0.1));
  const UnitQuaternion c = q.canonical();
  CHECK(c.w() >= 0.0);
  CHECK((q.to_rotation_matrix() - c.to_rotation_matrix()).norm() < 1e-15);
}
