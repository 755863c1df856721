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

#include "doctest.h"
#include "dqr/dynamics.hpp"
#include "support.hpp"

using namespace dqr;

namespace {

ClassicState random_classic(test::Rng& rng) {
  ClassicState s;
  s.p = rng.vec(1.0);
  s.v = rng.vec(2.0);
  s.q = rng.rotation();
  s.w = rng.vec(3.0);
  return s;
}

}  // namespace

TEST_CASE("classic and dual states convert both ways") {
  test::Rng rng(20);
  for (int i = 0; i < 100; ++i) {
    const ClassicState c = random_classic(rng);
    const DualState d = to_dual(c);
    CHECK((d.twist.dual - quat_rotate(c.q.conjugate(), c.v)).norm() < 1e-14);
    const ClassicState back = to_classic(d);
    CHECK((back.p - c.p).norm() < 1e-14);
    CHECK((back.v - c.v).norm() < 1e-14);
    CHECK((back.w - c.w).norm() == 0.0);
  }
}

TEST_CASE("gravity wrench is the body-frame weight") {
  const BodyParams bp(2.0, Mat3::Identity() * 0.01, 9.81);
  ClassicState c;
  c.q = quat_exp(Vec3(0.3, 0.0, 0.0));
  const DualVector g = gravity_wrench(to_dual(c), bp);
  CHECK(g.real.norm() == 0.0);
  CHECK((g.dual - c.q.to_rotation_matrix().transpose() * Vec3(0, 0, 2.0 * 9.81)).norm() < 1e-14);
}

TEST_CASE("invalid body parameters are rejected") {
  CHECK_THROWS_AS(BodyParams(0.0, Mat3::Identity()), std::invalid_argument);
  CHECK_THROWS_AS(BodyParams(1.0, -Mat3::Identity()), std::invalid_argument);
  Mat3 asym = Mat3::Identity();
  asym(0, 1) = 0.1;
  CHECK_THROWS_AS(BodyParams(1.0, asym), std::invalid_argument);
}

TEST_CASE("classic and dual integrators agree under matched wrenches") {
  test::Rng rng(21);
  for (int trial = 0; trial < 5; ++trial) {
    const BodyParams bp = rng.body();
    const Vec3 a = rng.vec(0.02), b = rng.vec(0.02);
    const ClassicInput ci = [&](double t, const ClassicState&) {
      return std::pair<double, Vec3>{bp.mass() * 9.81 * (1.0 + 0.2 * std::sin(2.0 * t)), a * std::cos(t) + b * std::sin(3.0 * t)};
    };
    const DualInput di = [&](double t, const DualState& s) {
      const auto [f, tau] = ci(t, to_classic(s));
      return thrust_torque_wrench(f, tau);
    };
    ClassicState c = random_classic(rng);
    DualState d = to_dual(c);
    for (int k = 0; k < 1000; ++k) {
      c = rk4_classic(c, k * 1e-3, 1e-3, ci, bp);
      d = rk4_dual(d, k * 1e-3, 1e-3, di, bp);
    }
    const ClassicState dc = to_classic(d);
    CHECK((dc.p - c.p).norm() < 1e-6);
    CHECK(quat_log(c.q.conjugate() * dc.q).norm() < 1e-6);
    CHECK((dc.w - c.w).norm() < 1e-6);
  }
}

TEST_CASE("torque-free tumbling conserves energy and world angular momentum") {
  test::Rng rng(22);
  const BodyParams bp(1.0, rng.inertia(), 0.0);
  DualState d;
  d.pose = dq_from_pose(rng.rotation(), Vec3::Zero());
  d.twist = {rng.vec(4.0), rng.vec(1.0)};
  const DualInertia m(bp);
  const double e0 = m.kinetic_energy(d.twist);
  const Vec3 l0 = quat_rotate(d.pose.rotation(), bp.inertia() * d.twist.real);
  const DualInput zero = [](double, const DualState&) { return DualVector{}; };
  for (int k = 0; k < 2000; ++k) d = rk4_dual(d, k * 1e-3, 1e-3, zero, bp);
  CHECK(m.kinetic_energy(d.twist) == doctest::Approx(e0).epsilon(1e-9));
  CHECK((quat_rotate(d.pose.rotation(), bp.inertia() * d.twist.real) - l0).norm() < 1e-8);
  CHECK(d.pose.norm_violation() < 1e-14);
  CHECK(d.pose.orthogonality_violation() < 1e-14);
}

TEST_CASE("free fall follows the parabola; hover thrust holds position") {
  const BodyParams bp(1.5, Mat3::Identity() * 0.01);
  ClassicState c;
  c.v = Vec3(1.0, -0.5, 0.2);
  DualState d = to_dual(c);
  const DualInput none = [](double, const DualState&) { return DualVector{}; };
  for (int k = 0; k < 500; ++k) d = rk4_dual(d, k * 1e-3, 1e-3, none, bp);
  const double t = 0.5;
  CHECK((d.pose.translation() - (c.v * t + 0.5 * 9.81 * t * t * kUnitZ)).norm() < 1e-12);

  DualState h;
  const DualInput hover = [&](double, const DualState&) { return thrust_torque_wrench(bp.mass() * 9.81, Vec3::Zero()); };
  for (int k = 0; k < 500; ++k) h = rk4_dual(h, k * 1e-3, 1e-3, hover, bp);
  CHECK(h.pose.translation().norm() < 1e-13);
}

TEST_CASE("saturation clips each component; zero limits disable it") {
  const DualVector w{Vec3(1.0, -2.0, 0.5), Vec3(10.0, -30.0, 5.0)};
  const DualVector s = saturate(w, {0.8, 20.0});
  CHECK((s.real - Vec3(0.8, -0.8, 0.5)).norm() == 0.0);
  CHECK((s.dual - Vec3(10.0, -20.0, 5.0)).norm() == 0.0);
  const DualVector u = saturate(w, {});
  CHECK((u.real - w.real).norm() == 0.0);
  CHECK((u.dual - w.dual).norm() == 0.0);
}
