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

#include "dqr/equivalence.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>

#include "dqr/impact.hpp"

namespace dqr {

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-12); }
double rel(const Vec3& a, const Vec3& b) { return (a - b).norm() / std::max(b.norm(), 1e-12); }

}  // namespace

double EquivalenceReport::worst() const { return std::max({max_rho, max_lambda, max_dv, max_dw}); }

EquivalenceReport run_equivalence(std::size_t samples, std::uint64_t seed, double fault_scale) {
  if (samples == 0) throw std::invalid_argument("run_equivalence: samples must be > 0");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  auto vec = [&](double s) -> Vec3 { return Vec3(u(rng), u(rng), u(rng)) * s; };

  EquivalenceReport rep;
  while (rep.samples < samples) {
    const Mat3 rj = quat_exp(vec(3.0)).to_rotation_matrix();
    const Vec3 d(0.005 + 0.05 * u01(rng), 0.005 + 0.05 * u01(rng), 0.005 + 0.05 * u01(rng));
    Mat3 j = rj * d.asDiagonal() * rj.transpose();
    j = 0.5 * (j + j.transpose()).eval();
    const double mass = 0.5 + 1.5 * u01(rng);
    const BodyParams bp(mass, j);
    const BodyParams bp_matrix(mass, fault_scale * j);
    const DualInertia m(bp);

    DualState x;
    x.pose = dq_from_pose(quat_exp(vec(3.0)), vec(2.0));
    x.twist = {vec(10.0), vec(3.0)};
    ContactSpec c;
    c.r_c = vec(0.3);
    c.n = vec(1.0).normalized();
    c.e = 0.999 * u01(rng);
    c.mu = u01(rng);
    const UnitQuaternion q = x.pose.rotation();
    if (dual_dot(x.twist, screw_from_contact(c.r_c, quat_rotate(q.conjugate(), c.n))) >= -1e-3) continue;

    const ImpulseResult a = impulse_dq(x.twist, c, q, m);
    const DualVector xi = reset_dq(x.twist, a, m);
    const ClassicState s = to_classic(x);
    const ImpulseResult b = impulse_matrix(s, c, bp_matrix);
    const ClassicVelocities post = reset_matrix(s, b, bp_matrix);

    const Vec3 dv_dq = quat_rotate(q, xi.dual - x.twist.dual);
    const Vec3 dw_dq = xi.real - x.twist.real;
    rep.max_rho = std::max(rep.max_rho, rel(a.inverse_mass, b.inverse_mass));
    rep.max_lambda = std::max(rep.max_lambda, rel(a.impulse, b.impulse));
    rep.max_dv = std::max(rep.max_dv, rel(dv_dq, Vec3(post.v - s.v)));
    rep.max_dw = std::max(rep.max_dw, rel(dw_dq, Vec3(post.w - s.w)));
    ++rep.samples;
  }
  return rep;
}

}  // namespace dqr
