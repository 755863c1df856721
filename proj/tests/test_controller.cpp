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
#include "dqr/controller.hpp"
#include "support.hpp"

using namespace dqr;

namespace {

double dq_distance(const UnitDualQuaternion& a, const UnitDualQuaternion& b) {
  auto c = [](const Quaternion& q) { return Eigen::Vector4d(q.w, q.x, q.y, q.z); };
  const DualQuaternion x = a.raw(), y = b.raw();
  const double s = c(x.real).dot(c(y.real)) < 0.0 ? -1.0 : 1.0;
  return (c(x.real) - s * c(y.real)).norm() + (c(x.dual) - s * c(y.dual)).norm();
}

}  // namespace

TEST_CASE("zero error at rest: V = 0 and the wrench only cancels gravity") {
  test::Rng rng(40);
  const BodyParams bp = rng.body();
  const DualInertia m(bp);
  const ControllerGains g;
  DualState s;
  s.pose = dq_from_pose(rng.rotation(), rng.vec(1.0));
  const PoseError err = pose_error(s.pose, s.pose);
  CHECK(err.q_e_w == doctest::Approx(1.0));
  CHECK(err.p_e.norm() < 1e-14);
  const LyapunovSample l = lyapunov(s, err, g, m);
  CHECK(std::abs(l.V) < 1e-14);
  const DualVector w = control_wrench(s, err, g, m, bp);
  const DualVector fg = gravity_wrench(s, bp);
  CHECK((w.real + fg.real).norm() < 1e-12);
  CHECK((w.dual + fg.dual).norm() < 1e-12);
  const DualDerivative d = dual_derivative(s, w, bp);
  CHECK(d.twist_dot.real.norm() < 1e-12);
  CHECK(d.twist_dot.dual.norm() < 1e-12);
}

TEST_CASE("V decreases at -<xi, K_d xi> along the closed loop") {
  test::Rng rng(41);
  const ControllerGains g;
  for (int i = 0; i < 50; ++i) {
    const BodyParams bp = rng.body();
    const DualInertia m(bp);
    const UnitDualQuaternion q_d = dq_from_pose(rng.rotation(), rng.vec(1.0));
    DualState s;
    s.pose = dq_mul(q_d, dq_exp(DualVector{rng.vec(0.8), rng.vec(0.5)}));
    s.twist = {rng.vec(2.0), rng.vec(1.0)};
    const DualInput law = [&](double, const DualState& x) { return control_wrench(x, pose_error(q_d, x.pose), g, m, bp); };
    const double h = 1e-4;
    const DualState fwd = rk4_dual(s, 0.0, h, law, bp);
    const DualState back = rk4_dual(s, 0.0, -h, law, bp);
    const double v_fwd = lyapunov(fwd, pose_error(q_d, fwd.pose), g, m).V;
    const double v_back = lyapunov(back, pose_error(q_d, back.pose), g, m).V;
    const LyapunovSample l = lyapunov(s, pose_error(q_d, s.pose), g, m);
    CHECK(l.Vdot <= 0.0);
    CHECK((v_fwd - v_back) / (2.0 * h) == doctest::Approx(l.Vdot).epsilon(1e-5));
  }
}

TEST_CASE("latched setpoint puts the post-impact error at q_delta*") {
  test::Rng rng(42);
  const ControllerGains g;
  for (int i = 0; i < 100; ++i) {
    const UnitDualQuaternion pose = dq_from_pose(rng.rotation(), rng.vec(1.0));
    const DualVector xi{rng.vec(5.0), rng.vec(3.0)};
    const RecoverySetpoint sp = make_setpoint(xi, pose, g, 0.25);
    CHECK(sp.t_c == 0.25);
    CHECK(sp.delta.real.isApprox(g.Gamma.A * xi.real));
    CHECK(sp.delta.dual.isApprox(g.Gamma.B * xi.dual));
    CHECK(dq_distance(pose_error(sp.q_d, pose).q_e, dq_conjugate(sp.q_delta)) < 1e-12);
  }
}

TEST_CASE("jump certificate: three forms of the kinetic change agree without friction") {
  test::Rng rng(43);
  const ControllerGains g;
  for (int i = 0; i < 500; ++i) {
    const BodyParams bp = rng.body();
    const DualInertia m(bp);
    const DualState s = rng.state();
    ContactSpec c = rng.approaching(s, 0.0);
    const ImpulseResult imp = impulse_dq(s.twist, c, s.pose.rotation(), m);
    const DualVector after = reset_dq(s.twist, imp, m);
    const PoseError err = pose_error(dq_from_pose(UnitQuaternion(), Vec3::Zero()), s.pose);
    const JumpCertificate cert = jump_certificate(s.twist, after, imp, m, g, err, c.e);
    const double scale = std::max(1.0, m.kinetic_energy(s.twist));
    CHECK(std::abs(cert.dV_kin - cert.dV_kin_expanded) < 1e-10 * scale);
    CHECK(std::abs(cert.dV_kin - cert.dV_kin_normal) < 1e-10 * scale);
    CHECK(cert.E_diss >= -1e-12 * scale);
    CHECK(cert.budget == doctest::Approx(cert.E_diss + potential_energy(err, g)));
  }
}

TEST_CASE("gain bounds follow the energy split and clamping keeps injection inside the budget") {
  ControllerGains g;
  g.k_q = 2.0;
  g.k_p = 3.0;
  g.alpha = 0.25;
  const Vec3 w(0.0, 3.0, 4.0), v(1.0, 2.0, 2.0);
  const GainBounds b = gain_bounds(w, v, 6.0, g);
  CHECK(b.gamma_w_max == doctest::Approx(std::sqrt(4.0 * 0.25 * 6.0 / (2.0 * 25.0))));
  CHECK(b.gamma_v_max == doctest::Approx(std::sqrt(2.0 * 0.75 * 6.0 / (3.0 * 9.0))));
  const GainBounds still = gain_bounds(Vec3::Zero(), Vec3::Zero(), 6.0, g);
  CHECK(still.gamma_w_max == g.max_gamma);
  CHECK(still.gamma_v_max == g.max_gamma);
  CHECK(gain_bounds(w, v, -1.0, g).gamma_w_max == 0.0);

  const DualMatrix inside = DualMatrix::diagonal({0.01, 0.02, 0.03}, {0.01, 0.02, 0.03});
  const DualMatrix same = clamp_admittance(inside, b);
  CHECK(same.A == inside.A);
  CHECK(same.B == inside.B);
  const DualMatrix big = DualMatrix::diagonal({1.0, 2.0, 4.0}, {5.0, 1.0, 1.0});
  const DualMatrix cl = clamp_admittance(big, b, 0.9);
  CHECK(cl.A.diagonal().maxCoeff() == doctest::Approx(0.9 * b.gamma_w_max));
  CHECK(cl.B.diagonal().maxCoeff() == doctest::Approx(0.9 * b.gamma_v_max));
  CHECK(cl.A(0, 0) / cl.A(2, 2) == doctest::Approx(0.25));

  // Exact post-latch potential <= quadratic injection estimate <= budget.
  test::Rng rng(44);
  for (int i = 0; i < 500; ++i) {
    ControllerGains gi;
    const DualVector xi{rng.vec(10.0), rng.vec(3.0)};
    const double budget = rng.uniform(0.01, 5.0);
    gi.Gamma = clamp_admittance(DualMatrix::diagonal(rng.vec(1.0).cwiseAbs(), rng.vec(1.0).cwiseAbs()),
                                gain_bounds(xi.real, xi.dual, budget, gi));
    const DualVector delta = braking_displacement(xi, gi.Gamma);
    const double injected = 0.25 * gi.k_q * delta.real.squaredNorm() + 0.5 * gi.k_p * delta.dual.squaredNorm();
    const UnitDualQuaternion pose = dq_from_pose(rng.rotation(), rng.vec(1.0));
    const double exact = potential_energy(pose_error(make_setpoint(xi, pose, gi).q_d, pose), gi);
    CHECK(exact <= injected + 1e-12);
    CHECK(injected < budget);
  }
}

TEST_CASE("gain validation") {
  ControllerGains g;
  CHECK_NOTHROW(g.validate());
  g.alpha = 1.0;
  CHECK_THROWS_AS(g.validate(), std::invalid_argument);
  g = {};
  g.k_p = 0.0;
  CHECK_THROWS_AS(g.validate(), std::invalid_argument);
  g = {};
  g.K_d.A(0, 1) = 0.1;
  CHECK_THROWS_AS(g.validate(), std::invalid_argument);
  g = {};
  g.Gamma.B(2, 2) = -0.1;
  CHECK_THROWS_AS(g.validate(), std::invalid_argument);
}

TEST_CASE("baseline holds hover with thrust m g and no torque") {
  const BodyParams bp(1.3, Mat3::Identity() * 0.01);
  ClassicState s;
  s.q = UnitQuaternion::from_axis_angle(kUnitZ, 0.7);
  s.p = Vec3(0.1, 0.2, -1.0);
  BaselineSetpoint sp{s.p, s.q};
  const auto [f, tau] = baseline_control(s, sp, BaselineGains{}, bp);
  CHECK(f == doctest::Approx(1.3 * bp.gravity()));
  CHECK(tau.norm() < 1e-12);

  // Commanded tilt is limited.
  BaselineGains tight;
  tight.max_tilt = 0.1;
  sp.p_d = s.p + Vec3(100.0, 0.0, 0.0);
  const auto [f2, tau2] = baseline_control(s, sp, tight, bp);
  CHECK(f2 > 0.0);
  CHECK(f2 <= 1.3 * bp.gravity() / std::cos(0.1) * (1.0 + 1e-12));
  CHECK(tau2.norm() > 0.0);
}

TEST_CASE("controller phases: approach, recovery on impact, hover after the hold") {
  const BodyParams bp(1.0, Mat3::Identity() * 0.01);
  const UnitDualQuaternion hover = dq_from_pose(UnitQuaternion(), Vec3::Zero());
  ControllerConfig cfg;
  cfg.hold_time = 1.0;
  RecoveryController ctl(cfg, bp, hover);
  CHECK(ctl.phase() == ControlPhase::kApproach);
  CHECK_FALSE(ctl.dissipation_rate(DualState{}).has_value());

  DualState pre;
  pre.pose = dq_from_pose(UnitQuaternion(), Vec3(0.3, 0.0, 0.0));
  pre.twist = {Vec3::Zero(), Vec3(2.0, 0.0, 0.0)};
  ContactSpec c;
  c.r_c = Vec3(0.1, 0.1, 0.0);
  c.n = -Vec3::UnitX();
  c.e = 0.5;
  c.mu = 0.3;
  const DualInertia m(bp);
  const ImpulseResult imp = impulse_dq(pre.twist, c, pre.pose.rotation(), m);
  DualState post = pre;
  post.twist = reset_dq(pre.twist, imp, m);
  const auto latch = ctl.on_impact(2.0, pre, post, imp, c.e);
  CHECK(ctl.phase() == ControlPhase::kRecovery);
  CHECK(latch.certificate.ok);
  CHECK(latch.certificate.injected < latch.certificate.budget);
  CHECK(dq_distance(ctl.reference(), make_setpoint(post.twist, post.pose, [&] {
                                       ControllerGains g = cfg.gains;
                                       g.Gamma = latch.gamma;
                                       return g;
                                     }()).q_d) < 1e-12);
  CHECK(ctl.dissipation_rate(post).has_value());

  CHECK_FALSE(ctl.update(2.5));
  CHECK(ctl.update(3.0));
  CHECK(ctl.phase() == ControlPhase::kHover);
  CHECK(dq_distance(ctl.reference(), hover) < 1e-15);
  CHECK_FALSE(ctl.update(4.0));
}
