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

#include "dqr/controller.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dqr {

void ControllerGains::validate() const {
  if (!(k_q > 0.0) || !(k_p > 0.0)) throw std::invalid_argument("ControllerGains: k_q and k_p must be > 0");
  if (!K_d.is_positive_diagonal()) throw std::invalid_argument("ControllerGains: K_d must be positive diagonal");
  if (!Gamma.is_positive_diagonal()) throw std::invalid_argument("ControllerGains: Gamma must be positive diagonal");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("ControllerGains: alpha must lie in (0, 1)");
  if (!(max_gamma > 0.0)) throw std::invalid_argument("ControllerGains: max_gamma must be > 0");
}

DualVector braking_displacement(const DualVector& xi_plus, const DualMatrix& gamma) {
  return dual_matrix_apply(gamma, xi_plus);
}

RecoverySetpoint make_setpoint(const DualVector& xi_plus, const UnitDualQuaternion& pose_at_impact,
                               const ControllerGains& gains, double t_c) {
  RecoverySetpoint sp;
  sp.delta = braking_displacement(xi_plus, gains.Gamma);
  sp.q_delta = dq_exp(sp.delta);
  sp.q_d = dq_mul(pose_at_impact, sp.q_delta);
  sp.t_c = t_c;
  return sp;
}

PoseError pose_error(const UnitDualQuaternion& q_d, const UnitDualQuaternion& q) {
  DualQuaternion e = dq_mul(dq_conjugate(q_d), q).raw();
  if (e.real.w < 0.0) e = e * -1.0;
  PoseError out;
  out.q_e = UnitDualQuaternion::normalized(e);
  out.q_e_w = out.q_e.rotation().w();
  out.q_e_vec = out.q_e.rotation().vec();
  out.p_e = out.q_e.translation();
  return out;
}

DualVector error_wrench(const PoseError& err, const ControllerGains& gains) {
  return {gains.k_q * err.q_e_vec, gains.k_p * quat_rotate(err.q_e.rotation().conjugate(), err.p_e)};
}

DualVector control_wrench(const DualState& s, const PoseError& err, const ControllerGains& gains,
                          const DualInertia& m, const BodyParams& bp) {
  const DualVector gyro = dual_cross_adjoint(s.twist, m.apply(s.twist));
  return -gravity_wrench(s, bp) + gyro - error_wrench(err, gains) - dual_matrix_apply(gains.K_d, s.twist);
}

double potential_energy(const PoseError& err, const ControllerGains& gains) {
  return 2.0 * gains.k_q * (1.0 - err.q_e_w) + 0.5 * gains.k_p * err.p_e.squaredNorm();
}

LyapunovSample lyapunov(const DualState& s, const PoseError& err, const ControllerGains& gains,
                        const DualInertia& m) {
  LyapunovSample out;
  out.V_pos = potential_energy(err, gains);
  out.V_kin = m.kinetic_energy(s.twist);
  out.V = out.V_pos + out.V_kin;
  out.Vdot = -dual_dot(s.twist, dual_matrix_apply(gains.K_d, s.twist));
  return out;
}

JumpCertificate jump_certificate(const DualVector& xi_minus, const DualVector& xi_plus,
                                 const ImpulseResult& imp, const DualInertia& m, const ControllerGains& gains,
                                 const PoseError& pre_error, double restitution) {
  JumpCertificate c;
  c.dV_kin = m.kinetic_energy(xi_plus) - m.kinetic_energy(xi_minus);
  c.dV_kin_expanded =
      dual_dot(xi_minus, imp.wrench) + 0.5 * dual_dot(imp.wrench, m.apply_inverse(imp.wrench));
  c.dV_kin_normal =
      -0.5 * imp.impulse * imp.impulse * imp.inverse_mass * (1.0 - restitution) / (1.0 + restitution);
  c.E_diss = -c.dV_kin;
  c.V_pos_pre = potential_energy(pre_error, gains);
  const DualVector delta = braking_displacement(xi_plus, gains.Gamma);
  c.injected = 0.25 * gains.k_q * delta.real.squaredNorm() + 0.5 * gains.k_p * delta.dual.squaredNorm();
  c.budget = c.E_diss + c.V_pos_pre;
  c.ok = c.injected < c.budget;
  return c;
}

GainBounds gain_bounds(const Vec3& w_plus, const Vec3& v_b_plus, double e_budget, const ControllerGains& gains) {
  constexpr double kZero = 1e-12;
  const double e = std::max(e_budget, 0.0);
  GainBounds b;
  const double w2 = w_plus.squaredNorm();
  const double v2 = v_b_plus.squaredNorm();
  b.gamma_w_max = w2 > kZero * kZero ? std::sqrt(4.0 * gains.alpha * e / (gains.k_q * w2)) : gains.max_gamma;
  b.gamma_v_max =
      v2 > kZero * kZero ? std::sqrt(2.0 * (1.0 - gains.alpha) * e / (gains.k_p * v2)) : gains.max_gamma;
  return b;
}

DualMatrix clamp_admittance(const DualMatrix& gamma, const GainBounds& bounds, double margin) {
  auto clamp_block = [margin](const Mat3& g, double bound) -> Mat3 {
    const double top = g.diagonal().maxCoeff();
    const double limit = margin * bound;
    return top > limit ? Mat3(g * (limit / top)) : g;
  };
  return {clamp_block(gamma.A, bounds.gamma_w_max), clamp_block(gamma.B, bounds.gamma_v_max)};
}

BaselineSetpoint make_baseline_setpoint(const ClassicState& post_impact, const DualMatrix& gamma) {
  return {post_impact.p + gamma.B * post_impact.v, post_impact.q * quat_exp(gamma.A * post_impact.w)};
}

std::pair<double, Vec3> baseline_control(const ClassicState& s, const BaselineSetpoint& sp,
                                         const BaselineGains& gains, const BodyParams& bp) {
  const double m = bp.mass();
  // Thrust force to command in the world frame (z down, thrust along −b3).
  Vec3 thrust = -gains.k_p * (s.p - sp.p_d) - gains.k_d * s.v - m * bp.gravity() * kUnitZ;

  const double up = -thrust.z();
  const Vec3 lateral(thrust.x(), thrust.y(), 0.0);
  if (up > 0.0 && lateral.norm() > up * std::tan(gains.max_tilt)) {
    thrust.head<2>() *= up * std::tan(gains.max_tilt) / lateral.norm();
  }

  const Mat3 rot = s.q.to_rotation_matrix();
  const Vec3 b3_now = rot.col(2);
  const double norm = thrust.norm();
  const Vec3 b3 = norm > 1e-9 ? Vec3(-thrust / norm) : b3_now;
  const double f = std::max(0.0, -thrust.dot(b3_now));

  const Vec3 heading = sp.q_d.to_rotation_matrix().col(0);
  Vec3 b2 = b3.cross(heading);
  if (b2.norm() < 1e-6) b2 = b3.cross(Vec3::UnitY());
  b2.normalize();
  Mat3 r_des;
  r_des.col(0) = b2.cross(b3);
  r_des.col(1) = b2;
  r_des.col(2) = b3;
  const Eigen::Quaterniond qd(r_des);
  const Quaternion q_des{qd.w(), qd.x(), qd.y(), qd.z()};

  Quaternion err = quat_mul(q_des.conjugate(), s.q.q());
  if (err.w < 0.0) err = -err;
  const Vec3 tau = -gains.k_att * err.vec() - gains.k_rate.cwiseProduct(s.w) + s.w.cross(bp.inertia() * s.w);
  return {f, tau};
}

RecoveryController::RecoveryController(const ControllerConfig& cfg, const BodyParams& bp,
                                       const UnitDualQuaternion& hover)
    : cfg_(cfg), bp_(bp), m_(bp), hover_(hover), reference_(hover) {
  cfg_.gains.validate();
  if (!(cfg_.hold_time >= 0.0)) throw std::invalid_argument("RecoveryController: hold_time must be >= 0");
  const Pose p = dq_to_pose(hover);
  baseline_sp_ = {p.position, p.rotation};
  if (!cfg_.approach_open_loop) phase_ = ControlPhase::kHover;
}

DualVector RecoveryController::wrench(const DualState& s) const {
  DualVector out;
  if (cfg_.kind == ControllerKind::kNone) {
    return out;
  } else if (phase_ == ControlPhase::kApproach) {
    out = -gravity_wrench(s, bp_) + dual_cross_adjoint(s.twist, m_.apply(s.twist));
  } else if (cfg_.kind == ControllerKind::kDualQuaternion) {
    out = control_wrench(s, pose_error(reference_, s.pose), cfg_.gains, m_, bp_);
  } else {
    const auto [f, tau] = baseline_control(to_classic(s), baseline_sp_, cfg_.baseline, bp_);
    out = thrust_torque_wrench(f, tau);
  }
  return saturate(out, cfg_.limits);
}

std::optional<double> RecoveryController::dissipation_rate(const DualState& s) const {
  const bool saturating = cfg_.limits.max_force > 0.0 || cfg_.limits.max_torque > 0.0;
  if (phase_ == ControlPhase::kApproach || cfg_.kind != ControllerKind::kDualQuaternion || saturating) {
    return std::nullopt;
  }
  return dual_dot(s.twist, dual_matrix_apply(cfg_.gains.K_d, s.twist));
}

LyapunovSample RecoveryController::lyapunov(const DualState& s) const {
  return dqr::lyapunov(s, pose_error(reference_, s.pose), cfg_.gains, m_);
}

RecoveryController::LatchResult RecoveryController::on_impact(double t_c, const DualState& pre,
                                                              const DualState& post, const ImpulseResult& imp,
                                                              double restitution) {
  const PoseError pre_err = pose_error(reference_, pre.pose);
  ControllerGains used = cfg_.gains;
  LatchResult out;
  if (cfg_.clamp_gamma) {
    const double budget = m_.kinetic_energy(pre.twist) - m_.kinetic_energy(post.twist) +
                          potential_energy(pre_err, cfg_.gains);
    const DualMatrix clamped =
        clamp_admittance(used.Gamma, gain_bounds(post.twist.real, post.twist.dual, budget, used));
    out.gamma_clamped = !(clamped.A == used.Gamma.A && clamped.B == used.Gamma.B);
    used.Gamma = clamped;
  }
  out.gamma = used.Gamma;
  out.certificate = jump_certificate(pre.twist, post.twist, imp, m_, used, pre_err, restitution);

  if (cfg_.kind != ControllerKind::kBaseline) {
    reference_ = make_setpoint(post.twist, post.pose, used, t_c).q_d;
  } else {
    baseline_sp_ = make_baseline_setpoint(to_classic(post), used.Gamma);
    reference_ = dq_from_pose(baseline_sp_.q_d, baseline_sp_.p_d);
  }
  phase_ = ControlPhase::kRecovery;
  release_time_ = t_c + cfg_.hold_time;
  return out;
}

bool RecoveryController::update(double t) {
  if (phase_ != ControlPhase::kRecovery || t < release_time_) return false;
  phase_ = ControlPhase::kHover;
  reference_ = hover_;
  const Pose p = dq_to_pose(hover_);
  baseline_sp_ = {p.position, p.rotation};
  return true;
}

}  // namespace dqr
