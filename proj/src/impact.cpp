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

#include "dqr/impact.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dqr/impact_kernels.hpp"

namespace dqr {

void ContactSpec::validate() const {
  if (!r_c.allFinite()) throw std::invalid_argument("ContactSpec: non-finite contact point");
  if (std::abs(n.norm() - 1.0) > 1e-9) throw std::invalid_argument("ContactSpec: normal is not unit");
  if (!(e >= 0.0 && e < 1.0)) throw std::invalid_argument("ContactSpec: restitution must lie in [0, 1)");
  if (!(mu >= 0.0) || !std::isfinite(mu)) throw std::invalid_argument("ContactSpec: friction must be >= 0");
}

Vec3 contact_point_velocity(const DualVector& twist, const Vec3& r_c) {
  return twist.dual + twist.real.cross(r_c);
}

std::optional<Vec3> tangent_direction(const DualVector& twist, const Vec3& r_c, const Vec3& n_b,
                                      double slip_threshold) {
  const Vec3 v_c = contact_point_velocity(twist, r_c);
  const Vec3 tangential = v_c - v_c.dot(n_b) * n_b;
  const double speed = tangential.norm();
  if (speed < slip_threshold) return std::nullopt;
  return tangential / speed;
}

namespace {

void require_approaching(double closing, const ImpactOptions& opt) {
  if (!(closing < -opt.resting)) {
    throw SeparatingContactError("impulse requested for a non-approaching contact (closing speed " +
                                 std::to_string(closing) + " m/s)");
  }
}

// Body-frame assembly shared by the dual-quaternion models: Ŵ = Λ ŝ_n + F_t ŝ_t.
void assemble_body(ImpulseResult& r, const Vec3& n_b, const std::optional<Vec3>& t_b, double friction,
                   const DualVector& twist, const UnitQuaternion& q, const DualInertia& m,
                   const ImpactOptions& opt) {
  r.normal_screw = screw_from_contact(r.contact_point, n_b);
  r.friction_screw = t_b ? screw_from_contact(r.contact_point, -*t_b) : DualVector{};
  r.mu_effective = r.impulse > 0.0 ? friction / r.impulse : 0.0;
  r.wrench = r.impulse * r.normal_screw + friction * r.friction_screw;
  r.lambda_body = r.wrench.dual;
  r.lambda_world = quat_rotate(q, r.lambda_body);
  if (t_b && friction > 0.0) {
    const DualVector after = twist + m.apply_inverse(r.wrench);
    r.slip_reversed = contact_point_velocity(after, r.contact_point).dot(*t_b) < -opt.slip;
  }
}

}  // namespace

ImpulseResult impulse_dq(const DualVector& twist, const ContactSpec& c, const UnitQuaternion& q,
                         const DualInertia& m, const ImpactOptions& opt) {
  c.validate();
  const Vec3 n_b = quat_rotate(q.conjugate(), c.n);
  const auto mag = dq_impulse_magnitude<double>(twist, c.r_c, n_b, m.J_inv, m.m_inv, c.e);
  require_approaching(mag.closing_speed, opt);

  ImpulseResult r;
  r.impulse = mag.impulse;
  r.inverse_mass = mag.inverse_mass;
  r.closing_speed = mag.closing_speed;
  r.contact_point = c.r_c;

  const auto t_b = tangent_direction(twist, c.r_c, n_b, opt.slip);
  double friction = 0.0;
  if (t_b && c.mu > 0.0) {
    friction = c.mu * r.impulse;
    if (opt.friction == FrictionLaw::kCoulombCapped) {
      // Slip remaining after the normal impulse alone, and the impulse that stops it.
      const DualVector s_n = screw_from_contact(c.r_c, n_b);
      const DualVector s_t = screw_from_contact(c.r_c, -*t_b);
      const double slip = -dual_dot(twist + r.impulse * m.apply_inverse(s_n), s_t);
      const double stick = std::max(slip, 0.0) / dual_dot(m.apply_inverse(s_t), s_t);
      if (stick < friction) {
        friction = stick;
        r.friction_capped = true;
      }
    }
  }
  assemble_body(r, n_b, t_b, friction, twist, q, m, opt);
  return r;
}

ImpulseResult impulse_matrix(const ClassicState& s, const ContactSpec& c, const BodyParams& bp,
                             const ImpactOptions& opt) {
  c.validate();
  const Mat3 rot = s.q.to_rotation_matrix();
  const Mat3& j_inv = bp.inertia_inverse();
  const double m_inv = 1.0 / bp.mass();
  const Vec3 n_b = rot.transpose() * c.n;
  const auto mag = matrix_impulse_magnitude<double>(s.v, s.w, rot, c.r_c, c.n, n_b, j_inv, m_inv, c.e);
  require_approaching(mag.closing_speed, opt);

  ImpulseResult r;
  r.impulse = mag.impulse;
  r.inverse_mass = mag.inverse_mass;
  r.closing_speed = mag.closing_speed;
  r.contact_point = c.r_c;

  // Contact-point velocity change produced by a world-frame impulse λ.
  auto response = [&](const Vec3& lambda) -> Vec3 {
    return m_inv * lambda + rot * (j_inv * c.r_c.cross(rot.transpose() * lambda)).cross(c.r_c);
  };

  const Vec3 v_c = s.v + rot * s.w.cross(c.r_c);
  const Vec3 tangential = v_c - v_c.dot(c.n) * c.n;
  const bool slipping = tangential.norm() >= opt.slip;
  const Vec3 t = slipping ? Vec3(tangential.normalized()) : Vec3::Zero();

  double friction = 0.0;
  if (slipping && c.mu > 0.0) {
    friction = c.mu * r.impulse;
    if (opt.friction == FrictionLaw::kCoulombCapped) {
      const double slip = (v_c + r.impulse * response(c.n)).dot(t);
      const double stick = std::max(slip, 0.0) / t.dot(response(t));
      if (stick < friction) {
        friction = stick;
        r.friction_capped = true;
      }
    }
  }
  r.mu_effective = friction / r.impulse;
  r.lambda_world = r.impulse * c.n - friction * t;
  r.lambda_body = rot.transpose() * r.lambda_world;
  r.wrench = {c.r_c.cross(r.lambda_body), r.lambda_body};
  r.normal_screw = screw_from_contact(c.r_c, n_b);
  if (slipping) {
    const Vec3 t_b = rot.transpose() * t;
    r.friction_screw = {c.r_c.cross(-t_b), -t_b};
    if (friction > 0.0) {
      const auto after = reset_matrix(s, r, bp);
      r.slip_reversed = (after.v + rot * after.w.cross(c.r_c)).dot(t) < -opt.slip;
    }
  }
  return r;
}

ImpulseResult impulse_coupled_oracle(const DualVector& twist, const ContactSpec& c, const UnitQuaternion& q,
                                     const DualInertia& m, const ImpactOptions& opt) {
  c.validate();
  const Vec3 n_b = quat_rotate(q.conjugate(), c.n);
  const DualVector s_n = screw_from_contact(c.r_c, n_b);
  const double closing = dual_dot(twist, s_n);
  require_approaching(closing, opt);

  const auto t_b = tangent_direction(twist, c.r_c, n_b, opt.slip);
  const double mu = t_b ? c.mu : 0.0;
  const DualVector s_t = t_b ? screw_from_contact(c.r_c, -*t_b) : DualVector{};

  const double a_nn = dual_dot(m.apply_inverse(s_n), s_n);
  const double a_tn = dual_dot(m.apply_inverse(s_t), s_n);
  const double a_tt = dual_dot(m.apply_inverse(s_t), s_t);
  const double denom = a_nn + mu * a_tn;
  if (!(denom > 0.0)) {
    throw std::domain_error("impulse_coupled_oracle: non-positive coupled effective inverse mass");
  }

  ImpulseResult r;
  r.impulse = -(1.0 + c.e) * closing / denom;
  double friction = mu * r.impulse;

  if (opt.friction == FrictionLaw::kCoulombCapped && mu > 0.0) {
    // Velocity along ŝ_t after the impact; positive means the slip reversed.
    const double v_t = dual_dot(twist, s_t) + r.impulse * a_tn + friction * a_tt;
    if (v_t > 0.0) {
      // Sticking: restitution along ŝ_n and zero slip along ŝ_t.
      const double det = a_nn * a_tt - a_tn * a_tn;
      const double rhs_n = -(1.0 + c.e) * closing;
      const double rhs_t = -dual_dot(twist, s_t);
      const double impulse = (rhs_n * a_tt - rhs_t * a_tn) / det;
      const double stick = (rhs_t * a_nn - rhs_n * a_tn) / det;
      if (!(det > 0.0 && impulse >= 0.0 && stick >= 0.0 && stick <= mu * impulse)) {
        throw std::domain_error("impulse_coupled_oracle: no consistent sliding or sticking solution");
      }
      r.impulse = impulse;
      friction = stick;
      r.friction_capped = true;
    }
  }
  r.inverse_mass = a_nn;
  r.closing_speed = closing;
  r.contact_point = c.r_c;
  assemble_body(r, n_b, t_b, friction, twist, q, m, opt);
  return r;
}

DualVector reset_dq(const DualVector& twist, const ImpulseResult& imp, const DualInertia& m) {
  return twist + m.apply_inverse(imp.wrench);
}

ClassicVelocities reset_matrix(const ClassicState& s, const ImpulseResult& imp, const BodyParams& bp) {
  const Mat3 rot = s.q.to_rotation_matrix();
  return {s.v + imp.lambda_world / bp.mass(),
          s.w + bp.inertia_inverse() * imp.contact_point.cross(rot.transpose() * imp.lambda_world)};
}

}  // namespace dqr
