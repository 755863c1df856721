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

#include "dqr/hybridsim.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace dqr {

void WorldGeometry::validate() const {
  if (std::abs(n.norm() - 1.0) > 1e-9) throw std::invalid_argument("WorldGeometry: plane normal is not unit");
  if (!std::isfinite(d)) throw std::invalid_argument("WorldGeometry: non-finite plane offset");
  if (sphere_radius < 0.0 || !std::isfinite(sphere_radius)) {
    throw std::invalid_argument("WorldGeometry: sphere radius must be >= 0");
  }
  if (sphere_radius == 0.0 && points.empty()) throw std::invalid_argument("WorldGeometry: no contact points");
  for (const Vec3& p : points) {
    if (!p.allFinite()) throw std::invalid_argument("WorldGeometry: non-finite contact point");
  }
}

WorldGeometry WorldGeometry::quad_hull(const Vec3& n, double d, double arm, double height, double below) {
  WorldGeometry g;
  g.n = n;
  g.d = d;
  g.points = {{arm, arm, -height}, {arm, -arm, -height}, {-arm, -arm, -height}, {-arm, arm, -height},
              {0.0, 0.0, below}};
  g.validate();
  return g;
}

WorldGeometry WorldGeometry::sphere(const Vec3& n, double d, double radius) {
  WorldGeometry g;
  g.n = n;
  g.d = d;
  g.points.clear();
  g.sphere_radius = radius;
  g.validate();
  return g;
}

namespace {

std::size_t point_count(const WorldGeometry& geom) { return geom.sphere_radius > 0.0 ? 1 : geom.points.size(); }

// Minimum over hull points, optionally ignoring one (a resting contact).
SignedDistance guard_distance(const UnitDualQuaternion& pose, const WorldGeometry& geom,
                              std::optional<std::size_t> skip) {
  SignedDistance best;
  best.phi = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < point_count(geom); ++i) {
    if (skip && *skip == i) continue;
    const SignedDistance sd = point_distance(pose, geom, i);
    if (sd.phi < best.phi) best = sd;
  }
  return best;
}

EventLocation locate(const HybridState& x, double dt, const RecoveryController& ctrl, const BodyParams& bp,
                     const WorldGeometry& geom, const SimConfig& sim, std::optional<std::size_t> skip) {
  const double phi0 = guard_distance(x.x.pose, geom, skip).phi;
  if (phi0 <= sim.event_tolerance) return {0.0, {x, 0.0, false}};
  FlowStep end = step_flow(x, ctrl, bp, dt);
  if (guard_distance(end.x.x.pose, geom, skip).phi > 0.0) {
    throw std::invalid_argument("locate_event: guard not crossed within the step");
  }
  double lo = 0.0;
  double hi = dt;
  for (int it = 0; it < sim.max_bisection; ++it) {
    const double mid = 0.5 * (lo + hi);
    FlowStep st = step_flow(x, ctrl, bp, mid);
    const double phi = guard_distance(st.x.x.pose, geom, skip).phi;
    if (std::abs(phi) < sim.event_tolerance) return {mid, st};
    if (phi > 0.0) {
      lo = mid;
    } else {
      hi = mid;
      end = st;
    }
  }
  return {hi, end};
}

double normal_velocity(const DualState& s, const Vec3& r_c, const Vec3& n) {
  const Vec3 n_b = quat_rotate(s.pose.rotation().conjugate(), n);
  return contact_point_velocity(s.twist, r_c).dot(n_b);
}

// Frictionless plastic impulse that removes an approaching normal velocity.
DualVector remove_normal_velocity(const DualState& s, const Vec3& r_c, const Vec3& n, const DualInertia& m) {
  const Vec3 n_b = quat_rotate(s.pose.rotation().conjugate(), n);
  const DualVector s_n = screw_from_contact(r_c, n_b);
  const double closing = dual_dot(s.twist, s_n);
  if (closing >= 0.0) return s.twist;
  const double impulse = -closing / dual_dot(m.apply_inverse(s_n), s_n);
  return s.twist + impulse * m.apply_inverse(s_n);
}

}  // namespace

SignedDistance point_distance(const UnitDualQuaternion& pose, const WorldGeometry& geom, std::size_t index) {
  SignedDistance sd;
  sd.index = index;
  if (geom.sphere_radius > 0.0) {
    sd.r_c = -geom.sphere_radius * quat_rotate(pose.rotation().conjugate(), geom.n);
    sd.phi = geom.n.dot(pose.translation()) - geom.d - geom.sphere_radius;
    return sd;
  }
  sd.r_c = geom.points.at(index);
  sd.phi = geom.n.dot(dq_transform_point(pose, sd.r_c)) - geom.d;
  return sd;
}

SignedDistance signed_distance(const UnitDualQuaternion& pose, const WorldGeometry& geom) {
  return guard_distance(pose, geom, std::nullopt);
}

FlowStep step_flow(const HybridState& x, const RecoveryController& ctrl, const BodyParams& bp, double dt) {
  bool certified = true;
  auto eval = [&](const DualState& s, double& rate) {
    const auto r = ctrl.dissipation_rate(s);
    certified = certified && r.has_value();
    rate = r.value_or(0.0);
    return dual_derivative(s, ctrl.wrench(s), bp);
  };
  auto stage = [&](const DualDerivative& d, double h) -> DualState {
    return {UnitDualQuaternion::normalized(x.x.pose.raw() + d.pose_dot * h), x.x.twist + h * d.twist_dot};
  };
  double r1, r2, r3, r4;
  const DualDerivative k1 = eval(x.x, r1);
  const DualDerivative k2 = eval(stage(k1, 0.5 * dt), r2);
  const DualDerivative k3 = eval(stage(k2, 0.5 * dt), r3);
  const DualDerivative k4 = eval(stage(k3, dt), r4);
  const double h6 = dt / 6.0;
  FlowStep out;
  out.x.x.pose = UnitDualQuaternion::normalized(
      x.x.pose.raw() + (k1.pose_dot + k2.pose_dot * 2.0 + k3.pose_dot * 2.0 + k4.pose_dot) * h6);
  out.x.x.twist = x.x.twist + h6 * (k1.twist_dot + 2.0 * k2.twist_dot + 2.0 * k3.twist_dot + k4.twist_dot);
  out.x.t = x.t + dt;
  out.x.j = x.j;
  out.dissipation = h6 * (r1 + 2.0 * r2 + 2.0 * r3 + r4);
  out.certified = certified;
  return out;
}

EventLocation locate_event(const HybridState& x_before, double dt, const RecoveryController& ctrl,
                           const BodyParams& bp, const WorldGeometry& geom, const SimConfig& sim) {
  const double phi0 = signed_distance(x_before.x.pose, geom).phi;
  if (phi0 < -sim.event_tolerance) throw std::invalid_argument("locate_event: start state is inside the guard");
  return locate(x_before, dt, ctrl, bp, geom, sim, std::nullopt);
}

JumpOutcome apply_jump(const HybridState& x, const WorldGeometry& geom, std::size_t point,
                       const ContactParams& contact, RecoveryController& ctrl, ImpulseModel model,
                       const BodyParams& bp, const SimConfig& sim) {
  const DualInertia m(bp);
  const SignedDistance sd = point_distance(x.x.pose, geom, point);
  JumpOutcome out;
  out.x = x;

  const double closing = normal_velocity(x.x, sd.r_c, geom.n);
  if (closing >= -sim.impact.resting) {
    out.x.x.twist = remove_normal_velocity(x.x, sd.r_c, geom.n, m);
    out.resting = true;
    return out;
  }

  const ContactSpec c{sd.r_c, geom.n, contact.e, contact.mu};
  const UnitQuaternion& q = x.x.pose.rotation();
  JumpRecord rec;
  DualVector xi_plus;
  switch (model) {
    case ImpulseModel::kDecoupled:
      rec.impulse = impulse_dq(x.x.twist, c, q, m, sim.impact);
      xi_plus = reset_dq(x.x.twist, rec.impulse, m);
      break;
    case ImpulseModel::kCoupled:
      try {
        rec.impulse = impulse_coupled_oracle(x.x.twist, c, q, m, sim.impact);
      } catch (const SeparatingContactError&) {
        throw;
      } catch (const std::domain_error&) {
        rec.impulse = impulse_dq(x.x.twist, c, q, m, sim.impact);
        rec.fallback = true;
      }
      xi_plus = reset_dq(x.x.twist, rec.impulse, m);
      break;
    case ImpulseModel::kMatrix: {
      const ClassicState cs = to_classic(x.x);
      rec.impulse = impulse_matrix(cs, c, bp, sim.impact);
      const ClassicVelocities v = reset_matrix(cs, rec.impulse, bp);
      xi_plus = {v.w, quat_rotate(q.conjugate(), v.v)};
      break;
    }
  }

  const DualState post{x.x.pose, xi_plus};
  rec.t = x.t;
  rec.point = point;
  rec.V_minus = ctrl.lyapunov(x.x).V;
  rec.ke_minus = m.kinetic_energy(x.x.twist);
  rec.ke_plus = m.kinetic_energy(xi_plus);
  const auto latch = ctrl.on_impact(x.t, x.x, post, rec.impulse, contact.e);
  rec.certificate = latch.certificate;
  rec.gamma_clamped = latch.gamma_clamped;
  rec.V_plus = ctrl.lyapunov(post).V;

  out.x.x = post;
  out.x.j = x.j + 1;
  rec.j = out.x.j;
  out.record = rec;
  out.resting = normal_velocity(post, sd.r_c, geom.n) < sim.impact.resting;
  return out;
}

EpisodeLog run_episode(const EpisodeConfig& cfg) {
  cfg.geometry.validate();
  if (!(cfg.sim.dt > 0.0) || !(cfg.sim.t_end >= 0.0)) throw std::invalid_argument("run_episode: bad dt or t_end");

  const BodyParams& bp = cfg.body;
  const DualInertia m(bp);
  const SimConfig& sim = cfg.sim;
  RecoveryController ctrl(cfg.controller, bp, cfg.hover);
  EpisodeLog log;
  log.min_phi = std::numeric_limits<double>::infinity();

  HybridState x{cfg.initial, 0.0, 0};
  std::optional<std::size_t> resting;
  std::deque<double> recent_jumps;

  auto record = [&](const HybridState& s, std::string event, std::optional<double> residual) {
    Sample smp;
    smp.t = s.t;
    smp.j = s.j;
    smp.x = s.x;
    smp.lyap = ctrl.lyapunov(s.x);
    smp.ek = smp.lyap.V_kin;
    smp.wrench = ctrl.wrench(s.x);
    smp.phi = signed_distance(s.x.pose, cfg.geometry).phi;
    smp.certified = residual.has_value();
    smp.residual = residual.value_or(0.0);
    smp.event = std::move(event);
    if (smp.certified) log.max_residual = std::max(log.max_residual, smp.residual);
    log.max_drift = std::max({log.max_drift, s.x.pose.norm_violation(), s.x.pose.orthogonality_violation()});
    log.min_phi = std::min(log.min_phi, smp.phi);
    log.samples.push_back(std::move(smp));
  };

  // Flow certificate residual (ΔV + ΔD)/h of one accepted sub-step.
  auto residual_of = [&](const FlowStep& st, double v_before, double h) -> std::optional<double> {
    if (!st.certified || h < 1e-6) return std::nullopt;
    return (ctrl.lyapunov(st.x.x).V - v_before + st.dissipation) / h;
  };

  auto diverged = [&](const DualState& s) {
    return !s.twist.real.allFinite() || !s.twist.dual.allFinite() ||
           std::hypot(s.twist.real.norm(), s.twist.dual.norm()) > sim.blowup;
  };

  record(x, "start", std::nullopt);
  const long steps = static_cast<long>(std::ceil(sim.t_end / sim.dt - 1e-9));
  std::string pending;

  try {
    for (long k = 0; k < steps && !log.failed; ++k) {
      const double t_target = std::min(static_cast<double>(k + 1) * sim.dt, sim.t_end);
      if (ctrl.update(x.t)) pending = "handback";
      int events_in_step = 0;

      while (x.t < t_target && !log.failed) {
        const double h = t_target - x.t;
        const double v_before = ctrl.lyapunov(x.x).V;
        FlowStep st = step_flow(x, ctrl, bp, h);
        st.x.t = t_target;

        if (guard_distance(st.x.x.pose, cfg.geometry, resting).phi > 0.0) {
          std::optional<double> res = residual_of(st, v_before, h);
          x = st.x;
          if (resting) {
            const SignedDistance sd = point_distance(x.x.pose, cfg.geometry, *resting);
            const double vn = normal_velocity(x.x, sd.r_c, cfg.geometry.n);
            if (vn > sim.impact.resting && sd.phi > 0.0) {
              resting.reset();
              pending += pending.empty() ? "liftoff" : ";liftoff";
            } else {
              if (sd.phi < 0.0) {
                const Pose p = dq_to_pose(x.x.pose);
                x.x.pose = dq_from_pose(p.rotation, p.position - sd.phi * cfg.geometry.n);
              }
              x.x.twist = remove_normal_velocity(x.x, sd.r_c, cfg.geometry.n, m);
              res.reset();
            }
          }
          if (diverged(x.x)) {
            log.failed = true;
            log.failure = "twist exceeded the blow-up bound at t=" + std::to_string(x.t);
          }
          record(x, pending, res);
          pending.clear();
          break;
        }

        // Guard crossed inside the sub-step.
        if (++events_in_step > 4 * sim.max_jumps_per_window) {
          throw std::runtime_error("event loop did not terminate within one step");
        }
        EventLocation loc = locate(x, h, ctrl, bp, cfg.geometry, sim, resting);
        if (loc.h > 0.0) {
          loc.step.x.t = x.t + loc.h;
          std::optional<double> res = residual_of(loc.step, v_before, loc.h);
          x = loc.step.x;
          record(x, pending, res);
          pending.clear();
        }

        // Resolve every touching point, closest first.
        std::vector<std::size_t> order(point_count(cfg.geometry));
        std::iota(order.begin(), order.end(), 0);
        std::vector<double> phis(order.size());
        for (std::size_t i = 0; i < order.size(); ++i) phis[i] = point_distance(x.x.pose, cfg.geometry, i).phi;
        std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return phis[a] < phis[b]; });
        int resolved = 0;
        std::string events;
        for (std::size_t i : order) {
          if (phis[i] > sim.event_tolerance || (resting && *resting == i)) continue;
          JumpOutcome jo = apply_jump(x, cfg.geometry, i, cfg.contact, ctrl, cfg.impulse, bp, sim);
          x = jo.x;
          if (jo.record) {
            if (jo.record->fallback) log.warnings.push_back("coupled impulse fell back to decoupled at t=" +
                                                            std::to_string(x.t));
            if (!log.first_impact) log.first_impact = x.t;
            log.jumps.push_back(*jo.record);
            events += events.empty() ? "impact" : ";impact";
            recent_jumps.push_back(x.t);
            while (!recent_jumps.empty() && recent_jumps.front() < x.t - sim.zeno_window) recent_jumps.pop_front();
            if (static_cast<int>(recent_jumps.size()) > sim.max_jumps_per_window) {
              jo.resting = true;
              log.warnings.push_back("zeno guard engaged at t=" + std::to_string(x.t));
              events += ";zeno";
            }
          }
          if (jo.resting) {
            resting = i;
            x.x.twist = remove_normal_velocity(x.x, point_distance(x.x.pose, cfg.geometry, i).r_c,
                                               cfg.geometry.n, m);
            events += events.empty() ? "resting" : ";resting";
          }
          ++resolved;
        }
        if (resolved > 1) log.warnings.push_back("simultaneous contacts resolved sequentially at t=" +
                                                 std::to_string(x.t));
        if (resolved == 0) {
          // Touching only within tolerance while separating: treat as resting.
          resting = guard_distance(x.x.pose, cfg.geometry, resting).index;
          events += "resting";
        }
        if (diverged(x.x)) {
          log.failed = true;
          log.failure = "twist exceeded the blow-up bound at t=" + std::to_string(x.t);
        }
        record(x, events, std::nullopt);
      }
    }
  } catch (const std::exception& ex) {
    log.failed = true;
    log.failure = ex.what();
  }
  log.ended_resting = resting.has_value();
  return log;
}

}  // namespace dqr
