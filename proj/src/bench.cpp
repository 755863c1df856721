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

#include "dqr/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <stdexcept>

#include "dqr/harness.hpp"
#include "dqr/impact_kernels.hpp"

namespace dqr::bench {

namespace {

using C = CountingScalar;
using V = Vec3T<C>;
using M = Mat3T<C>;

V lift(const Vec3& v) { return v.cast<C>(); }
M lift(const Mat3& m) { return m.cast<C>(); }

// Fixed, arbitrary operands: the count does not depend on the values.
struct CountingInputs {
  BasicDualVector<C> twist{lift(Vec3(0.3, -0.2, 0.5)), lift(Vec3(1.0, 0.4, -0.7))};
  V v = lift(Vec3(0.9, 0.1, -0.6));
  V w = lift(Vec3(0.3, -0.2, 0.5));
  M rot = lift(UnitQuaternion::from_axis_angle(Vec3(1.0, 2.0, 3.0), 0.7).to_rotation_matrix());
  V r = lift(Vec3(0.17, 0.17, -0.03));
  V n = lift(Vec3(-1.0, 0.0, 0.0));
  V n_b = lift(Vec3(-0.8, 0.6, 0.0));
  M j_inv = lift(Mat3(Vec3(1.0 / 0.0082, 1.0 / 0.0082, 1.0 / 0.0149).asDiagonal()));
  C m_inv = 1.0;
  C e = 0.7;
};

template <class F>
OpCount count(F&& body) {
  CountingScalar::reset();
  body();
  OpCount c{CountingScalar::adds, CountingScalar::muls, 0};
  c.total = c.adds + c.muls;
  return c;
}

Vec3 random_vec(std::mt19937_64& rng, double scale) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  return Vec3(u(rng), u(rng), u(rng)) * scale;
}

double run(Formulation f, const BenchInput& in) {
  switch (f) {
    case Formulation::kDq:
      return dq_impulse_magnitude<double>(in.twist, in.r_c, in.n_b, in.j_inv, in.m_inv, in.e).impulse;
    case Formulation::kMatrix:
      return matrix_impulse_magnitude<double>(in.v_world, in.twist.real, in.rot, in.r_c, in.n, in.n_b, in.j_inv,
                                              in.m_inv, in.e)
          .impulse;
    case Formulation::kInertial:
      return inertial_impulse_magnitude<double>(in.v_world, in.twist.real, in.rot, in.r_c, in.n, in.j_inv,
                                                in.m_inv, in.e)
          .impulse;
  }
  return 0.0;
}

}  // namespace

const char* formulation_name(Formulation f) {
  switch (f) {
    case Formulation::kInertial: return "inertial";
    case Formulation::kMatrix: return "matrix";
    case Formulation::kDq: return "dq";
  }
  return "?";
}

Formulation parse_formulation(const std::string& name) {
  if (name == "inertial") return Formulation::kInertial;
  if (name == "matrix") return Formulation::kMatrix;
  if (name == "dq") return Formulation::kDq;
  throw std::invalid_argument("unknown formulation '" + name + "' (expected inertial, matrix or dq)");
}

OpCount flop_count(Formulation f) {
  const CountingInputs in;
  return count([&] {
    switch (f) {
      case Formulation::kDq:
        dq_impulse_magnitude<C>(in.twist, in.r, in.n_b, in.j_inv, in.m_inv, in.e);
        break;
      case Formulation::kMatrix:
        matrix_impulse_magnitude<C>(in.v, in.w, in.rot, in.r, in.n, in.n_b, in.j_inv, in.m_inv, in.e);
        break;
      case Formulation::kInertial:
        inertial_impulse_magnitude<C>(in.v, in.w, in.rot, in.r, in.n, in.j_inv, in.m_inv, in.e);
        break;
    }
  });
}

std::vector<OpItem> flop_breakdown(Formulation f) {
  const CountingInputs in;
  std::vector<OpItem> items;
  auto item = [&](const char* name, auto&& body) { items.push_back({name, count(body)}); };
  const C one(1.0);
  const C closing(-1.5), rho(2.0);
  auto magnitude = [&] { (void)(-((one + in.e) * closing) / rho); };

  switch (f) {
    case Formulation::kDq: {
      const BasicDualVector<C> s_n{in.r.cross(in.n_b), in.n_b};
      item("screw r x n_B", [&] { (void)V(in.r.cross(in.n_b)); });
      item("closing <xi, s_n>", [&] { (void)dual_dot(in.twist, s_n); });
      item("M^-1 s_n", [&] { (void)inertia_apply_inverse(in.j_inv, in.m_inv, s_n); });
      const auto ms = inertia_apply_inverse(in.j_inv, in.m_inv, s_n);
      item("rho <M^-1 s_n, s_n>", [&] { (void)dual_dot(ms, s_n); });
      item("Lambda", magnitude);
      break;
    }
    case Formulation::kMatrix: {
      const V a = in.j_inv * in.r.cross(in.n_b);
      item("J^-1 (r x n_B)", [&] { (void)V(in.j_inv * in.r.cross(in.n_b)); });
      item("(.) x r", [&] { (void)V(a.cross(in.r)); });
      const V b = a.cross(in.r);
      item("rho = m^-1 + n_B . (.)", [&] { (void)(in.m_inv + in.n_b.dot(b)); });
      item("v_c = v + R (w x r)", [&] { (void)V(in.v + in.rot * in.w.cross(in.r)); });
      const V v_c = in.v + in.rot * in.w.cross(in.r);
      item("closing v_c . n", [&] { (void)v_c.dot(in.n); });
      item("Lambda", magnitude);
      break;
    }
    case Formulation::kInertial: {
      item("J_W^-1 = R J^-1 R^T", [&] { (void)M((in.rot * in.j_inv).eval() * in.rot.transpose()); });
      item("r_W = R r", [&] { (void)V(in.rot * in.r); });
      item("w_W = R w", [&] { (void)V(in.rot * in.w); });
      const V r_w = in.rot * in.r, w_w = in.rot * in.w;
      item("v_c = v + w_W x r_W", [&] { (void)V(in.v + w_w.cross(r_w)); });
      const M jw = (in.rot * in.j_inv).eval() * in.rot.transpose();
      item("J_W^-1 (r_W x n)", [&] { (void)V(jw * r_w.cross(in.n)); });
      const V a = jw * r_w.cross(in.n);
      item("rho = m^-1 + n . (a x r_W)", [&] { (void)(in.m_inv + in.n.dot(a.cross(r_w))); });
      const V v_c = in.v + w_w.cross(r_w);
      item("closing v_c . n", [&] { (void)v_c.dot(in.n); });
      item("Lambda", magnitude);
      break;
    }
  }
  return items;
}

OpCount prelude_count(Formulation f) {
  const CountingInputs in;
  switch (f) {
    case Formulation::kMatrix:
      return count([&] { (void)V(in.rot.transpose() * in.n); });
    case Formulation::kDq:
      // Same expression as quat_rotate: t = 2 q_v × v, v' = v + w t + q_v × t.
      return count([&] {
        const V qv = lift(Vec3(0.1, 0.2, 0.3));
        const C w(0.9);
        const V t = C(2.0) * qv.cross(in.n);
        (void)V(in.n + w * t + qv.cross(t));
      });
    case Formulation::kInertial:
      break;
  }
  return {};
}

std::vector<BenchInput> make_inputs(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::vector<BenchInput> out;
  out.reserve(count);
  while (out.size() < count) {
    const Mat3 rj = quat_exp(random_vec(rng, 3.0)).to_rotation_matrix();
    const Vec3 d(0.005 + 0.05 * u01(rng), 0.005 + 0.05 * u01(rng), 0.005 + 0.05 * u01(rng));
    const Mat3 j = rj * d.asDiagonal() * rj.transpose();
    BenchInput in;
    in.j_inv = j.inverse();
    in.j_inv = 0.5 * (in.j_inv + in.j_inv.transpose()).eval();
    in.m_inv = 1.0 / (0.5 + 1.5 * u01(rng));
    const UnitQuaternion q = quat_exp(random_vec(rng, 3.0));
    in.rot = q.to_rotation_matrix();
    in.twist = {random_vec(rng, 10.0), random_vec(rng, 3.0)};
    in.v_world = in.rot * in.twist.dual;
    in.r_c = random_vec(rng, 0.3);
    in.n = random_vec(rng, 1.0).normalized();
    in.n_b = in.rot.transpose() * in.n;
    in.e = 0.999 * u01(rng);
    if (dual_dot(in.twist, DualVector{in.r_c.cross(in.n_b), in.n_b}) < -1e-3) out.push_back(in);
  }
  return out;
}

double max_impulse_mismatch(const std::vector<BenchInput>& inputs) {
  double worst = 0.0;
  for (const BenchInput& in : inputs) {
    const double ref = run(Formulation::kDq, in);
    for (Formulation f : {Formulation::kMatrix, Formulation::kInertial}) {
      worst = std::max(worst, std::abs(run(f, in) - ref) / std::max(1.0, std::abs(ref)));
    }
  }
  return worst;
}

LatencyStats latency_bench(Formulation f, std::size_t n_iters, std::uint64_t seed) {
  if (n_iters == 0) throw std::invalid_argument("latency_bench: n_iters must be > 0");
  constexpr std::size_t kPool = 4096;
  constexpr std::size_t kBatch = 1000;
  const std::vector<BenchInput> inputs = make_inputs(kPool, seed);
  const std::size_t batches = (n_iters + kBatch - 1) / kBatch;

  double sink = 0.0;
  for (std::size_t i = 0; i < kPool; ++i) sink += run(f, inputs[i]);  // warm-up

  std::vector<double> per_op;
  per_op.reserve(batches);
  std::size_t k = 0;
  for (std::size_t b = 0; b < batches; ++b) {
    const auto t0 = std::chrono::steady_clock::now();
    for (std::size_t i = 0; i < kBatch; ++i) {
      sink += run(f, inputs[k]);
      k = (k + 1) & (kPool - 1);
    }
    const auto t1 = std::chrono::steady_clock::now();
    per_op.push_back(std::chrono::duration<double, std::nano>(t1 - t0).count() / kBatch);
  }
  volatile double published = sink;

  std::sort(per_op.begin(), per_op.end());
  auto quantile = [&](double p) {
    const std::size_t i = static_cast<std::size_t>(std::ceil(p * static_cast<double>(per_op.size()))) - 1;
    return per_op[std::min(i, per_op.size() - 1)];
  };
  LatencyStats s;
  s.formulation = f;
  s.iterations = batches * kBatch;
  s.median_ns = quantile(0.5);
  s.p95_ns = quantile(0.95);
  s.checksum = published;
  return s;
}

std::string bench_csv(const std::vector<LatencyStats>& rows) {
  std::string out = "formulation,adds,muls,total,median_ns,p95_ns,checksum\n";
  for (const LatencyStats& r : rows) {
    const OpCount c = flop_count(r.formulation);
    out += std::string(formulation_name(r.formulation)) + ',' + std::to_string(c.adds) + ',' +
           std::to_string(c.muls) + ',' + std::to_string(c.total) + ',' + format_double(r.median_ns) + ',' +
           format_double(r.p95_ns) + ',' + format_double(r.checksum) + '\n';
  }
  return out;
}

}  // namespace dqr::bench
