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

// Operation counting and latency benchmarks for the three impulse-magnitude
// formulations.
//
// Counting convention: unit weights, subtraction counts as an addition,
// division as a multiplication, negation is free. Counts start from the
// contact normal in the body frame; the rotation of n into the body frame is
// reported separately as a prelude.

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "dqr/dynamics.hpp"

namespace dqr::bench {

/// Double wrapper that tallies every arithmetic operation on this thread.
struct CountingScalar {
  double v = 0.0;

  CountingScalar() = default;
  CountingScalar(double x) : v(x) {}  // NOLINT: implicit by design, Eigen needs it

  static inline thread_local std::size_t adds = 0;
  static inline thread_local std::size_t muls = 0;
  static void reset() { adds = muls = 0; }

  friend CountingScalar operator+(CountingScalar a, CountingScalar b) { return ++adds, CountingScalar(a.v + b.v); }
  friend CountingScalar operator-(CountingScalar a, CountingScalar b) { return ++adds, CountingScalar(a.v - b.v); }
  friend CountingScalar operator*(CountingScalar a, CountingScalar b) { return ++muls, CountingScalar(a.v * b.v); }
  friend CountingScalar operator/(CountingScalar a, CountingScalar b) { return ++muls, CountingScalar(a.v / b.v); }
  CountingScalar operator-() const { return CountingScalar(-v); }
  CountingScalar& operator+=(CountingScalar b) { return *this = *this + b; }
  CountingScalar& operator-=(CountingScalar b) { return *this = *this - b; }
  CountingScalar& operator*=(CountingScalar b) { return *this = *this * b; }
  CountingScalar& operator/=(CountingScalar b) { return *this = *this / b; }
  friend bool operator<(CountingScalar a, CountingScalar b) { return a.v < b.v; }
  friend bool operator>(CountingScalar a, CountingScalar b) { return a.v > b.v; }
  friend bool operator<=(CountingScalar a, CountingScalar b) { return a.v <= b.v; }
  friend bool operator>=(CountingScalar a, CountingScalar b) { return a.v >= b.v; }
  friend bool operator==(CountingScalar a, CountingScalar b) { return a.v == b.v; }
  friend bool operator!=(CountingScalar a, CountingScalar b) { return a.v != b.v; }
};

struct OpCount {
  std::size_t adds = 0;
  std::size_t muls = 0;
  std::size_t total = 0;
};

enum class Formulation { kInertial, kMatrix, kDq };

const char* formulation_name(Formulation f);
/// Throws std::invalid_argument on an unknown name.
Formulation parse_formulation(const std::string& name);

/// Counts from the instrumented kernel, excluding the normal prelude.
OpCount flop_count(Formulation f);

struct OpItem {
  std::string name;
  OpCount count;
};

/// Per-sub-expression breakdown; the items sum to flop_count(f).
std::vector<OpItem> flop_breakdown(Formulation f);

/// Cost of bringing n into the body frame: Rᵀn for the matrix path, q*⊙n for
/// the dual-quaternion path, zero for the inertial path.
OpCount prelude_count(Formulation f);

/// Pre-generated random valid impact inputs, shared by all formulations.
struct BenchInput {
  DualVector twist;  // body frame
  Vec3 v_world;
  Mat3 rot;
  Vec3 r_c;
  Vec3 n;    // world
  Vec3 n_b;  // body
  Mat3 j_inv;
  double m_inv;
  double e;
};

std::vector<BenchInput> make_inputs(std::size_t count, std::uint64_t seed);

/// max_k |Λ_f − Λ_dq| / max(1, |Λ_dq|) over the inputs, f ∈ {inertial, matrix}.
double max_impulse_mismatch(const std::vector<BenchInput>& inputs);

struct LatencyStats {
  Formulation formulation = Formulation::kDq;
  std::size_t iterations = 0;
  double median_ns = 0.0;
  double p95_ns = 0.0;
  double checksum = 0.0;
};

/// Warm-cache latency over n_iters calls, timed in batches; statistics are
/// over per-batch ns/op. Throws std::invalid_argument when n_iters is zero.
LatencyStats latency_bench(Formulation f, std::size_t n_iters, std::uint64_t seed);

/// CSV: formulation, adds, muls, total, median_ns, p95_ns, checksum.
std::string bench_csv(const std::vector<LatencyStats>& rows);

}  // namespace dqr::bench

namespace Eigen {

template <>
struct NumTraits<dqr::bench::CountingScalar> : GenericNumTraits<double> {
  using Real = dqr::bench::CountingScalar;
  using NonInteger = dqr::bench::CountingScalar;
  using Nested = dqr::bench::CountingScalar;
  using Literal = dqr::bench::CountingScalar;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 1,
    AddCost = 1,
    MulCost = 1
  };
};

}  // namespace Eigen
