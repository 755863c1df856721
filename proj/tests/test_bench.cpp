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

#include "doctest.h"
#include "dqr/bench.hpp"

using namespace dqr;
using namespace dqr::bench;

TEST_CASE("counting scalar: a 3-vector dot product is 3 mul + 2 add") {
  using V = Eigen::Matrix<CountingScalar, 3, 1>;
  const V a(1.0, 2.0, 3.0), b(4.0, 5.0, 6.0);
  CountingScalar::reset();
  const CountingScalar d = a.dot(b);
  CHECK(d.v == 32.0);
  CHECK(CountingScalar::muls == 3);
  CHECK(CountingScalar::adds == 2);
  CountingScalar::reset();
  (void)(-a);
  CHECK(CountingScalar::adds + CountingScalar::muls == 0);
}

TEST_CASE("operation counts match a hand count") {
  // dq:       r x n 9, <xi,s> 11, M^-1 s 18, <.,s> 11, Lambda 3
  // matrix:   J^-1(r x n) 24, x r 9, rho 6, v + R(w x r) 27, dot 5, Lambda 3
  // inertial: R J^-1 R^T 90, R r 15, R w 15, v_c 12, J_W^-1(r x n) 24, rho 15, dot 5, Lambda 3
  CHECK(flop_count(Formulation::kDq).total == 52);
  CHECK(flop_count(Formulation::kMatrix).total == 74);
  CHECK(flop_count(Formulation::kInertial).total == 179);
  CHECK(prelude_count(Formulation::kMatrix).total == 15);
  CHECK(prelude_count(Formulation::kDq).total == 30);
  CHECK(prelude_count(Formulation::kInertial).total == 0);
}

TEST_CASE("operation counts are deterministic and the breakdown sums to the total") {
  for (Formulation f : {Formulation::kInertial, Formulation::kMatrix, Formulation::kDq}) {
    const OpCount a = flop_count(f), b = flop_count(f);
    CHECK(a.adds == b.adds);
    CHECK(a.muls == b.muls);
    CHECK(a.total == a.adds + a.muls);
    std::size_t adds = 0, muls = 0;
    for (const OpItem& i : flop_breakdown(f)) {
      adds += i.count.adds;
      muls += i.count.muls;
    }
    CHECK(adds == a.adds);
    CHECK(muls == a.muls);
    CHECK(parse_formulation(formulation_name(f)) == f);
  }
  CHECK_THROWS_AS(parse_formulation("quaternion"), std::invalid_argument);
}

TEST_CASE("formulations compute the same impulse") {
  const auto a = make_inputs(2000, 3);
  const auto b = make_inputs(2000, 3);
  REQUIRE(a.size() == 2000);
  CHECK(a[1999].twist.real == b[1999].twist.real);
  CHECK(a[0].r_c == b[0].r_c);
  CHECK(max_impulse_mismatch(a) <= 1e-10);
  for (const BenchInput& in : a) {
    CHECK(in.n.norm() == doctest::Approx(1.0));
    CHECK((in.rot.transpose() * in.n - in.n_b).norm() < 1e-14);
  }
}

TEST_CASE("latency bench") {
  CHECK_THROWS_AS(latency_bench(Formulation::kDq, 0, 1), std::invalid_argument);
  const LatencyStats s = latency_bench(Formulation::kMatrix, 2500, 1);
  CHECK(s.iterations == 3000);
  CHECK(s.median_ns > 0.0);
  CHECK(s.p95_ns >= s.median_ns);
  const std::string csv = bench_csv({s});
  CHECK(csv.rfind("formulation,adds,muls,total,median_ns,p95_ns,checksum\nmatrix,30,44,74,", 0) == 0);
}
