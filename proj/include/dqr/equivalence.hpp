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

// Randomized agreement check between the dual-quaternion and matrix reset
// maps over random bodies, poses, twists and contacts.

#pragma once

#include <cstddef>
#include <cstdint>

namespace dqr {

struct EquivalenceReport {
  std::size_t samples = 0;
  double max_rho = 0.0;     // relative deviations, DQ vs matrix
  double max_lambda = 0.0;
  double max_dv = 0.0;      // world-frame Δv
  double max_dw = 0.0;      // body-frame Δω

  double worst() const;
  bool pass(double tol = 1e-9) const { return worst() <= tol; }
};

/// Draws `samples` approaching contacts with e ∈ [0, 1) and μ ∈ [0, 1] and
/// compares both reset maps. `fault_scale` multiplies J in the matrix path
/// only; 1 is the honest comparison. Throws std::invalid_argument when
/// samples is zero.
EquivalenceReport run_equivalence(std::size_t samples, std::uint64_t seed, double fault_scale = 1.0);

}  // namespace dqr
