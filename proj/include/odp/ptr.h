// Copyright 2026 The odp-accounting Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>

#include "odp/guarantee.h"
#include "odp/mechanisms.h"
#include "odp/noise.h"

namespace odp {

// One propose-test-release stage: given a database and a proposed
// sensitivity bound, either answers with a value or refuses with bottom.
// A bottom proposal must propagate to a bottom answer; the declared
// (eps, delta) are assumed sound for the stage.
template <typename Db>
struct PtrStage {
  std::function<std::optional<double>(const Db& db, const std::optional<double>& proposal,
                                      NoiseSource& noise)>
      evaluate;
  double eps;
  double delta;
};

// Guarantee of a single stage: a value output costs 2*eps, a bottom output
// only eps, with the stage's delta.
inline OdpGuarantee ptr_stage_odp(double eps, double delta) {
  if (!(eps > 0.0)) throw std::invalid_argument("stage eps must be positive");
  return OdpGuarantee({{kValueCell, 2.0 * eps}, {kBotCell, eps}}, delta);
}

// Guarantee of the two-stage chain viewed as one mechanism: a value costs
// 3*eps, a double refusal only 2*eps.
inline OdpGuarantee iqr_single_odp(double eps, double delta) {
  if (!(eps > 0.0)) throw std::invalid_argument("stage eps must be positive");
  return OdpGuarantee({{kValueCell, 3.0 * eps}, {kBotCell, 2.0 * eps}}, delta);
}

// Result of running a two-stage chain, with the per-case realized charge:
//   case 1: stage 1 answers            -> (2*eps, delta)
//   case 2: stage 1 refuses, 2 answers -> (3*eps, 2*delta)
//   case 3: both refuse                -> (2*eps, 2*delta)
struct PtrPairOutcome {
  std::optional<double> result;
  int case_id = 0;
  double eps_charged = 0.0;
  double delta_charged = 0.0;
};

// Runs stage 1 and, only on refusal, stage 2. Both stages must declare the
// same (eps, delta). With randomize_order, one fair coin decides which stage
// goes first; that changes only which case occurs, not the accounting.
template <typename Db>
PtrPairOutcome run_ptr_pair(const PtrStage<Db>& stage1, const PtrStage<Db>& stage2,
                            const Db& db, const std::optional<double>& s1,
                            const std::optional<double>& s2, NoiseSource& noise,
                            bool randomize_order = false) {
  if (stage1.eps != stage2.eps || stage1.delta != stage2.delta) {
    throw std::invalid_argument("chained stages must share (eps, delta)");
  }
  const PtrStage<Db>* first = &stage1;
  const PtrStage<Db>* second = &stage2;
  const std::optional<double>* first_proposal = &s1;
  const std::optional<double>* second_proposal = &s2;
  if (randomize_order && noise.uniform() < 0.5) {
    std::swap(first, second);
    std::swap(first_proposal, second_proposal);
  }
  const double eps = stage1.eps;
  const double delta = stage1.delta;

  const std::optional<double> r1 = first->evaluate(db, *first_proposal, noise);
  if (r1.has_value()) {
    return PtrPairOutcome{r1, 1, 2.0 * eps, delta};
  }
  const std::optional<double> r2 = second->evaluate(db, *second_proposal, noise);
  if (r2.has_value()) {
    return PtrPairOutcome{r2, 2, 3.0 * eps, 2.0 * delta};
  }
  return PtrPairOutcome{std::nullopt, 3, 2.0 * eps, 2.0 * delta};
}

// Synthetic stage built from a distance-to-instability test: releases the
// noisy answer only if the (sensitivity-1) distance plus Laplace(1/eps)
// clears ln(1/(2*delta))/eps, which bounds the release probability at an
// unstable database by delta.
template <typename Db>
PtrStage<Db> distance_test_stage(std::function<long(const Db&)> distance_fn,
                                 std::function<double(const Db&)> answer_fn,
                                 double eps, double delta) {
  if (!(eps > 0.0)) throw std::invalid_argument("stage eps must be positive");
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("stage delta must lie in (0, 1); the test threshold "
                                "is undefined at 0");
  }
  const double threshold = std::log(1.0 / (2.0 * delta)) / eps;
  PtrStage<Db> stage;
  stage.eps = eps;
  stage.delta = delta;
  stage.evaluate = [distance_fn = std::move(distance_fn),
                    answer_fn = std::move(answer_fn), eps, threshold](
                       const Db& db, const std::optional<double>& proposal,
                       NoiseSource& noise) -> std::optional<double> {
    if (!proposal.has_value()) return std::nullopt;
    const double noisy_distance =
        static_cast<double>(distance_fn(db)) + noise.laplace(1.0 / eps);
    if (noisy_distance > threshold) {
      return answer_fn(db) + noise.laplace(1.0 / eps);
    }
    return std::nullopt;
  };
  return stage;
}

}  // namespace odp
