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

#include <array>
#include <functional>
#include <span>
#include <vector>

#include "odp/guarantee.h"
#include "odp/noise.h"

namespace odp {

// Iteration counts after which an iterative mechanism may stop.
struct StopSchedule {
  std::vector<int> stops;  // strictly increasing, all >= 1

  explicit StopSchedule(std::vector<int> stops);

  int last() const { return stops.back(); }
  int count() const { return static_cast<int>(stops.size()); }
};

// Per-iteration DP parameters of the composed mechanisms, one entry per
// iteration up to the final stop.
struct RrParams {
  std::vector<DpGuarantee> per_iteration;
};

// Epsilon target per stop: the epsilon charged when the mechanism halts at
// the i-th stop.
struct EpsAssignment {
  std::vector<double> eps_per_stop;
};

// Full input of the optimal-delta computation.
struct OptDeltaSpec {
  StopSchedule schedule;
  RrParams params;
  EpsAssignment eps;

  OptDeltaSpec(StopSchedule schedule, RrParams params, EpsAssignment eps);

  // {"stops":[...], "eps":[...], "delta":[...], "eps_targets":[...]}
  static OptDeltaSpec from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

// Output distribution of the four-outcome randomized response mechanism that
// is extremal for (eps, delta)-DP composition, for input bit b.
std::array<double, 4> rr_distribution(double eps, double delta, int b);

// Transcript of one run of an iterative mechanism with stopping rules.
struct IterativeTranscript {
  std::vector<double> outputs;
  int stopped_at = 0;           // one of the schedule's stops
  int realized_cell_index = 0;  // i such that outputs.size() == stops[i]
};

// Per-iteration mechanism: sees all previous outputs and the database.
template <typename Db>
using StepMechanism = std::function<double(std::span<const double> prior,
                                           const Db& db, NoiseSource& noise)>;
// Stopping criterion: a deterministic function of the outputs so far.
using StopCriterion = std::function<bool(std::span<const double> outputs)>;

// Runs mechanisms sequentially; at every non-final stop evaluates the
// matching criterion on the outputs so far and halts on the first 1. Needs
// one mechanism per iteration up to the last stop and one criterion per
// non-final stop. Criteria see only already-released outputs, so a stop
// consumes no extra budget.
template <typename Db>
IterativeTranscript run_iterative(const std::vector<StepMechanism<Db>>& mechanisms,
                                  const StopSchedule& schedule,
                                  const std::vector<StopCriterion>& criteria,
                                  const Db& db, NoiseSource& noise) {
  if (static_cast<int>(mechanisms.size()) != schedule.last()) {
    throw std::invalid_argument("need one mechanism per iteration up to the last stop");
  }
  if (static_cast<int>(criteria.size()) != schedule.count() - 1) {
    throw std::invalid_argument("need one criterion per non-final stop");
  }
  IterativeTranscript transcript;
  int next_stop = 0;
  for (int k = 1; k <= schedule.last(); ++k) {
    transcript.outputs.push_back(
        mechanisms[k - 1](std::span<const double>(transcript.outputs), db, noise));
    if (next_stop < schedule.count() - 1 && k == schedule.stops[next_stop]) {
      if (criteria[next_stop](std::span<const double>(transcript.outputs))) {
        transcript.stopped_at = k;
        transcript.realized_cell_index = next_stop;
        return transcript;
      }
      ++next_stop;
    }
  }
  transcript.stopped_at = schedule.last();
  transcript.realized_cell_index = schedule.count() - 1;
  return transcript;
}

// A DP composition theorem: maps a prefix of mechanism guarantees and a
// target epsilon to the delta at which the composed prefix satisfies DP.
using CompositionTheorem =
    std::function<double(std::span<const DpGuarantee> prefix, double eps_target)>;

// Generic ODP bound for an iterative mechanism: cell i carries the target
// epsilon for stop i, and the deltas returned by `comp` on each prefix add
// up. Works with any composition theorem but is not tight; see opt_delta.
OdpGuarantee generic_odp_bound(const StopSchedule& schedule,
                               const CompositionTheorem& comp,
                               const EpsAssignment& eps_targets,
                               std::span<const DpGuarantee> mechanisms);

// Exact smallest delta for which the iterative mechanism described by `spec`
// satisfies the per-stop epsilon targets, maximized over all mechanisms with
// the given per-iteration DP parameters and all stopping rules. Computed by
// dynamic programming over the 4-ary prefix tree of randomized-response
// outcomes; work is proportional to 4^(last stop), bounded by `depth_cap`.
double opt_delta(const OptDeltaSpec& spec, int depth_cap = 10);

// The looser bound that optimizes each stop level independently, ignoring
// that an output sequence halting at one stop rules out its extensions.
// Always >= opt_delta.
double nonopt_delta(const OptDeltaSpec& spec, int depth_cap = 10);

// Closed form of opt_delta for a single stop after k iterations of identical
// pure (eps, 0) mechanisms with target eps_prime. Log-domain, usable for
// large k.
double homogeneous_opt_delta(int k, double eps, double eps_prime);

// Smallest number of composed (eps, 0) mechanisms for which the optimal
// composition bound beats simple composition (a strictly smaller total
// epsilon) while keeping delta at most delta_max.
int min_iterations_for_advantage(double eps, double delta_max);

}  // namespace odp
