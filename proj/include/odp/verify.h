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

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "odp/guarantee.h"
#include "odp/ledger.h"
#include "odp/noise.h"

namespace odp {

// Deterministic yes/no event on a mechanism output.
template <typename Out>
struct EventProbe {
  std::function<bool(const Out&)> classifier;
  std::string label;
};

// Event-probability estimates under the two neighboring inputs, with
// two-sided 99% Clopper-Pearson bounds.
struct EstimateResult {
  long trials = 0;
  double p0_hat = 0.0, p0_lo = 0.0, p0_hi = 1.0;
  double p1_hat = 0.0, p1_lo = 0.0, p1_hi = 1.0;
};

enum class Verdict { kConsistent, kViolated };

struct DistinguishResult {
  EstimateResult estimate;
  double epsilon_claimed = 0.0;
  double delta_claimed = 0.0;
  Verdict verdict = Verdict::kConsistent;
  std::string probe_label;
};

// Exact two-sided Clopper-Pearson interval at the given confidence.
std::pair<double, double> clopper_pearson(long successes, long trials,
                                          double confidence = 0.99);

// Runs the mechanism `trials` times on each input with per-trial child seeds
// (the same child for both inputs, so runs are paired) and estimates the
// probe probability under both. Requires trials >= 1000.
template <typename Out, typename In>
EstimateResult estimate_event(
    const std::function<Out(const In&, NoiseSource&)>& mechanism, const In& input0,
    const In& input1, const EventProbe<Out>& probe, long trials, std::uint64_t seed) {
  if (trials < 1000) throw std::invalid_argument("need at least 1000 trials");
  const NoiseSource root(seed);
  long hits0 = 0;
  long hits1 = 0;
  for (long t = 0; t < trials; ++t) {
    NoiseSource n0 = root.fork(static_cast<std::uint64_t>(t));
    NoiseSource n1 = root.fork(static_cast<std::uint64_t>(t));
    if (probe.classifier(mechanism(input0, n0))) ++hits0;
    if (probe.classifier(mechanism(input1, n1))) ++hits1;
  }
  EstimateResult result;
  result.trials = trials;
  result.p0_hat = static_cast<double>(hits0) / trials;
  result.p1_hat = static_cast<double>(hits1) / trials;
  std::tie(result.p0_lo, result.p0_hi) = clopper_pearson(hits0, trials);
  std::tie(result.p1_lo, result.p1_hi) = clopper_pearson(hits1, trials);
  return result;
}

// Applies the DP inequality in both directions: the claim is flagged only
// when a confidence lower bound exceeds e^eps times the other side's upper
// bound plus delta, so exact guarantees never alarm.
DistinguishResult check_dp_bound(const EstimateResult& estimate, double eps,
                                 double delta);

// --- Composition experiment -------------------------------------------------

// One round of the composition experiment, already bound to the adversary's
// chosen pair of neighboring inputs: `sample` runs the mechanism on input b,
// `classify` maps the output to its guarantee cell.
struct RoundChoice {
  OdpGuarantee guarantee;
  std::function<std::optional<double>(int b, NoiseSource&)> sample;
  std::function<CellId(const std::optional<double>&)> classify;
  std::string label;
};

// Adversary: sees the ledger and all previous outputs, picks the next round.
// Returning nullopt spends the rest of the rounds on a data-independent
// constant, which costs nothing.
using Strategy = std::function<std::optional<RoundChoice>(
    const LedgerState&, const std::vector<std::optional<double>>&)>;

// Runs the budgeted composition experiment for the hidden bit b and returns
// the adversary's view. Every chosen mechanism must pass admit; a strategy
// that overdraws the budget surfaces as ChargeRejected.
std::vector<std::optional<double>> composition_experiment(const Strategy& strategy,
                                                          const Budget& budget,
                                                          int b, int rounds,
                                                          NoiseSource& noise);

// Estimates a view event under b = 0/1 with paired per-trial seeds and checks
// the total budget's DP bound against it.
DistinguishResult check_composition_consistency(
    const Strategy& strategy, const Budget& budget, int rounds,
    const EventProbe<std::vector<std::optional<double>>>& probe, long trials,
    std::uint64_t seed);

// Canned single-mechanism scenarios for the CLI and the test canary:
// "toy", "laplace", "svt", "rr", and the deliberately broken "broken".
DistinguishResult run_builtin_verification(const std::string& mechanism,
                                           long trials, std::uint64_t seed);
const std::vector<std::string>& builtin_verification_names();

nlohmann::json distinguish_result_to_json(const DistinguishResult& result);

}  // namespace odp
