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
#include "odp/verify.h"

#include <cmath>
#include <stdexcept>

#include <boost/math/distributions/beta.hpp>

#include "odp/iterative.h"
#include "odp/mechanisms.h"

namespace odp {

std::pair<double, double> clopper_pearson(long successes, long trials,
                                          double confidence) {
  if (trials < 1) throw std::invalid_argument("need at least one trial");
  if (successes < 0 || successes > trials) {
    throw std::invalid_argument("success count out of range");
  }
  const double alpha = 1.0 - confidence;
  const double k = static_cast<double>(successes);
  const double n = static_cast<double>(trials);
  double lower = 0.0;
  double upper = 1.0;
  if (successes > 0) {
    boost::math::beta_distribution<> lo(k, n - k + 1.0);
    lower = boost::math::quantile(lo, alpha / 2.0);
  }
  if (successes < trials) {
    boost::math::beta_distribution<> hi(k + 1.0, n - k);
    upper = boost::math::quantile(hi, 1.0 - alpha / 2.0);
  }
  return {lower, upper};
}

DistinguishResult check_dp_bound(const EstimateResult& estimate, double eps,
                                 double delta) {
  if (!(eps >= 0.0)) throw std::invalid_argument("eps must be non-negative");
  if (!(delta >= 0.0 && delta <= 1.0)) throw std::invalid_argument("delta must lie in [0, 1]");
  DistinguishResult result;
  result.estimate = estimate;
  result.epsilon_claimed = eps;
  result.delta_claimed = delta;
  const double bound = std::exp(eps);
  const bool violated = estimate.p0_lo > bound * estimate.p1_hi + delta ||
                        estimate.p1_lo > bound * estimate.p0_hi + delta;
  result.verdict = violated ? Verdict::kViolated : Verdict::kConsistent;
  return result;
}

std::vector<std::optional<double>> composition_experiment(const Strategy& strategy,
                                                          const Budget& budget,
                                                          int b, int rounds,
                                                          NoiseSource& noise) {
  if (b != 0 && b != 1) throw std::invalid_argument("bit must be 0 or 1");
  if (rounds < 1) throw std::invalid_argument("need at least one round");
  LedgerState ledger(budget);
  std::vector<std::optional<double>> view;
  view.reserve(rounds);
  for (int round = 0; round < rounds; ++round) {
    const std::optional<RoundChoice> choice = strategy(ledger, view);
    if (!choice) {
      view.push_back(std::nullopt);  // data-independent filler round
      continue;
    }
    const std::optional<double> output = choice->sample(b, noise);
    ledger = ledger.charge(choice->guarantee, choice->classify(output),
                           choice->label);
    view.push_back(output);
  }
  return view;
}

DistinguishResult check_composition_consistency(
    const Strategy& strategy, const Budget& budget, int rounds,
    const EventProbe<std::vector<std::optional<double>>>& probe, long trials,
    std::uint64_t seed) {
  const std::function<std::vector<std::optional<double>>(const int&, NoiseSource&)>
      experiment = [&](const int& b, NoiseSource& noise) {
        return composition_experiment(strategy, budget, b, rounds, noise);
      };
  const EstimateResult estimate =
      estimate_event<std::vector<std::optional<double>>, int>(experiment, 0, 1,
                                                              probe, trials, seed);
  DistinguishResult result =
      check_dp_bound(estimate, budget.eps_total, budget.delta_total);
  result.probe_label = probe.label;
  return result;
}

namespace {

using ScalarMechanism = std::function<std::optional<double>(const double&, NoiseSource&)>;

DistinguishResult run_scalar_scenario(const ScalarMechanism& mechanism, double f0,
                                      double f1, const EventProbe<std::optional<double>>& probe,
                                      double claimed_eps, double claimed_delta,
                                      long trials, std::uint64_t seed) {
  const EstimateResult estimate = estimate_event<std::optional<double>, double>(
      mechanism, f0, f1, probe, trials, seed);
  DistinguishResult result = check_dp_bound(estimate, claimed_eps, claimed_delta);
  result.probe_label = probe.label;
  return result;
}

}  // namespace

const std::vector<std::string>& builtin_verification_names() {
  static const std::vector<std::string> kNames = {"toy", "laplace", "svt", "rr",
                                                  "broken"};
  return kNames;
}

DistinguishResult run_builtin_verification(const std::string& mechanism,
                                           long trials, std::uint64_t seed) {
  if (mechanism == "toy") {
    const double eps = 1.0;
    ScalarMechanism toy = [eps](const double& f, NoiseSource& noise) {
      return toy_mechanism(f, eps, noise);
    };
    EventProbe<std::optional<double>> probe{
        [](const std::optional<double>& out) { return out.has_value() && *out > 0.5; },
        "released value > 0.5"};
    return run_scalar_scenario(toy, 0.0, 1.0, probe, eps, 0.0, trials, seed);
  }
  if (mechanism == "laplace") {
    const double eps = 1.0;
    ScalarMechanism laplace = [eps](const double& f, NoiseSource& noise) {
      return f + noise.laplace(1.0 / eps);
    };
    EventProbe<std::optional<double>> probe{
        [](const std::optional<double>& out) { return out.has_value() && *out > 0.5; },
        "value > 0.5"};
    return run_scalar_scenario(laplace, 0.0, 1.0, probe, eps, 0.0, trials, seed);
  }
  if (mechanism == "svt") {
    // Neighboring inputs shift both query answers by the sensitivity.
    const SvtParams params(0.25, 0.25, 1, 1.0);
    ScalarMechanism svt = [params](const double& shift, NoiseSource& noise) {
      const std::vector<double> queries = {shift, shift};
      const std::vector<double> thresholds = {0.5, 0.5};
      const SvtTranscript t =
          svt_run(params, make_query_stream(queries), thresholds, noise);
      return std::optional<double>(static_cast<double>(t.top_count));
    };
    EventProbe<std::optional<double>> probe{
        [](const std::optional<double>& out) { return out.has_value() && *out >= 1.0; },
        "at least one top answer"};
    return run_scalar_scenario(svt, 0.0, 1.0, probe, params.eps1 + params.eps2, 0.0,
                               trials, seed);
  }
  if (mechanism == "rr") {
    const double eps = std::log(2.0);
    const double delta = 0.05;
    ScalarMechanism rr = [eps, delta](const double& b, NoiseSource& noise) {
      const std::array<double, 4> probs =
          rr_distribution(eps, delta, static_cast<int>(b));
      double u = noise.uniform();
      for (int outcome = 0; outcome < 4; ++outcome) {
        if (u < probs[outcome] || outcome == 3) {
          return std::optional<double>(static_cast<double>(outcome));
        }
        u -= probs[outcome];
      }
      return std::optional<double>(3.0);
    };
    // The event {0, 1} makes the DP inequality exactly tight.
    EventProbe<std::optional<double>> probe{
        [](const std::optional<double>& out) { return out.has_value() && *out <= 1.0; },
        "outcome in {0, 1}"};
    return run_scalar_scenario(rr, 0.0, 1.0, probe, eps, delta, trials, seed);
  }
  if (mechanism == "broken") {
    // Claims eps = 1 but adds Laplace noise at half the required scale.
    const double claimed_eps = 1.0;
    ScalarMechanism broken = [claimed_eps](const double& f, NoiseSource& noise) {
      return f + noise.laplace(0.5 / claimed_eps);
    };
    EventProbe<std::optional<double>> probe{
        [](const std::optional<double>& out) { return out.has_value() && *out > 2.0; },
        "upper tail value > 2"};
    return run_scalar_scenario(broken, 0.0, 1.0, probe, claimed_eps, 0.0, trials, seed);
  }
  throw std::invalid_argument("unknown verification scenario: " + mechanism);
}

nlohmann::json distinguish_result_to_json(const DistinguishResult& result) {
  return nlohmann::json{
      {"trials", result.estimate.trials},
      {"p0_hat", result.estimate.p0_hat},
      {"p0_ci", {result.estimate.p0_lo, result.estimate.p0_hi}},
      {"p1_hat", result.estimate.p1_hat},
      {"p1_ci", {result.estimate.p1_lo, result.estimate.p1_hi}},
      {"epsilon_claimed", result.epsilon_claimed},
      {"delta_claimed", result.delta_claimed},
      {"probe", result.probe_label},
      {"verdict",
       result.verdict == Verdict::kViolated ? "violated" : "consistent"}};
}

}  // namespace odp
