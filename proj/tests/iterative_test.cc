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
#include "odp/iterative.h"

#include <cmath>
#include <random>

#include "gtest/gtest.h"
#include "optdelta_oracle.h"

namespace odp {
namespace {

OptDeltaSpec homogeneous_spec(int k, double eps, double eps_prime) {
  RrParams params;
  for (int i = 0; i < k; ++i) params.per_iteration.emplace_back(eps, 0.0);
  return OptDeltaSpec(StopSchedule({k}), std::move(params),
                      EpsAssignment{{eps_prime}});
}

TEST(RrDistribution, MatchesTheFourOutcomeTable) {
  const auto p0 = rr_distribution(std::log(3.0), 0.1, 0);
  EXPECT_NEAR(p0[0], 0.1, 1e-15);
  EXPECT_NEAR(p0[1], 0.675, 1e-15);
  EXPECT_NEAR(p0[2], 0.225, 1e-15);
  EXPECT_NEAR(p0[3], 0.0, 1e-15);
  const auto p1 = rr_distribution(std::log(3.0), 0.1, 1);
  EXPECT_NEAR(p1[0], 0.0, 1e-15);
  EXPECT_NEAR(p1[1], 0.225, 1e-15);
  EXPECT_NEAR(p1[2], 0.675, 1e-15);
  EXPECT_NEAR(p1[3], 0.1, 1e-15);
}

TEST(RrDistribution, UninformativeAtZeroBudget) {
  for (int b : {0, 1}) {
    const auto p = rr_distribution(0.0, 0.0, b);
    EXPECT_DOUBLE_EQ(p[0], 0.0);
    EXPECT_DOUBLE_EQ(p[1], 0.5);
    EXPECT_DOUBLE_EQ(p[2], 0.5);
    EXPECT_DOUBLE_EQ(p[3], 0.0);
  }
}

TEST(RrDistribution, NormalizedAndDpOnEverySubset) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> eps_dist(0.0, 2.0);
  std::uniform_real_distribution<double> delta_dist(0.0, 0.5);
  for (int trial = 0; trial < 200; ++trial) {
    const double eps = eps_dist(rng);
    const double delta = delta_dist(rng);
    const auto p0 = rr_distribution(eps, delta, 0);
    const auto p1 = rr_distribution(eps, delta, 1);
    EXPECT_NEAR(p0[0] + p0[1] + p0[2] + p0[3], 1.0, 1e-12);
    EXPECT_NEAR(p1[0] + p1[1] + p1[2] + p1[3], 1.0, 1e-12);
    const double bound = std::exp(eps);
    for (int mask = 0; mask < 16; ++mask) {
      double m0 = 0.0;
      double m1 = 0.0;
      for (int s = 0; s < 4; ++s) {
        if (mask >> s & 1) {
          m0 += p0[s];
          m1 += p1[s];
        }
      }
      EXPECT_LE(m0, bound * m1 + delta + 1e-12);
      EXPECT_LE(m1, bound * m0 + delta + 1e-12);
    }
  }
}

TEST(RunIterative, StopsAtFirstSatisfiedCriterion) {
  using Db = int;
  std::vector<StepMechanism<Db>> mechanisms;
  for (int k = 0; k < 6; ++k) {
    mechanisms.push_back([k](std::span<const double>, const Db&, NoiseSource&) {
      return static_cast<double>(k);
    });
  }
  const StopSchedule schedule({2, 4, 6});
  NoiseSource noise(1);

  const std::vector<StopCriterion> never = {
      [](std::span<const double>) { return false; },
      [](std::span<const double>) { return false; }};
  const IterativeTranscript full =
      run_iterative<Db>(mechanisms, schedule, never, 0, noise);
  EXPECT_EQ(full.outputs.size(), 6u);
  EXPECT_EQ(full.stopped_at, 6);
  EXPECT_EQ(full.realized_cell_index, 2);

  const std::vector<StopCriterion> immediately = {
      [](std::span<const double>) { return true; },
      [](std::span<const double>) { return false; }};
  const IterativeTranscript first =
      run_iterative<Db>(mechanisms, schedule, immediately, 0, noise);
  EXPECT_EQ(first.outputs.size(), 2u);
  EXPECT_EQ(first.stopped_at, 2);
  EXPECT_EQ(first.realized_cell_index, 0);
}

TEST(RunIterative, CriteriaSeeOnlyReleasedOutputs) {
  using Db = int;
  std::vector<StepMechanism<Db>> mechanisms;
  for (int k = 0; k < 4; ++k) {
    mechanisms.push_back([](std::span<const double> prior, const Db& db,
                            NoiseSource&) { return db + prior.size(); });
  }
  // The criterion keys on the released values, not the database.
  const std::vector<StopCriterion> on_outputs = {
      [](std::span<const double> outputs) { return outputs.back() >= 11.0; }};
  NoiseSource noise(1);
  const IterativeTranscript early = run_iterative<Db>(
      mechanisms, StopSchedule({2, 4}), on_outputs, 10, noise);
  EXPECT_EQ(early.stopped_at, 2);
  const IterativeTranscript late = run_iterative<Db>(
      mechanisms, StopSchedule({2, 4}), on_outputs, 0, noise);
  EXPECT_EQ(late.stopped_at, 4);
}

TEST(RunIterative, ValidatesShapes) {
  using Db = int;
  std::vector<StepMechanism<Db>> mechanisms(3, [](std::span<const double>, const Db&,
                                                  NoiseSource&) { return 0.0; });
  NoiseSource noise(1);
  EXPECT_THROW(run_iterative<Db>(mechanisms, StopSchedule({2, 4}), {}, 0, noise),
               std::invalid_argument);
  const std::vector<StopCriterion> one = {[](std::span<const double>) { return false; }};
  EXPECT_THROW(run_iterative<Db>(mechanisms, StopSchedule({2, 3}), {one[0], one[0]},
                                 0, noise),
               std::invalid_argument);
}

TEST(StopSchedule, MustBeStrictlyIncreasing) {
  EXPECT_THROW(StopSchedule({}), std::invalid_argument);
  EXPECT_THROW(StopSchedule({0, 2}), std::invalid_argument);
  EXPECT_THROW(StopSchedule({2, 2}), std::invalid_argument);
  EXPECT_THROW(StopSchedule({3, 2}), std::invalid_argument);
}

TEST(GenericOdpBound, SimpleCompositionTargets) {
  const CompositionTheorem simple = [](std::span<const DpGuarantee> prefix,
                                       double target) {
    double total = 0.0;
    for (const DpGuarantee& g : prefix) total += g.epsilon;
    if (total > target + 1e-12) {
      throw std::invalid_argument("target below the simple-composition epsilon");
    }
    return 0.0;
  };
  std::vector<DpGuarantee> mechanisms(4, DpGuarantee(0.1, 0.0));
  const OdpGuarantee g = generic_odp_bound(StopSchedule({2, 4}), simple,
                                           EpsAssignment{{0.2, 0.4}}, mechanisms);
  EXPECT_DOUBLE_EQ(g.epsilon_of(CellId::from_index(2)), 0.2);
  EXPECT_DOUBLE_EQ(g.epsilon_of(CellId::from_index(4)), 0.4);
  EXPECT_DOUBLE_EQ(g.delta(), 0.0);

  EXPECT_THROW(generic_odp_bound(StopSchedule({2, 4}), simple,
                                 EpsAssignment{{0.1, 0.4}}, mechanisms),
               std::invalid_argument);
}

TEST(GenericOdpBound, OptimalPerPrefixMatchesPerLevelDelta) {
  // Plugging the homogeneous optimal-composition theorem into the generic
  // bound reproduces the per-level relaxation exactly.
  const double eps = 0.3;
  const CompositionTheorem optimal = [](std::span<const DpGuarantee> prefix,
                                        double target) {
    return homogeneous_opt_delta(static_cast<int>(prefix.size()),
                                 prefix[0].epsilon, target);
  };
  std::vector<DpGuarantee> mechanisms(5, DpGuarantee(eps, 0.0));
  const EpsAssignment targets{{0.4, 0.9}};
  const StopSchedule schedule({2, 5});
  const OdpGuarantee g = generic_odp_bound(schedule, optimal, targets, mechanisms);

  RrParams params;
  for (int i = 0; i < 5; ++i) params.per_iteration.emplace_back(eps, 0.0);
  const OptDeltaSpec spec(StopSchedule({2, 5}), std::move(params),
                          EpsAssignment{{0.4, 0.9}});
  EXPECT_NEAR(g.delta(), nonopt_delta(spec), 1e-12);
}

TEST(GenericOdpBound, SingleStopDegeneratesToPlainComposition) {
  const CompositionTheorem optimal = [](std::span<const DpGuarantee> prefix,
                                        double target) {
    return homogeneous_opt_delta(static_cast<int>(prefix.size()),
                                 prefix[0].epsilon, target);
  };
  std::vector<DpGuarantee> mechanisms(3, DpGuarantee(0.2, 0.0));
  const OdpGuarantee g = generic_odp_bound(StopSchedule({3}), optimal,
                                           EpsAssignment{{0.3}}, mechanisms);
  EXPECT_NEAR(g.delta(), homogeneous_opt_delta(3, 0.2, 0.3), 1e-15);
}

TEST(OptDelta, SingleBinaryMechanismTotalVariation) {
  // One ln(2)-DP mechanism with a zero target: the best distinguisher event
  // attains the total variation (e^eps - 1) / (e^eps + 1) = 1/3.
  const OptDeltaSpec spec = homogeneous_spec(1, std::log(2.0), 0.0);
  EXPECT_NEAR(opt_delta(spec), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(testing::optdelta_bruteforce(spec), 1.0 / 3.0, 1e-15);
}

TEST(OptDelta, OwnGuaranteeIsTightForRandomizedResponse) {
  // Target equal to the mechanism's own epsilon leaves exactly its delta.
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> eps_dist(0.0, 1.5);
  std::uniform_real_distribution<double> delta_dist(0.0, 0.4);
  for (int i = 0; i < 50; ++i) {
    const double eps = eps_dist(rng);
    const double delta = delta_dist(rng);
    RrParams params;
    params.per_iteration.emplace_back(eps, delta);
    const OptDeltaSpec spec(StopSchedule({1}), std::move(params),
                            EpsAssignment{{eps}});
    EXPECT_NEAR(opt_delta(spec), delta, 1e-12);
  }
}

TEST(OptDelta, MatchesBruteForceOnShallowSpecs) {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 200; ++i) {
    const OptDeltaSpec spec = testing::random_spec(rng, 2);
    EXPECT_NEAR(opt_delta(spec), testing::optdelta_bruteforce(spec), 1e-12);
    EXPECT_NEAR(nonopt_delta(spec), testing::nonopt_bruteforce(spec), 1e-12);
  }
}

TEST(OptDelta, NeverExceedsNonOpt) {
  std::mt19937_64 rng(37);
  for (int i = 0; i < 100; ++i) {
    const OptDeltaSpec spec = testing::random_spec(rng, 6);
    EXPECT_LE(opt_delta(spec), nonopt_delta(spec) + 1e-15);
  }
}

TEST(OptDelta, SingleStopHasNoDisjointnessConstraint) {
  // With one stop the prefix-disjointness constraint is vacuous and the two
  // formulations coincide.
  std::mt19937_64 rng(39);
  std::uniform_real_distribution<double> eps_dist(0.0, 1.5);
  std::uniform_real_distribution<double> delta_dist(0.0, 0.3);
  for (int i = 0; i < 50; ++i) {
    const int k = 1 + static_cast<int>(rng() % 5);
    RrParams params;
    for (int j = 0; j < k; ++j) {
      params.per_iteration.emplace_back(eps_dist(rng), delta_dist(rng));
    }
    const OptDeltaSpec spec(StopSchedule({k}), std::move(params),
                            EpsAssignment{{eps_dist(rng)}});
    EXPECT_DOUBLE_EQ(opt_delta(spec), nonopt_delta(spec));
  }
}

TEST(OptDelta, MonotoneNonIncreasingInEveryTarget) {
  std::mt19937_64 rng(41);
  for (int i = 0; i < 50; ++i) {
    OptDeltaSpec spec = testing::random_spec(rng, 5);
    const double base = opt_delta(spec);
    for (std::size_t j = 0; j < spec.eps.eps_per_stop.size(); ++j) {
      EpsAssignment bumped = spec.eps;
      bumped.eps_per_stop[j] += 0.25;
      const OptDeltaSpec larger(spec.schedule, spec.params, bumped);
      EXPECT_LE(opt_delta(larger), base + 1e-15);
    }
  }
}

TEST(OptDelta, StrictGapWhenEveryIterationHasPositiveDelta) {
  // With delta_k > 0 on every iteration, each per-level maximizer must keep
  // the all-heavy sequence, which prefix-disjointness forbids across levels.
  std::mt19937_64 rng(43);
  for (int i = 0; i < 50; ++i) {
    const OptDeltaSpec spec =
        testing::random_spec(rng, 5, /*force_two_stops=*/true,
                             /*delta_low=*/0.005, /*delta_high=*/0.1);
    EXPECT_LT(opt_delta(spec), nonopt_delta(spec));
  }
}

TEST(OptDelta, PureSimpleCompositionNeedsNoDelta) {
  // delta_k = 0 everywhere and targets at the simple-composition epsilon:
  // both formulations report zero.
  std::mt19937_64 rng(47);
  std::uniform_real_distribution<double> eps_dist(0.05, 0.8);
  for (int i = 0; i < 50; ++i) {
    const int last = 2 + static_cast<int>(rng() % 4);
    RrParams params;
    std::vector<double> prefix_sums;
    double total = 0.0;
    for (int k = 0; k < last; ++k) {
      const double eps = eps_dist(rng);
      params.per_iteration.emplace_back(eps, 0.0);
      total += eps;
      prefix_sums.push_back(total);
    }
    const int first_stop = 1 + static_cast<int>(rng() % (last - 1));
    const OptDeltaSpec spec(
        StopSchedule({first_stop, last}), std::move(params),
        EpsAssignment{{prefix_sums[first_stop - 1], prefix_sums[last - 1]}});
    EXPECT_NEAR(opt_delta(spec), 0.0, 1e-15);
    EXPECT_NEAR(nonopt_delta(spec), 0.0, 1e-15);
  }
}

TEST(OptDelta, EnforcesDepthCap) {
  const OptDeltaSpec spec = homogeneous_spec(4, 0.1, 0.1);
  EXPECT_THROW(opt_delta(spec, /*depth_cap=*/3), std::invalid_argument);
  EXPECT_NO_THROW(opt_delta(spec, /*depth_cap=*/4));
}

TEST(HomogeneousOptDelta, ClosedFormEdgeCases) {
  // Simple-composition target: no distinguishing mass is left over.
  EXPECT_DOUBLE_EQ(homogeneous_opt_delta(7, 0.3, 7 * 0.3), 0.0);
  // Single mechanism, zero target: total variation.
  const double eps = 0.8;
  EXPECT_NEAR(homogeneous_opt_delta(1, eps, 0.0),
              (std::exp(eps) - 1.0) / (std::exp(eps) + 1.0), 1e-15);
}

TEST(HomogeneousOptDelta, AgreesWithTreeDp) {
  std::mt19937_64 rng(53);
  std::uniform_real_distribution<double> eps_dist(0.05, 1.2);
  for (int i = 0; i < 100; ++i) {
    const int k = 1 + static_cast<int>(rng() % 8);
    const double eps = eps_dist(rng);
    const double target = std::uniform_real_distribution<double>(0.0, k * eps)(rng);
    EXPECT_NEAR(homogeneous_opt_delta(k, eps, target),
                opt_delta(homogeneous_spec(k, eps, target)), 1e-12)
        << "k=" << k << " eps=" << eps << " target=" << target;
  }
}

TEST(HomogeneousOptDelta, NonIncreasingInTarget) {
  const int k = 5;
  const double eps = 0.4;
  double prev = 1.0;
  for (double target = 0.0; target <= k * eps + 1e-9; target += 0.05) {
    const double delta = homogeneous_opt_delta(k, eps, target);
    EXPECT_LE(delta, prev + 1e-15);
    prev = delta;
  }
}

TEST(HomogeneousOptDelta, StableForLargeCompositions) {
  const double delta = homogeneous_opt_delta(2000, 0.1, 1800 * 0.1);
  EXPECT_GE(delta, 0.0);
  EXPECT_LE(delta, 1.0);
  EXPECT_TRUE(std::isfinite(delta));
}

TEST(MinIterationsForAdvantage, SelfConsistentThreshold) {
  // The returned k is the first admitting an improvement step within the
  // delta bound: k - 1 must fail, k must succeed.
  for (const auto& [eps, delta_max] : std::vector<std::pair<double, double>>{
           {0.1, 1e-5}, {0.1, 1e-9}, {0.25, 1e-6}, {0.5, 1e-8}}) {
    const int k = min_iterations_for_advantage(eps, delta_max);
    EXPECT_LE(homogeneous_opt_delta(k, eps, (k - 2) * eps), delta_max);
    EXPECT_GT(homogeneous_opt_delta(k - 1, eps, (k - 3) * eps), delta_max);
  }
}

TEST(MinIterationsForAdvantage, MonotoneInDeltaBound) {
  // A looser delta bound never needs more mechanisms.
  int prev = 0;
  for (double exponent = 5.0; exponent <= 12.0; exponent += 1.0) {
    const int k = min_iterations_for_advantage(0.1, std::pow(10.0, -exponent));
    EXPECT_GE(k, prev);
    EXPECT_GE(k, 2);
    prev = k;
  }
}

TEST(OptDeltaSpec, JsonRoundTripAndValidation) {
  const nlohmann::json j = {{"stops", {1, 2}},
                            {"eps", {0.5, 0.25}},
                            {"delta", {0.01, 0.0}},
                            {"eps_targets", {0.5, 0.75}}};
  const OptDeltaSpec spec = OptDeltaSpec::from_json(j);
  EXPECT_EQ(spec.schedule.stops, (std::vector<int>{1, 2}));
  EXPECT_EQ(spec.to_json(), j);

  nlohmann::json bad = j;
  bad["eps_targets"] = {0.5};
  EXPECT_THROW(OptDeltaSpec::from_json(bad), std::invalid_argument);
  bad = j;
  bad["eps"] = {0.5};
  EXPECT_THROW(OptDeltaSpec::from_json(bad), std::invalid_argument);
}

}  // namespace
}  // namespace odp
