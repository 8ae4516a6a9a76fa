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
#include "odp/guarantee.h"

#include <algorithm>
#include <random>

#include "gtest/gtest.h"

namespace odp {
namespace {

TEST(DpToOdp, ConstantEpsilonOnEveryCell) {
  const OdpGuarantee g =
      dp_to_odp(DpGuarantee(1.0, 0.0), {CellId("A"), CellId("B")});
  ASSERT_EQ(g.cells().size(), 2u);
  EXPECT_DOUBLE_EQ(g.epsilon_of(CellId("A")), 1.0);
  EXPECT_DOUBLE_EQ(g.epsilon_of(CellId("B")), 1.0);
  EXPECT_DOUBLE_EQ(g.delta(), 0.0);
}

TEST(DpToOdp, SingleCellPartition) {
  const OdpGuarantee g = dp_to_odp(DpGuarantee(0.5, 1e-5), {CellId("only")});
  EXPECT_DOUBLE_EQ(g.epsilon_of(CellId("only")), 0.5);
  EXPECT_DOUBLE_EQ(g.delta(), 1e-5);
}

TEST(DpToOdp, NullMechanism) {
  const OdpGuarantee g =
      dp_to_odp(DpGuarantee(0.0, 0.0), {CellId("A"), CellId("B"), CellId("C")});
  for (const auto& [id, eps] : g.cells()) EXPECT_DOUBLE_EQ(eps, 0.0);
  EXPECT_DOUBLE_EQ(g.delta(), 0.0);
}

TEST(DpToOdp, RejectsEmptyAndDuplicateCells) {
  EXPECT_THROW(dp_to_odp(DpGuarantee(1.0, 0.0), {}), std::invalid_argument);
  EXPECT_THROW(dp_to_odp(DpGuarantee(1.0, 0.0), {CellId("A"), CellId("A")}),
               std::invalid_argument);
}

TEST(OdpToDp, TakesSupremumOverCells) {
  const OdpGuarantee toy({{CellId("real"), 0.3}, {CellId("bot"), 0.0}}, 0.0);
  const DpGuarantee dp = odp_to_dp(toy);
  EXPECT_DOUBLE_EQ(dp.epsilon, 0.3);
  EXPECT_DOUBLE_EQ(dp.delta, 0.0);

  const OdpGuarantee two({{CellId("A"), 0.2}, {CellId("B"), 0.7}}, 1e-6);
  EXPECT_DOUBLE_EQ(odp_to_dp(two).epsilon, 0.7);
  EXPECT_DOUBLE_EQ(odp_to_dp(two).delta, 1e-6);
}

TEST(OdpToDp, RoundTripIsIdentityOnDpGuarantees) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> eps_dist(0.0, 3.0);
  std::uniform_real_distribution<double> delta_dist(0.0, 1.0);
  std::uniform_int_distribution<int> cells_dist(1, 8);
  for (int i = 0; i < 200; ++i) {
    const DpGuarantee g(eps_dist(rng), delta_dist(rng));
    std::vector<CellId> cells;
    const int n = cells_dist(rng);
    for (int k = 0; k < n; ++k) cells.push_back(CellId::from_index(k));
    const DpGuarantee back = odp_to_dp(dp_to_odp(g, cells));
    EXPECT_DOUBLE_EQ(back.epsilon, g.epsilon);
    EXPECT_DOUBLE_EQ(back.delta, g.delta);
  }
}

TEST(CombineSubsetDp, KeepsEpsilonsAndSumsDeltas) {
  const double eps = 0.1;
  const double delta = 1e-6;
  const OdpGuarantee g = combine_subset_dp(
      {SubsetDpGuarantee(CellId("real"), 3 * eps, delta),
       SubsetDpGuarantee(CellId("bot"), 2 * eps, 0.0)});
  EXPECT_DOUBLE_EQ(g.epsilon_of(CellId("real")), 0.3);
  EXPECT_DOUBLE_EQ(g.epsilon_of(CellId("bot")), 0.2);
  EXPECT_DOUBLE_EQ(g.delta(), delta);

  const OdpGuarantee h =
      combine_subset_dp({SubsetDpGuarantee(CellId("A"), 0.1, 1e-6),
                         SubsetDpGuarantee(CellId("B"), 0.2, 2e-6)});
  EXPECT_DOUBLE_EQ(h.delta(), 3e-6);
}

TEST(CombineSubsetDp, SinglePart) {
  const OdpGuarantee g =
      combine_subset_dp({SubsetDpGuarantee(CellId("only"), 0.4, 0.25)});
  ASSERT_EQ(g.cells().size(), 1u);
  EXPECT_DOUBLE_EQ(g.epsilon_of(CellId("only")), 0.4);
  EXPECT_DOUBLE_EQ(g.delta(), 0.25);
}

TEST(CombineSubsetDp, RejectsDuplicatesAndEmptyInput) {
  EXPECT_THROW(combine_subset_dp({}), std::invalid_argument);
  EXPECT_THROW(combine_subset_dp({SubsetDpGuarantee(CellId("A"), 0.1, 0.0),
                                  SubsetDpGuarantee(CellId("A"), 0.2, 0.0)}),
               std::invalid_argument);
}

TEST(CombineSubsetDp, PermutationInvariant) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> eps_dist(0.0, 2.0);
  std::uniform_real_distribution<double> delta_dist(0.0, 0.3);
  for (int i = 0; i < 100; ++i) {
    std::vector<SubsetDpGuarantee> parts;
    const int n = 1 + static_cast<int>(rng() % 6);
    for (int k = 0; k < n; ++k) {
      parts.emplace_back(CellId::from_index(k), eps_dist(rng), delta_dist(rng));
    }
    const OdpGuarantee base = combine_subset_dp(parts);
    std::shuffle(parts.begin(), parts.end(), rng);
    const OdpGuarantee shuffled = combine_subset_dp(parts);
    EXPECT_DOUBLE_EQ(base.delta(), shuffled.delta());
    for (const auto& [id, eps] : base.cells()) {
      EXPECT_DOUBLE_EQ(shuffled.epsilon_of(id), eps);
    }
  }
}

TEST(CombineSubsetDp, DeltaCapTriggersOnlyAboveOne) {
  const OdpGuarantee below =
      combine_subset_dp({SubsetDpGuarantee(CellId("A"), 0.0, 0.6),
                         SubsetDpGuarantee(CellId("B"), 0.0, 0.4)});
  EXPECT_DOUBLE_EQ(below.delta(), 1.0);
  const OdpGuarantee capped =
      combine_subset_dp({SubsetDpGuarantee(CellId("A"), 0.0, 0.7),
                         SubsetDpGuarantee(CellId("B"), 0.0, 0.7)});
  EXPECT_DOUBLE_EQ(capped.delta(), 1.0);
}

TEST(OdpGuarantee, ValidatesInvariants) {
  EXPECT_THROW(OdpGuarantee({}, 0.0), std::invalid_argument);
  EXPECT_THROW(OdpGuarantee({{CellId("A"), -0.1}}, 0.0), std::invalid_argument);
  EXPECT_THROW(OdpGuarantee({{CellId("A"), 0.1}}, 1.5), std::invalid_argument);
  EXPECT_THROW(OdpGuarantee({{CellId("A"), 0.1}, {CellId("A"), 0.2}}, 0.0),
               std::invalid_argument);
  const OdpGuarantee g({{CellId("A"), 0.1}}, 0.0);
  EXPECT_THROW(g.epsilon_of(CellId("missing")), UnknownCell);
}

TEST(OdpGuarantee, JsonRoundTrip) {
  const OdpGuarantee g({{CellId("real"), 0.3}, {CellId("bot"), 0.2}}, 1e-6);
  nlohmann::json j = g;
  const auto back = j.get<OdpGuarantee>();
  EXPECT_EQ(back.cells().size(), g.cells().size());
  EXPECT_DOUBLE_EQ(back.delta(), g.delta());
  EXPECT_DOUBLE_EQ(back.epsilon_of(CellId("real")), 0.3);
  EXPECT_DOUBLE_EQ(back.epsilon_of(CellId("bot")), 0.2);
  EXPECT_EQ(j.at("cells").size(), 2u);
}

}  // namespace
}  // namespace odp
