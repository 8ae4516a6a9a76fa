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

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "odp/guarantee.h"
#include "odp/noise.h"

namespace odp {

// Shared cell ids for two-cell mechanisms that either release a value or the
// bottom symbol.
inline const CellId kValueCell = CellId("real");
inline const CellId kBotCell = CellId("bot");

// Flips a fair coin; on heads releases f_value + Laplace(1/eps), on tails
// releases nothing. The bottom output is independent of the data, so it
// carries a zero epsilon in the mechanism's guarantee.
std::optional<double> toy_mechanism(double f_value, double eps, NoiseSource& noise);

// { real: eps, bot: 0 }, delta = 0.
OdpGuarantee toy_odp_guarantee(double eps);

// Parameters of the sparse vector technique.
struct SvtParams {
  double eps1;        // threshold-noise budget
  double eps2;        // answer-noise budget, split over up to c top answers
  int max_top_count;  // c
  double sensitivity; // per-query sensitivity bound

  SvtParams(double eps1, double eps2, int max_top_count, double sensitivity);
};

enum class SvtAnswer { kBot, kTop };

struct SvtTranscript {
  std::vector<SvtAnswer> answers;
  int top_count = 0;  // number of kTop entries
};

// Pull-based query stream; nullopt means STOP.
using QueryStream = std::function<std::optional<double>()>;

// Wraps a fixed list of query values into a stream that stops at the end.
QueryStream make_query_stream(std::vector<double> values);

// Runs the sparse vector technique: draws one threshold noise
// rho ~ Laplace(sensitivity/eps1), then per query
// nu_i ~ Laplace(2 * c * sensitivity / eps2) and answers top iff
// q_i + nu_i >= T_i + rho. Stops at STOP or after c top answers.
// `thresholds` must cover the stream length.
SvtTranscript svt_run(const SvtParams& params, const QueryStream& queries,
                      const std::vector<double>& thresholds, NoiseSource& noise);

// Cells "0".."c" where cell c' costs eps1 + (c'/c) * eps2; delta = 0. Only
// the realized number of top answers is charged, not the cap.
OdpGuarantee svt_odp_guarantee(const SvtParams& params);

// Splits an SVT budget at the noise-optimal ratio eps1/eps2 = (2c)^(-2/3).
// Returns (eps1, eps2) with eps1 + eps2 == eps_svt.
std::pair<double, double> split_svt_budget(double eps_svt, int c);

// Result of releasing the large entries of a vector through SVT.
struct SparseReleaseResult {
  std::vector<int> released_indices;
  std::vector<double> released_values;  // noised, same length as indices
  double per_entry_scale = 0.0;         // 0 when nothing was released
  int top_count = 0;                    // realized c'
  CellId realized_cell = CellId("0");
};

// Runs SVT on queries |values[i]| against `threshold`; the c' entries that
// answered top are released with Laplace noise of scale
// value_sensitivity * c' / eps3', where eps3' = eps3 + ((c - c') / c) * eps2
// reallocates the unspent SVT budget to the release stage.
SparseReleaseResult sparse_release(const std::vector<double>& values,
                                   double value_sensitivity,
                                   const SvtParams& params, double eps3,
                                   double threshold, NoiseSource& noise);

// Vector shape used in the sparse-release noise study: n_large entries at
// `large_value`, the rest at `small_value`.
struct SparseStudyConfig {
  int n_entries = 100;
  double large_value = 1000.0;
  double small_value = 0.0;
  double threshold = 500.0;
  double value_sensitivity = 1.0;
};

struct SparseNoiseRow {
  int n_large = 0;
  double odp_expected_noise = 0.0;   // Monte-Carlo mean of the per-entry scale
  double odp_noise_stddev = 0.0;     // sample stddev of the per-entry scale
  double baseline_noise = 0.0;       // fixed worst-case per-entry scale
  int trials = 0;
};

// Monte-Carlo estimate (over the SVT noise) of the expected per-entry
// absolute release noise under budget reallocation, next to the fixed
// worst-case baseline value_sensitivity * c / eps3. Runs with c' = 0 release
// nothing and contribute zero noise.
SparseNoiseRow sparse_release_noise_study(const SparseStudyConfig& config,
                                          int n_large, const SvtParams& params,
                                          double eps3, int trials,
                                          NoiseSource& noise);

}  // namespace odp
