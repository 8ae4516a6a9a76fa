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
#include "odp/mechanisms.h"

#include <cmath>
#include <memory>
#include <stdexcept>

namespace odp {

std::optional<double> toy_mechanism(double f_value, double eps, NoiseSource& noise) {
  if (!(eps > 0.0)) throw std::invalid_argument("toy mechanism needs eps > 0");
  const bool heads = noise.uniform() < 0.5;
  if (!heads) return std::nullopt;
  return f_value + noise.laplace(1.0 / eps);
}

OdpGuarantee toy_odp_guarantee(double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("toy mechanism needs eps > 0");
  return OdpGuarantee({{kValueCell, eps}, {kBotCell, 0.0}}, 0.0);
}

SvtParams::SvtParams(double eps1, double eps2, int max_top_count, double sensitivity)
    : eps1(eps1), eps2(eps2), max_top_count(max_top_count), sensitivity(sensitivity) {
  if (!(eps1 > 0.0) || !(eps2 > 0.0)) throw std::invalid_argument("SVT budgets must be positive");
  if (max_top_count < 1) throw std::invalid_argument("SVT top-answer cap must be >= 1");
  if (!(sensitivity > 0.0)) throw std::invalid_argument("SVT sensitivity must be positive");
}

QueryStream make_query_stream(std::vector<double> values) {
  auto state = std::make_shared<std::pair<std::vector<double>, std::size_t>>(
      std::move(values), 0);
  return [state]() -> std::optional<double> {
    if (state->second >= state->first.size()) return std::nullopt;
    return state->first[state->second++];
  };
}

SvtTranscript svt_run(const SvtParams& params, const QueryStream& queries,
                      const std::vector<double>& thresholds, NoiseSource& noise) {
  const double rho = noise.laplace(params.sensitivity / params.eps1);
  const double nu_scale =
      2.0 * params.max_top_count * params.sensitivity / params.eps2;

  SvtTranscript transcript;
  std::size_t i = 0;
  while (true) {
    if (transcript.top_count >= params.max_top_count) break;
    const std::optional<double> q = queries();
    if (!q) break;
    if (i >= thresholds.size()) {
      throw std::invalid_argument("query stream outran the threshold list");
    }
    const double nu = noise.laplace(nu_scale);
    if (*q + nu >= thresholds[i] + rho) {
      transcript.answers.push_back(SvtAnswer::kTop);
      ++transcript.top_count;
    } else {
      transcript.answers.push_back(SvtAnswer::kBot);
    }
    ++i;
  }
  return transcript;
}

OdpGuarantee svt_odp_guarantee(const SvtParams& params) {
  const int c = params.max_top_count;
  std::vector<OdpGuarantee::Cell> cells;
  cells.reserve(c + 1);
  for (int top = 0; top <= c; ++top) {
    const double eps = params.eps1 + (static_cast<double>(top) / c) * params.eps2;
    cells.emplace_back(CellId::from_index(top), eps);
  }
  return OdpGuarantee(std::move(cells), 0.0);
}

std::pair<double, double> split_svt_budget(double eps_svt, int c) {
  if (!(eps_svt > 0.0)) throw std::invalid_argument("SVT budget must be positive");
  if (c < 1) throw std::invalid_argument("SVT top-answer cap must be >= 1");
  const double ratio = std::pow(2.0 * c, 2.0 / 3.0);
  const double eps1 = eps_svt / (1.0 + ratio);
  return {eps1, eps_svt - eps1};
}

SparseReleaseResult sparse_release(const std::vector<double>& values,
                                   double value_sensitivity,
                                   const SvtParams& params, double eps3,
                                   double threshold, NoiseSource& noise) {
  if (!(eps3 > 0.0)) throw std::invalid_argument("release budget must be positive");
  if (!(value_sensitivity > 0.0)) {
    throw std::invalid_argument("value sensitivity must be positive");
  }

  std::vector<double> magnitudes;
  magnitudes.reserve(values.size());
  for (double v : values) magnitudes.push_back(std::fabs(v));
  const std::vector<double> thresholds(values.size(), threshold);
  const SvtTranscript transcript =
      svt_run(params, make_query_stream(magnitudes), thresholds, noise);

  SparseReleaseResult result;
  result.top_count = transcript.top_count;
  result.realized_cell = CellId::from_index(transcript.top_count);
  if (transcript.top_count == 0) return result;

  const int c = params.max_top_count;
  const int top = transcript.top_count;
  // Budget the SVT run did not consume flows into the release stage.
  const double eps3_prime =
      eps3 + (static_cast<double>(c - top) / c) * params.eps2;
  result.per_entry_scale = value_sensitivity * top / eps3_prime;
  for (std::size_t i = 0; i < transcript.answers.size(); ++i) {
    if (transcript.answers[i] == SvtAnswer::kTop) {
      result.released_indices.push_back(static_cast<int>(i));
      result.released_values.push_back(values[i] +
                                       noise.laplace(result.per_entry_scale));
    }
  }
  return result;
}

SparseNoiseRow sparse_release_noise_study(const SparseStudyConfig& config,
                                          int n_large, const SvtParams& params,
                                          double eps3, int trials,
                                          NoiseSource& noise) {
  if (trials < 1) throw std::invalid_argument("need at least one trial");
  if (n_large < 0 || n_large > config.n_entries) {
    throw std::invalid_argument("n_large must lie in [0, n_entries]");
  }
  if (!(eps3 > 0.0)) throw std::invalid_argument("release budget must be positive");

  std::vector<double> values(config.n_entries, config.small_value);
  for (int i = 0; i < n_large; ++i) values[i] = config.large_value;
  std::vector<double> magnitudes;
  magnitudes.reserve(values.size());
  for (double v : values) magnitudes.push_back(std::fabs(v));
  const std::vector<double> thresholds(values.size(), config.threshold);

  const int c = params.max_top_count;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int t = 0; t < trials; ++t) {
    NoiseSource trial_noise = noise.fork(static_cast<std::uint64_t>(t));
    const SvtTranscript transcript = svt_run(params, make_query_stream(magnitudes),
                                             thresholds, trial_noise);
    const int top = transcript.top_count;
    double scale = 0.0;
    if (top > 0) {
      const double eps3_prime =
          eps3 + (static_cast<double>(c - top) / c) * params.eps2;
      // E|Laplace(scale)| equals the scale, so averaging the scale estimates
      // the expected absolute noise without extra sampling variance.
      scale = config.value_sensitivity * top / eps3_prime;
    }
    sum += scale;
    sum_sq += scale * scale;
  }

  SparseNoiseRow row;
  row.n_large = n_large;
  row.trials = trials;
  row.odp_expected_noise = sum / trials;
  const double variance =
      trials > 1 ? std::max(0.0, (sum_sq - sum * sum / trials) / (trials - 1)) : 0.0;
  row.odp_noise_stddev = std::sqrt(variance);
  row.baseline_noise = config.value_sensitivity * c / eps3;
  return row;
}

}  // namespace odp
