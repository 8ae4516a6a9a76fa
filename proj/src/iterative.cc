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

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace odp {
namespace {

// log(1 + e^x) without overflow.
double log1pexp(double x) {
  if (x > 0.0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

double lchoose(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

struct TreeContext {
  std::vector<std::array<double, 4>> p0;  // per-iteration outcome probabilities, b = 0
  std::vector<std::array<double, 4>> p1;  // b = 1
  std::vector<int> stop_index_at_depth;   // -1 if the depth is not a stop
  std::vector<double> exp_eps;            // e^(target eps) per stop
  int last_depth = 0;
};

TreeContext make_context(const OptDeltaSpec& spec) {
  TreeContext ctx;
  ctx.last_depth = spec.schedule.last();
  ctx.p0.reserve(ctx.last_depth);
  ctx.p1.reserve(ctx.last_depth);
  for (const DpGuarantee& g : spec.params.per_iteration) {
    ctx.p0.push_back(rr_distribution(g.epsilon, g.delta, 0));
    ctx.p1.push_back(rr_distribution(g.epsilon, g.delta, 1));
  }
  ctx.stop_index_at_depth.assign(ctx.last_depth + 1, -1);
  for (int i = 0; i < spec.schedule.count(); ++i) {
    ctx.stop_index_at_depth[spec.schedule.stops[i]] = i;
  }
  ctx.exp_eps.reserve(spec.eps.eps_per_stop.size());
  for (double e : spec.eps.eps_per_stop) ctx.exp_eps.push_back(std::exp(e));
  return ctx;
}

// Value of the best prefix-disjoint selection inside the subtree rooted at a
// prefix of length `depth` with sequence probabilities (p0, p1). A node at
// stop depth i may be selected, contributing p0 - e^(eps_i) * p1, which
// forbids selecting any of its extensions; otherwise the four child subtrees
// contribute independently. Child values are always >= 0, so declining an
// entire subtree is covered by the sums.
double best_selection(const TreeContext& ctx, int depth, double p0, double p1) {
  const int stop = ctx.stop_index_at_depth[depth];
  if (depth == ctx.last_depth) {
    return std::max(p0 - ctx.exp_eps[stop] * p1, 0.0);
  }
  double children = 0.0;
  for (int symbol = 0; symbol < 4; ++symbol) {
    const double c0 = p0 * ctx.p0[depth][symbol];
    const double c1 = p1 * ctx.p1[depth][symbol];
    if (c0 == 0.0 && c1 == 0.0) continue;  // dead branch, value 0
    children += best_selection(ctx, depth + 1, c0, c1);
  }
  if (stop >= 0) return std::max(p0 - ctx.exp_eps[stop] * p1, children);
  return children;
}

// Sum of positive weights over all sequences of length `target_depth`; the
// unconstrained per-level optimum used by nonopt_delta.
double positive_mass_at_depth(const TreeContext& ctx, double exp_eps,
                              int target_depth, int depth, double p0, double p1) {
  if (depth == target_depth) return std::max(p0 - exp_eps * p1, 0.0);
  double sum = 0.0;
  for (int symbol = 0; symbol < 4; ++symbol) {
    const double c0 = p0 * ctx.p0[depth][symbol];
    const double c1 = p1 * ctx.p1[depth][symbol];
    if (c0 == 0.0 && c1 == 0.0) continue;
    sum += positive_mass_at_depth(ctx, exp_eps, target_depth, depth + 1, c0, c1);
  }
  return sum;
}

void check_cap(const OptDeltaSpec& spec, int depth_cap) {
  if (spec.schedule.last() > depth_cap) {
    throw std::invalid_argument(
        "final stop " + std::to_string(spec.schedule.last()) +
        " exceeds the depth cap " + std::to_string(depth_cap));
  }
}

}  // namespace

StopSchedule::StopSchedule(std::vector<int> s) : stops(std::move(s)) {
  if (stops.empty()) throw std::invalid_argument("schedule needs at least one stop");
  int prev = 0;
  for (int stop : stops) {
    if (stop <= prev) {
      throw std::invalid_argument("stops must be strictly increasing positive integers");
    }
    prev = stop;
  }
}

OptDeltaSpec::OptDeltaSpec(StopSchedule schedule_in, RrParams params_in,
                           EpsAssignment eps_in)
    : schedule(std::move(schedule_in)),
      params(std::move(params_in)),
      eps(std::move(eps_in)) {
  if (static_cast<int>(params.per_iteration.size()) != schedule.last()) {
    throw std::invalid_argument("need DP parameters for every iteration up to the last stop");
  }
  if (static_cast<int>(eps.eps_per_stop.size()) != schedule.count()) {
    throw std::invalid_argument("need one epsilon target per stop");
  }
  for (double e : eps.eps_per_stop) {
    if (!(e >= 0.0)) throw std::invalid_argument("epsilon targets must be non-negative");
  }
}

OptDeltaSpec OptDeltaSpec::from_json(const nlohmann::json& j) {
  StopSchedule schedule(j.at("stops").get<std::vector<int>>());
  const auto eps_list = j.at("eps").get<std::vector<double>>();
  const auto delta_list = j.at("delta").get<std::vector<double>>();
  if (eps_list.size() != delta_list.size()) {
    throw std::invalid_argument("eps and delta lists must have equal length");
  }
  RrParams params;
  params.per_iteration.reserve(eps_list.size());
  for (std::size_t k = 0; k < eps_list.size(); ++k) {
    params.per_iteration.emplace_back(eps_list[k], delta_list[k]);
  }
  EpsAssignment eps{j.at("eps_targets").get<std::vector<double>>()};
  return OptDeltaSpec(std::move(schedule), std::move(params), std::move(eps));
}

nlohmann::json OptDeltaSpec::to_json() const {
  std::vector<double> eps_list;
  std::vector<double> delta_list;
  for (const DpGuarantee& g : params.per_iteration) {
    eps_list.push_back(g.epsilon);
    delta_list.push_back(g.delta);
  }
  return nlohmann::json{{"stops", schedule.stops},
                        {"eps", eps_list},
                        {"delta", delta_list},
                        {"eps_targets", eps.eps_per_stop}};
}

std::array<double, 4> rr_distribution(double eps, double delta, int b) {
  if (!(eps >= 0.0)) throw std::invalid_argument("eps must be non-negative");
  if (!(delta >= 0.0 && delta <= 1.0)) throw std::invalid_argument("delta must lie in [0, 1]");
  if (b != 0 && b != 1) throw std::invalid_argument("input bit must be 0 or 1");
  const double e = std::exp(eps);
  const double high = (1.0 - delta) * e / (1.0 + e);
  const double low = (1.0 - delta) / (1.0 + e);
  if (b == 0) return {delta, high, low, 0.0};
  return {0.0, low, high, delta};
}

OdpGuarantee generic_odp_bound(const StopSchedule& schedule,
                               const CompositionTheorem& comp,
                               const EpsAssignment& eps_targets,
                               std::span<const DpGuarantee> mechanisms) {
  if (static_cast<int>(mechanisms.size()) != schedule.last()) {
    throw std::invalid_argument("need one mechanism guarantee per iteration");
  }
  if (static_cast<int>(eps_targets.eps_per_stop.size()) != schedule.count()) {
    throw std::invalid_argument("need one epsilon target per stop");
  }
  std::vector<SubsetDpGuarantee> parts;
  parts.reserve(schedule.count());
  for (int i = 0; i < schedule.count(); ++i) {
    const int prefix_len = schedule.stops[i];
    const double delta_i = comp(mechanisms.subspan(0, prefix_len),
                                eps_targets.eps_per_stop[i]);
    parts.emplace_back(CellId::from_index(prefix_len),
                       eps_targets.eps_per_stop[i], delta_i);
  }
  return combine_subset_dp(parts);
}

double opt_delta(const OptDeltaSpec& spec, int depth_cap) {
  check_cap(spec, depth_cap);
  const TreeContext ctx = make_context(spec);
  return best_selection(ctx, 0, 1.0, 1.0);
}

double nonopt_delta(const OptDeltaSpec& spec, int depth_cap) {
  check_cap(spec, depth_cap);
  const TreeContext ctx = make_context(spec);
  double delta = 0.0;
  for (int i = 0; i < spec.schedule.count(); ++i) {
    delta += positive_mass_at_depth(ctx, ctx.exp_eps[i], spec.schedule.stops[i],
                                    0, 1.0, 1.0);
  }
  return delta;
}

double homogeneous_opt_delta(int k, double eps, double eps_prime) {
  if (k < 1) throw std::invalid_argument("need at least one iteration");
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  if (!(eps_prime >= 0.0)) throw std::invalid_argument("eps_prime must be non-negative");
  // Pure mechanisms leave only the two middle randomized-response outcomes,
  // so sequence probabilities depend on the count j of heavy outcomes alone:
  //   Pr_0 = e^(j eps) / (1 + e^eps)^k,  Pr_1 = e^((k - j) eps) / (1 + e^eps)^k.
  // Summation runs in the log domain to survive large k.
  const double log_denom = k * log1pexp(eps);
  double total = 0.0;
  for (int j = 0; j <= k; ++j) {
    const double a = j * eps;
    const double b = eps_prime + (k - j) * eps;
    if (a <= b) continue;  // non-positive term
    const double log_a = lchoose(k, j) + a - log_denom;
    // e^log_a - e^(log_a - (a - b)) without cancellation.
    total += std::exp(log_a) * -std::expm1(b - a);
  }
  return total;
}

int min_iterations_for_advantage(double eps, double delta_max) {
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  if (!(delta_max > 0.0 && delta_max < 1.0)) {
    throw std::invalid_argument("delta_max must lie in (0, 1)");
  }
  constexpr int kMaxIterations = 10000;
  // Among the admissible targets (k - 2i) * eps with i >= 1, the delta is
  // smallest at i = 1, so that is the only candidate to test per k.
  for (int k = 2; k <= kMaxIterations; ++k) {
    if (homogeneous_opt_delta(k, eps, (k - 2) * eps) <= delta_max) return k;
  }
  throw std::runtime_error("no composition length up to 10000 gives an advantage");
}

}  // namespace odp
