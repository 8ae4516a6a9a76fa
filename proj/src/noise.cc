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
#include "odp/noise.h"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace odp {
namespace {

// splitmix64; used to decorrelate child seeds from (root_seed, stream).
std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

NoiseSource::NoiseSource(std::uint64_t seed)
    : root_seed_(seed), engine_(mix64(seed)) {}

NoiseSource::NoiseSource(std::optional<double> pinned_uniform)
    : pinned_(pinned_uniform), engine_(0) {}

NoiseSource NoiseSource::zero_noise() { return NoiseSource(std::optional<double>(0.5)); }

NoiseSource NoiseSource::pinned(double uniform_value) {
  if (!(uniform_value > 0.0 && uniform_value < 1.0)) {
    throw std::invalid_argument("pinned uniform value must lie in (0, 1)");
  }
  return NoiseSource(std::optional<double>(uniform_value));
}

double NoiseSource::uniform() {
  if (pinned_) return *pinned_;
  // 53 random bits mapped to the open interval (0, 1); bit-exact across
  // platforms, unlike std::uniform_real_distribution.
  const std::uint64_t bits = engine_() >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

double NoiseSource::laplace(double scale) {
  if (!(scale > 0.0)) throw std::invalid_argument("laplace scale must be positive");
  if (pinned_) return 0.0;
  const double u = uniform() - 0.5;  // in (-0.5, 0.5)
  const double sign = u < 0.0 ? -1.0 : 1.0;
  return -scale * sign * std::log1p(-2.0 * std::fabs(u));
}

double NoiseSource::normal() {
  if (pinned_) return 0.0;
  const double u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double NoiseSource::gamma(int shape, double scale) {
  if (shape < 1) throw std::invalid_argument("gamma shape must be a positive integer");
  if (!(scale > 0.0)) throw std::invalid_argument("gamma scale must be positive");
  if (pinned_) return 0.0;
  double sum = 0.0;
  for (int i = 0; i < shape; ++i) sum += -std::log(uniform());
  return scale * sum;
}

NoiseSource NoiseSource::fork(std::uint64_t stream) const {
  if (pinned_) return *this;
  return NoiseSource(mix64(root_seed_ ^ mix64(stream + 1)));
}

double laplace_quantile(double scale, double p) {
  if (!(scale > 0.0)) throw std::invalid_argument("laplace scale must be positive");
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("quantile level must lie in (0, 1)");
  if (p >= 0.5) return -scale * std::log(2.0 * (1.0 - p));
  return scale * std::log(2.0 * p);
}

}  // namespace odp
