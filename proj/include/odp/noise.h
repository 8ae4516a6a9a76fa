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
#include <optional>
#include <random>

namespace odp {

// Seeded randomness provider for all mechanisms. Same seed, same stream.
//
// Two test modes exist besides the seeded mode:
//   * zero_noise(): uniform() returns 0.5 and every noise draw returns 0,
//     turning mechanisms into their noiseless counterparts.
//   * pinned(u): like zero_noise() but uniform() returns u, which lets tests
//     force coin flips either way.
class NoiseSource {
 public:
  explicit NoiseSource(std::uint64_t seed);

  static NoiseSource zero_noise();
  static NoiseSource pinned(double uniform_value);

  // Uniform draw strictly inside (0, 1).
  double uniform();

  // Zero-centered Laplace draw with the given scale (scale > 0).
  double laplace(double scale);

  // Standard normal draw (Box-Muller).
  double normal();

  // Gamma draw with integer shape >= 1 and the given scale, built as a sum
  // of exponentials so the stream stays reproducible.
  double gamma(int shape, double scale);

  // Child source derived from this source's seed and `stream`. Forking does
  // not consume randomness and does not depend on how many draws have been
  // made, so replays can re-derive the same children.
  NoiseSource fork(std::uint64_t stream) const;

  bool deterministic() const { return pinned_.has_value(); }

 private:
  explicit NoiseSource(std::optional<double> pinned_uniform);

  std::optional<double> pinned_;
  std::uint64_t root_seed_ = 0;
  std::mt19937_64 engine_;
};

// Inverse CDF of the zero-centered Laplace distribution with the given scale,
// evaluated at p in (0, 1).
double laplace_quantile(double scale, double p);

}  // namespace odp
