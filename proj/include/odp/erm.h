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

#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "odp/guarantee.h"
#include "odp/noise.h"

namespace odp {

struct DataPoint {
  std::vector<double> x;  // ||x||_2 <= 1
  double y;               // in [-1, 1]
};

// Labeled dataset with the norm and label bounds enforced on ingestion.
class Dataset {
 public:
  explicit Dataset(std::vector<DataPoint> records);

  // CSV with columns x_1..x_d,y; a non-numeric first line is treated as a
  // header. With normalize_rows, covariates are scaled down to the unit ball
  // (rows already inside it are untouched).
  static Dataset from_csv(std::istream& in, bool normalize_rows = false);

  int size() const { return static_cast<int>(records_.size()); }
  int dim() const { return dim_; }
  const std::vector<DataPoint>& records() const { return records_; }

 private:
  std::vector<DataPoint> records_;
  int dim_ = 0;
};

struct ErmConfig {
  double lambda = 1.0;        // L2 regularization strength, > 0
  double tolerance = 1e-8;    // stop when the objective gradient norm drops below
  int max_iterations = 100000;
};

// Regularized logistic-regression objective
//   (1/n) sum ln(1 + exp(-y p.x)) + (lambda/2) ||p||^2
// and its gradient; exposed for the finite-difference checks.
double logreg_objective(std::span<const double> p, const Dataset& data, double lambda);
std::vector<double> logreg_gradient(std::span<const double> p, const Dataset& data,
                                    double lambda);

// Minimizes the objective by full-batch gradient descent with backtracking
// line search. The objective is lambda-strongly convex, so the minimizer is
// unique; returns once the gradient norm is at most cfg.tolerance. Throws on
// non-convergence within cfg.max_iterations.
std::vector<double> train_logreg(const Dataset& train, const ErmConfig& cfg);

// Noise vector of the output-perturbation release: norm distributed as
// Gamma(dim, 2 / (n_train * lambda * eps1)) with uniform direction, the
// normalization of a density proportional to
// exp(-(n_train * lambda * eps1 / 2) * ||q||_2).
std::vector<double> erm_perturbation_vector(int dim, int n_train, double lambda,
                                            double eps1, NoiseSource& noise);

// Output perturbation: the trained parameter vector plus a perturbation
// vector, matching the L2-sensitivity 2 / (n * lambda) of the minimizer.
std::vector<double> erm_output_perturb(const Dataset& train, double eps1,
                                       const ErmConfig& cfg, NoiseSource& noise);

// Mean absolute error of the logistic model on the test set; in [0, 2].
// Replacing one test record moves the score by at most 2 / n_test.
double error_score(std::span<const double> p, const Dataset& test);

// Scale parameter `a` of the test noise in the release test.
double release_test_sensitivity(int n_train, int n_test, double lambda);

// Two-cell guarantee of the tested release: the value cell costs
// max(eps1, (2/n_test)/a * eps2), the bottom cell the minimum of that and
// eps2; delta = 0. Holds for a change in either the train or the test set.
OdpGuarantee logreg_test_odp(double eps1, double eps2, int n_train, int n_test,
                             double lambda);

// Either a released model parameter vector or nothing, with the realized
// cell and the attached guarantee.
struct TestedOutput {
  std::optional<std::vector<double>> value;
  CellId realized_cell;
  OdpGuarantee guarantee;
};

// Trains privately on `train`, then releases the noisy model only if its
// noisy test error is at most `threshold`. A withheld model charges only the
// (smaller) test budget.
TestedOutput logreg_with_test(const Dataset& train, const Dataset& test,
                              double eps1, double eps2, const ErmConfig& cfg,
                              double threshold, NoiseSource& noise);

// One-sided percentile of the additive test noise for a database of size n
// split into train/test by train_frac. With `absolute`, the percentile of
// the noise magnitude instead.
double noise_percentile(int n, double eps2, double lambda, double train_frac,
                        double pct, bool absolute = false);

}  // namespace odp
