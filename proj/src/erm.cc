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
#include "odp/erm.h"

#include <algorithm>
#include <cmath>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "odp/mechanisms.h"

namespace odp {
namespace {

constexpr double kNormSlack = 1e-9;  // ingestion tolerance for ||x|| <= 1

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> v) { return std::sqrt(dot(v, v)); }

// ln(1 + e^-z), stable for both signs of z.
double softplus_neg(double z) {
  if (z > 0.0) return std::log1p(std::exp(-z));
  return -z + std::log1p(std::exp(z));
}

double logistic(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

std::vector<double> parse_csv_line(const std::string& line) {
  std::vector<double> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) {
    fields.push_back(std::stod(field));
  }
  return fields;
}

}  // namespace

Dataset::Dataset(std::vector<DataPoint> records) : records_(std::move(records)) {
  if (records_.empty()) throw std::invalid_argument("dataset must not be empty");
  dim_ = static_cast<int>(records_[0].x.size());
  if (dim_ == 0) throw std::invalid_argument("records need at least one covariate");
  for (const DataPoint& r : records_) {
    if (static_cast<int>(r.x.size()) != dim_) {
      throw std::invalid_argument("all records must have the same dimension");
    }
    if (!(norm2(r.x) <= 1.0 + kNormSlack)) {
      throw std::invalid_argument("covariate norm exceeds 1");
    }
    if (!(r.y >= -1.0 && r.y <= 1.0)) {
      throw std::invalid_argument("label outside [-1, 1]");
    }
  }
}

Dataset Dataset::from_csv(std::istream& in, bool normalize_rows) {
  std::vector<DataPoint> records;
  std::string line;
  bool first = true;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::vector<double> fields;
    try {
      fields = parse_csv_line(line);
    } catch (const std::exception&) {
      if (first) {  // header row
        first = false;
        continue;
      }
      throw std::invalid_argument("line " + std::to_string(line_number) +
                                  ": malformed CSV row");
    }
    first = false;
    if (fields.size() < 2) {
      throw std::invalid_argument("line " + std::to_string(line_number) +
                                  ": need at least one covariate and a label");
    }
    DataPoint point;
    point.y = fields.back();
    fields.pop_back();
    point.x = std::move(fields);
    if (normalize_rows) {
      const double n = norm2(point.x);
      if (n > 1.0) {
        for (double& v : point.x) v /= n;
      }
    }
    records.push_back(std::move(point));
  }
  return Dataset(std::move(records));
}

double logreg_objective(std::span<const double> p, const Dataset& data, double lambda) {
  double loss = 0.0;
  for (const DataPoint& r : data.records()) {
    loss += softplus_neg(r.y * dot(p, r.x));
  }
  return loss / data.size() + 0.5 * lambda * dot(p, p);
}

std::vector<double> logreg_gradient(std::span<const double> p, const Dataset& data,
                                    double lambda) {
  std::vector<double> grad(p.size(), 0.0);
  for (const DataPoint& r : data.records()) {
    const double weight = -r.y * logistic(-r.y * dot(p, r.x));
    for (std::size_t j = 0; j < grad.size(); ++j) grad[j] += weight * r.x[j];
  }
  for (std::size_t j = 0; j < grad.size(); ++j) {
    grad[j] = grad[j] / data.size() + lambda * p[j];
  }
  return grad;
}

std::vector<double> train_logreg(const Dataset& train, const ErmConfig& cfg) {
  if (!(cfg.lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
  if (!(cfg.tolerance > 0.0)) throw std::invalid_argument("tolerance must be positive");

  // Smoothness constant of the objective: the logistic loss has curvature at
  // most 1/4 and covariates live in the unit ball.
  const double lipschitz = 0.25 + cfg.lambda;
  const double safe_step = 1.0 / lipschitz;

  std::vector<double> p(train.dim(), 0.0);
  double objective = logreg_objective(p, train, cfg.lambda);
  for (int iter = 0; iter < cfg.max_iterations; ++iter) {
    const std::vector<double> grad = logreg_gradient(p, train, cfg.lambda);
    const double grad_norm = norm2(grad);
    if (grad_norm <= cfg.tolerance) return p;

    // Backtracking Armijo search, floored at the 1/L step that smoothness
    // guarantees to descend. Near the optimum the per-step decrease drops
    // below the objective's floating-point resolution, so the floor step is
    // taken without an objective comparison.
    double step = 1.0;
    const double slope = grad_norm * grad_norm;
    std::vector<double> candidate(p.size());
    while (true) {
      for (std::size_t j = 0; j < p.size(); ++j) candidate[j] = p[j] - step * grad[j];
      if (step <= safe_step) {
        objective = logreg_objective(candidate, train, cfg.lambda);
        break;
      }
      const double candidate_objective = logreg_objective(candidate, train, cfg.lambda);
      if (candidate_objective <= objective - 1e-4 * step * slope) {
        objective = candidate_objective;
        break;
      }
      step *= 0.5;
    }
    p.swap(candidate);
  }
  throw std::runtime_error("logistic regression did not converge within the iteration cap");
}

std::vector<double> erm_perturbation_vector(int dim, int n_train, double lambda,
                                            double eps1, NoiseSource& noise) {
  if (dim < 1 || n_train < 1) throw std::invalid_argument("dimension and size must be positive");
  if (!(lambda > 0.0) || !(eps1 > 0.0)) {
    throw std::invalid_argument("lambda and eps1 must be positive");
  }
  const double scale = 2.0 / (n_train * lambda * eps1);
  const double radius = noise.gamma(dim, scale);

  std::vector<double> q(dim, 0.0);
  for (double& v : q) v = noise.normal();
  const double n = norm2(q);
  if (n > 0.0) {
    for (double& v : q) v *= radius / n;
  } else {
    q.assign(dim, 0.0);
    q[0] = radius;  // degenerate direction draw; keep the norm
  }
  return q;
}

std::vector<double> erm_output_perturb(const Dataset& train, double eps1,
                                       const ErmConfig& cfg, NoiseSource& noise) {
  std::vector<double> p = train_logreg(train, cfg);
  const std::vector<double> q =
      erm_perturbation_vector(train.dim(), train.size(), cfg.lambda, eps1, noise);
  for (std::size_t j = 0; j < p.size(); ++j) p[j] += q[j];
  return p;
}

double error_score(std::span<const double> p, const Dataset& test) {
  if (test.size() == 0) throw std::invalid_argument("test set must not be empty");
  double total = 0.0;
  for (const DataPoint& r : test.records()) {
    // h_p(x) = 2 * logistic(p.x) - 1 = tanh(p.x / 2)
    total += std::fabs(std::tanh(0.5 * dot(p, r.x)) - r.y);
  }
  return total / test.size();
}

double release_test_sensitivity(int n_train, int n_test, double lambda) {
  if (n_train < 1 || n_test < 1) throw std::invalid_argument("need non-empty train and test sets");
  if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
  return std::max(2.0 / n_test, 2.0 * std::expm1(2.0 / (n_train * lambda)));
}

OdpGuarantee logreg_test_odp(double eps1, double eps2, int n_train, int n_test,
                             double lambda) {
  if (!(eps1 > 0.0) || !(eps2 > 0.0)) throw std::invalid_argument("budgets must be positive");
  const double a = release_test_sensitivity(n_train, n_test, lambda);
  const double value_eps = std::max(eps1, (2.0 / n_test) / a * eps2);
  const double bot_eps = std::min(value_eps, eps2);
  return OdpGuarantee({{kValueCell, value_eps}, {kBotCell, bot_eps}}, 0.0);
}

TestedOutput logreg_with_test(const Dataset& train, const Dataset& test,
                              double eps1, double eps2, const ErmConfig& cfg,
                              double threshold, NoiseSource& noise) {
  std::vector<double> model = erm_output_perturb(train, eps1, cfg, noise);
  const double a = release_test_sensitivity(train.size(), test.size(), cfg.lambda);
  const double r = noise.laplace(a / eps2);
  OdpGuarantee guarantee =
      logreg_test_odp(eps1, eps2, train.size(), test.size(), cfg.lambda);
  if (error_score(model, test) + r <= threshold) {
    return TestedOutput{std::move(model), kValueCell, std::move(guarantee)};
  }
  return TestedOutput{std::nullopt, kBotCell, std::move(guarantee)};
}

double noise_percentile(int n, double eps2, double lambda, double train_frac,
                        double pct, bool absolute) {
  if (n < 2) throw std::invalid_argument("need at least two records to split");
  if (!(train_frac > 0.0 && train_frac < 1.0)) {
    throw std::invalid_argument("train fraction must lie in (0, 1)");
  }
  if (!(pct > 0.5 && pct < 1.0)) {
    throw std::invalid_argument("percentile must lie in (0.5, 1)");
  }
  const int n_train = static_cast<int>(std::llround(train_frac * n));
  const int n_test = n - n_train;
  if (n_train < 1 || n_test < 1) throw std::invalid_argument("degenerate train/test split");
  const double scale = release_test_sensitivity(n_train, n_test, lambda) / eps2;
  if (absolute) return scale * std::log(1.0 / (1.0 - pct));
  return laplace_quantile(scale, pct);
}

}  // namespace odp
