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
//
// Command-line front end: reproduces the library's experiment tables as CSV
// or JSON. Every command is deterministic given --seed; files written with
// --out are accompanied by a .manifest.json recording the invocation.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "odp/erm.h"
#include "odp/iterative.h"
#include "odp/ledger.h"
#include "odp/mechanisms.h"
#include "odp/verify.h"

namespace {

constexpr const char* kArtifactVersion = "0.1.0";

std::uint64_t default_seed() {
  if (const char* env = std::getenv("ODP_SEED")) {
    return std::strtoull(env, nullptr, 10);
  }
  return 20260810ULL;
}

// Emits `body` to `out_path` or stdout; a file gets a sibling manifest.
void emit(const std::string& out_path, const std::string& body,
          const std::string& command, const nlohmann::json& parameters,
          std::uint64_t seed) {
  if (out_path.empty()) {
    std::cout << body;
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("cannot open output file: " + out_path);
  out << body;
  out.close();

  const nlohmann::json manifest = {{"command", command},
                                   {"parameters", parameters},
                                   {"seed", seed},
                                   {"artifact_version", kArtifactVersion},
                                   {"output_path", out_path}};
  std::ofstream mf(out_path + ".manifest.json");
  if (!mf) throw std::runtime_error("cannot open manifest file");
  mf << manifest.dump(2) << '\n';
}

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

int run(int argc, char** argv) {
  CLI::App app{"Output-differential-privacy accounting toolkit"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags like --seed may follow the subcommand
  std::uint64_t seed = default_seed();
  app.add_option("--seed", seed, "Root RNG seed (default from ODP_SEED)")
      ->capture_default_str();

  // --- svt-noise -------------------------------------------------------
  auto* svt_cmd = app.add_subcommand(
      "svt-noise", "Per-entry release noise of sparse-vector release, with and "
                   "without budget reallocation");
  int svt_entries = 100;
  int svt_cap = 20;
  double svt_total_eps = 1.0;
  double svt_threshold = 500.0;
  double svt_sensitivity = 1.0;
  double svt_large = 1000.0;
  double svt_small = 0.0;
  int svt_trials = 10000;
  std::string svt_out;
  svt_cmd->add_option("--entries", svt_entries, "Vector length")->capture_default_str();
  svt_cmd->add_option("--cap", svt_cap, "Maximum number of released entries (c)")
      ->capture_default_str();
  svt_cmd->add_option("--eps-total", svt_total_eps,
                      "Total budget; half goes to the threshold queries, half to the release")
      ->capture_default_str();
  svt_cmd->add_option("--threshold", svt_threshold, "Release threshold")->capture_default_str();
  svt_cmd->add_option("--sensitivity", svt_sensitivity, "Query sensitivity")
      ->capture_default_str();
  svt_cmd->add_option("--large-value", svt_large, "Value of large entries")
      ->capture_default_str();
  svt_cmd->add_option("--small-value", svt_small, "Value of small entries")
      ->capture_default_str();
  svt_cmd->add_option("--trials", svt_trials, "Monte-Carlo trials per row")
      ->capture_default_str();
  svt_cmd->add_option("--out", svt_out, "Output CSV path (default stdout)");

  // --- erm-noise -------------------------------------------------------
  auto* erm_cmd = app.add_subcommand(
      "erm-noise", "Percentile of the additive noise in the model release test");
  std::vector<int> erm_n_list = {250, 500, 750, 1000, 1250, 1500, 1750, 2000};
  std::vector<double> erm_eps2_list = {0.05, 0.1, 0.2, 0.5};
  double erm_lambda = 1.0;
  double erm_train_frac = 0.7;
  double erm_pct = 0.95;
  bool erm_absolute = false;
  std::string erm_out;
  erm_cmd->add_option("--n-list", erm_n_list, "Database sizes")->delimiter(',')
      ->capture_default_str();
  erm_cmd->add_option("--eps2-list", erm_eps2_list, "Test budgets")->delimiter(',')
      ->capture_default_str();
  erm_cmd->add_option("--lambda", erm_lambda, "Regularization strength")
      ->capture_default_str();
  erm_cmd->add_option("--train-frac", erm_train_frac, "Training fraction of the split")
      ->capture_default_str();
  erm_cmd->add_option("--pct", erm_pct, "Percentile level")->capture_default_str();
  erm_cmd->add_flag("--abs", erm_absolute,
                    "Percentile of the noise magnitude instead of the signed noise");
  erm_cmd->add_option("--out", erm_out, "Output CSV path (default stdout)");

  // --- comp-cutoff -----------------------------------------------------
  auto* cutoff_cmd = app.add_subcommand(
      "comp-cutoff", "Minimum composition length at which optimal composition "
                     "beats simple composition within a delta bound");
  double cutoff_eps = 0.1;
  std::vector<double> cutoff_deltas = {1e-5, 1e-6, 1e-7, 1e-8,
                                       1e-9, 1e-10, 1e-11, 1e-12};
  std::string cutoff_out;
  cutoff_cmd->add_option("--eps", cutoff_eps, "Per-mechanism epsilon")
      ->capture_default_str();
  cutoff_cmd->add_option("--deltas", cutoff_deltas, "Delta bounds")->delimiter(',')
      ->capture_default_str();
  cutoff_cmd->add_option("--out", cutoff_out, "Output CSV path (default stdout)");

  // --- optdelta --------------------------------------------------------
  auto* optdelta_cmd = app.add_subcommand(
      "optdelta", "Exact and per-level optimal delta for an iterative mechanism "
                  "with stopping rules");
  std::string optdelta_spec_path;
  int optdelta_cap = 10;
  std::string optdelta_out;
  optdelta_cmd->add_option("--spec", optdelta_spec_path, "Spec JSON file")->required();
  optdelta_cmd->add_option("--depth-cap", optdelta_cap, "Maximum final stop")
      ->capture_default_str();
  optdelta_cmd->add_option("--out", optdelta_out, "Output JSON path (default stdout)");

  // --- verify ----------------------------------------------------------
  auto* verify_cmd = app.add_subcommand(
      "verify", "Statistical check of a mechanism's claimed DP guarantee");
  std::string verify_mechanism = "laplace";
  long verify_trials = 100000;
  std::string verify_out;
  verify_cmd
      ->add_option("--mechanism", verify_mechanism,
                   "One of: toy, laplace, svt, rr, broken")
      ->capture_default_str();
  verify_cmd->add_option("--trials", verify_trials, "Trials per input")
      ->capture_default_str();
  verify_cmd->add_option("--out", verify_out, "Output JSON path (default stdout)");

  // --- ledger replay ---------------------------------------------------
  auto* ledger_cmd = app.add_subcommand("ledger", "Budget ledger utilities");
  ledger_cmd->require_subcommand(1);
  auto* replay_cmd =
      ledger_cmd->add_subcommand("replay", "Re-run an exported charge history");
  std::string replay_in;
  double replay_eps = 1.0;
  double replay_delta = 0.0;
  std::string replay_out;
  replay_cmd->add_option("--in", replay_in, "History file, one charge per line")
      ->required();
  replay_cmd->add_option("--eps", replay_eps, "Total epsilon budget")
      ->capture_default_str();
  replay_cmd->add_option("--delta", replay_delta, "Total delta budget")
      ->capture_default_str();
  replay_cmd->add_option("--out", replay_out, "Output JSON path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);  // prints the message or help text
    return code == 0 ? 0 : 2;     // usage errors exit with 2
  }

  if (svt_cmd->parsed()) {
    const auto [eps1, eps2] = odp::split_svt_budget(svt_total_eps / 2.0, svt_cap);
    const double eps3 = svt_total_eps / 2.0;
    const odp::SvtParams params(eps1, eps2, svt_cap, svt_sensitivity);
    odp::SparseStudyConfig config;
    config.n_entries = svt_entries;
    config.large_value = svt_large;
    config.small_value = svt_small;
    config.threshold = svt_threshold;
    config.value_sensitivity = svt_sensitivity;

    std::ostringstream csv;
    csv << "n_large,odp_expected_noise,baseline_noise,trials,seed\n";
    odp::NoiseSource root(seed);
    for (int n_large = 0; n_large <= svt_cap; ++n_large) {
      odp::NoiseSource row_noise = root.fork(static_cast<std::uint64_t>(n_large));
      const odp::SparseNoiseRow row = odp::sparse_release_noise_study(
          config, n_large, params, eps3, svt_trials, row_noise);
      csv << row.n_large << ',' << format_double(row.odp_expected_noise) << ','
          << format_double(row.baseline_noise) << ',' << row.trials << ',' << seed
          << '\n';
    }
    emit(svt_out, csv.str(), "svt-noise",
         {{"entries", svt_entries},
          {"cap", svt_cap},
          {"eps_total", svt_total_eps},
          {"threshold", svt_threshold},
          {"sensitivity", svt_sensitivity},
          {"large_value", svt_large},
          {"small_value", svt_small},
          {"trials", svt_trials}},
         seed);
    return 0;
  }

  if (erm_cmd->parsed()) {
    std::ostringstream csv;
    csv << "n,eps2,percentile\n";
    for (double eps2 : erm_eps2_list) {
      for (int n : erm_n_list) {
        csv << n << ',' << format_double(eps2) << ','
            << format_double(odp::noise_percentile(n, eps2, erm_lambda,
                                                   erm_train_frac, erm_pct,
                                                   erm_absolute))
            << '\n';
      }
    }
    emit(erm_out, csv.str(), "erm-noise",
         {{"n_list", erm_n_list},
          {"eps2_list", erm_eps2_list},
          {"lambda", erm_lambda},
          {"train_frac", erm_train_frac},
          {"pct", erm_pct},
          {"abs", erm_absolute}},
         seed);
    return 0;
  }

  if (cutoff_cmd->parsed()) {
    std::ostringstream csv;
    csv << "delta,min_mechanisms\n";
    for (double delta : cutoff_deltas) {
      csv << format_double(delta) << ','
          << odp::min_iterations_for_advantage(cutoff_eps, delta) << '\n';
    }
    emit(cutoff_out, csv.str(), "comp-cutoff",
         {{"eps", cutoff_eps}, {"deltas", cutoff_deltas}}, seed);
    return 0;
  }

  if (optdelta_cmd->parsed()) {
    std::ifstream in(optdelta_spec_path);
    if (!in) throw std::runtime_error("cannot open spec file: " + optdelta_spec_path);
    const odp::OptDeltaSpec spec = odp::OptDeltaSpec::from_json(
        nlohmann::json::parse(in));  // parse errors carry byte offsets
    const nlohmann::json result = {
        {"opt_delta", odp::opt_delta(spec, optdelta_cap)},
        {"nonopt_delta", odp::nonopt_delta(spec, optdelta_cap)},
        {"spec", spec.to_json()}};
    emit(optdelta_out, result.dump(2) + "\n", "optdelta",
         {{"spec", optdelta_spec_path}, {"depth_cap", optdelta_cap}}, seed);
    return 0;
  }

  if (verify_cmd->parsed()) {
    const odp::DistinguishResult result =
        odp::run_builtin_verification(verify_mechanism, verify_trials, seed);
    nlohmann::json j = odp::distinguish_result_to_json(result);
    j["mechanism"] = verify_mechanism;
    j["seed"] = seed;
    emit(verify_out, j.dump(2) + "\n", "verify",
         {{"mechanism", verify_mechanism}, {"trials", verify_trials}}, seed);
    return 0;
  }

  if (replay_cmd->parsed()) {
    std::ifstream in(replay_in);
    if (!in) throw std::runtime_error("cannot open history file: " + replay_in);
    const odp::LedgerState state =
        odp::LedgerState::replay(odp::Budget(replay_eps, replay_delta), in);
    const nlohmann::json result = {{"eps_remaining", state.eps_remaining()},
                                   {"delta_remaining", state.delta_remaining()},
                                   {"charges", state.history().size()}};
    emit(replay_out, result.dump(2) + "\n", "ledger replay",
         {{"in", replay_in}, {"eps", replay_eps}, {"delta", replay_delta}}, seed);
    return 0;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const nlohmann::json::parse_error& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
