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
#include <stdexcept>
#include <string>
#include <vector>

#include "odp/guarantee.h"

namespace odp {

// Total privacy budget an analyst may spend across mechanism invocations.
struct Budget {
  double eps_total;
  double delta_total;

  Budget(double eps_total, double delta_total);
};

// One admitted-and-realized mechanism invocation.
struct ChargeRecord {
  std::string mechanism_label;
  OdpGuarantee declared;
  CellId realized_cell;
  double eps_charged;
  double delta_charged;
};

// Filter decision: whether a declared guarantee still fits the budget.
enum class Decision { kContinue, kHalt };

struct ChargeRejected : std::runtime_error {
  explicit ChargeRejected(const std::string& what) : std::runtime_error(what) {}
};

// Privacy-budget accountant. A mechanism is admitted only if its worst-case
// cell epsilon and its delta fit the remaining budget; once its output is
// observed, the realized cell's epsilon and the full declared delta are
// subtracted.
//
// States are immutable; charge() returns the successor state. Budget
// comparisons are exact IEEE comparisons on purpose: a tolerance would
// silently over-spend privacy budget.
class LedgerState {
 public:
  explicit LedgerState(const Budget& budget);

  // kContinue iff sup-cell epsilon <= eps remaining and delta <= delta
  // remaining (both inequalities non-strict). Never throws.
  Decision admit(const OdpGuarantee& g) const;

  // Subtracts the realized cell's epsilon and the declared delta, appends a
  // record. The delta charge is the mechanism's declared delta regardless of
  // which cell was realized; a per-cell delta charge is unsound.
  // Throws ChargeRejected if admit(g) would halt, UnknownCell if `realized`
  // is not a cell of `g`.
  LedgerState charge(const OdpGuarantee& g, const CellId& realized,
                     std::string label) const;

  double eps_remaining() const { return eps_remaining_; }
  double delta_remaining() const { return delta_remaining_; }
  const Budget& budget() const { return budget_; }
  const std::vector<ChargeRecord>& history() const { return history_; }

  // One ChargeRecord per line, as JSON objects.
  std::string history_json_lines() const;

  // Rebuilds the final state from an exported history, re-running admit and
  // charge for every record. Throws if the history does not fit the budget
  // or if recorded charges disagree with the declared guarantees.
  static LedgerState replay(const Budget& budget, std::istream& json_lines);

 private:
  Budget budget_;
  double eps_remaining_;
  double delta_remaining_;
  std::vector<ChargeRecord> history_;
};

void to_json(nlohmann::json& j, const ChargeRecord& r);
ChargeRecord charge_record_from_json(const nlohmann::json& j);

}  // namespace odp
