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
#include "odp/ledger.h"

#include <istream>
#include <sstream>

namespace odp {

Budget::Budget(double eps_total, double delta_total)
    : eps_total(eps_total), delta_total(delta_total) {
  if (!(eps_total >= 0.0)) throw std::invalid_argument("budget epsilon must be non-negative");
  if (!(delta_total >= 0.0 && delta_total <= 1.0)) {
    throw std::invalid_argument("budget delta must lie in [0, 1]");
  }
}

LedgerState::LedgerState(const Budget& budget)
    : budget_(budget),
      eps_remaining_(budget.eps_total),
      delta_remaining_(budget.delta_total) {}

Decision LedgerState::admit(const OdpGuarantee& g) const {
  if (g.sup_epsilon() <= eps_remaining_ && g.delta() <= delta_remaining_) {
    return Decision::kContinue;
  }
  return Decision::kHalt;
}

LedgerState LedgerState::charge(const OdpGuarantee& g, const CellId& realized,
                                std::string label) const {
  if (admit(g) == Decision::kHalt) {
    throw ChargeRejected("guarantee does not fit the remaining budget");
  }
  const double eps = g.epsilon_of(realized);  // throws UnknownCell
  LedgerState next = *this;
  next.eps_remaining_ -= eps;
  next.delta_remaining_ -= g.delta();
  next.history_.push_back(
      ChargeRecord{std::move(label), g, realized, eps, g.delta()});
  return next;
}

std::string LedgerState::history_json_lines() const {
  std::ostringstream out;
  for (const ChargeRecord& record : history_) {
    nlohmann::json j;
    to_json(j, record);
    out << j.dump() << '\n';
  }
  return out.str();
}

LedgerState LedgerState::replay(const Budget& budget, std::istream& json_lines) {
  LedgerState state(budget);
  std::string line;
  int line_number = 0;
  while (std::getline(json_lines, line)) {
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    ChargeRecord record = charge_record_from_json(nlohmann::json::parse(line));
    LedgerState next =
        state.charge(record.declared, record.realized_cell, record.mechanism_label);
    const ChargeRecord& applied = next.history_.back();
    if (applied.eps_charged != record.eps_charged ||
        applied.delta_charged != record.delta_charged) {
      throw ChargeRejected("line " + std::to_string(line_number) +
                           ": recorded charge disagrees with declared guarantee");
    }
    state = std::move(next);
  }
  return state;
}

void to_json(nlohmann::json& j, const ChargeRecord& r) {
  j = nlohmann::json{{"mechanism_label", r.mechanism_label},
                     {"declared", r.declared},
                     {"realized_cell", r.realized_cell.value},
                     {"eps_charged", r.eps_charged},
                     {"delta_charged", r.delta_charged}};
}

ChargeRecord charge_record_from_json(const nlohmann::json& j) {
  return ChargeRecord{j.at("mechanism_label").get<std::string>(),
                      j.at("declared").get<OdpGuarantee>(),
                      CellId(j.at("realized_cell").get<std::string>()),
                      j.at("eps_charged").get<double>(),
                      j.at("delta_charged").get<double>()};
}

}  // namespace odp
