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
#include "odp/guarantee.h"

#include <algorithm>
#include <set>

namespace odp {
namespace {

void check_epsilon(double epsilon) {
  if (!(epsilon >= 0.0)) throw std::invalid_argument("epsilon must be non-negative");
}

void check_delta(double delta) {
  if (!(delta >= 0.0 && delta <= 1.0)) throw std::invalid_argument("delta must lie in [0, 1]");
}

void check_distinct(const std::vector<CellId>& ids) {
  std::set<std::string> seen;
  for (const CellId& id : ids) {
    if (!seen.insert(id.value).second) {
      throw std::invalid_argument("duplicate cell id: " + id.value);
    }
  }
}

}  // namespace

DpGuarantee::DpGuarantee(double epsilon, double delta) : epsilon(epsilon), delta(delta) {
  check_epsilon(epsilon);
  check_delta(delta);
}

SubsetDpGuarantee::SubsetDpGuarantee(CellId cell, double epsilon, double delta)
    : cell(std::move(cell)), epsilon(epsilon), delta(delta) {
  check_epsilon(epsilon);
  check_delta(delta);
}

OdpGuarantee::OdpGuarantee(std::vector<Cell> cells, double delta)
    : cells_(std::move(cells)), delta_(delta) {
  if (cells_.empty()) throw std::invalid_argument("guarantee needs at least one cell");
  std::vector<CellId> ids;
  ids.reserve(cells_.size());
  for (const Cell& cell : cells_) {
    check_epsilon(cell.second);
    ids.push_back(cell.first);
  }
  check_distinct(ids);
  check_delta(delta_);
}

double OdpGuarantee::sup_epsilon() const {
  double sup = 0.0;
  for (const Cell& cell : cells_) sup = std::max(sup, cell.second);
  return sup;
}

bool OdpGuarantee::has_cell(const CellId& id) const {
  return std::any_of(cells_.begin(), cells_.end(),
                     [&](const Cell& c) { return c.first == id; });
}

double OdpGuarantee::epsilon_of(const CellId& id) const {
  for (const Cell& cell : cells_) {
    if (cell.first == id) return cell.second;
  }
  throw UnknownCell("cell not part of the guarantee: " + id.value);
}

OdpGuarantee dp_to_odp(const DpGuarantee& g, const std::vector<CellId>& cells) {
  if (cells.empty()) throw std::invalid_argument("cell list must be non-empty");
  check_distinct(cells);
  std::vector<OdpGuarantee::Cell> out;
  out.reserve(cells.size());
  for (const CellId& id : cells) out.emplace_back(id, g.epsilon);
  return OdpGuarantee(std::move(out), g.delta);
}

DpGuarantee odp_to_dp(const OdpGuarantee& g) {
  return DpGuarantee(g.sup_epsilon(), g.delta());
}

OdpGuarantee combine_subset_dp(const std::vector<SubsetDpGuarantee>& parts) {
  if (parts.empty()) throw std::invalid_argument("need at least one subset guarantee");
  std::vector<OdpGuarantee::Cell> cells;
  cells.reserve(parts.size());
  double delta = 0.0;
  for (const SubsetDpGuarantee& part : parts) {
    cells.emplace_back(part.cell, part.epsilon);
    delta += part.delta;
  }
  return OdpGuarantee(std::move(cells), std::min(delta, 1.0));
}

void to_json(nlohmann::json& j, const OdpGuarantee& g) {
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& [id, eps] : g.cells()) {
    cells.push_back({{"id", id.value}, {"eps", eps}});
  }
  j = nlohmann::json{{"cells", std::move(cells)}, {"delta", g.delta()}};
}

OdpGuarantee odp_guarantee_from_json(const nlohmann::json& j) {
  std::vector<OdpGuarantee::Cell> cells;
  for (const auto& cell : j.at("cells")) {
    std::string id;
    const auto& raw = cell.at("id");
    if (raw.is_string()) {
      id = raw.get<std::string>();
    } else {
      id = std::to_string(raw.get<std::int64_t>());
    }
    cells.emplace_back(CellId(std::move(id)), cell.at("eps").get<double>());
  }
  return OdpGuarantee(std::move(cells), j.at("delta").get<double>());
}

}  // namespace odp
