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

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace odp {

// Thrown when a cell id is looked up in a guarantee that does not contain it.
struct UnknownCell : std::invalid_argument {
  explicit UnknownCell(const std::string& what) : std::invalid_argument(what) {}
};

// Identifier of one cell of an output partition. Mechanisms carry a
// classifier from concrete outputs to CellId; guarantees only store the ids.
struct CellId {
  std::string value;

  explicit CellId(std::string v) : value(std::move(v)) {}
  static CellId from_index(std::int64_t k) { return CellId(std::to_string(k)); }

  friend bool operator==(const CellId&, const CellId&) = default;
  friend auto operator<=>(const CellId&, const CellId&) = default;
};

// Plain (epsilon, delta) differential privacy guarantee.
struct DpGuarantee {
  double epsilon;
  double delta;

  DpGuarantee(double epsilon, double delta);
};

// An (epsilon, delta) bound that holds only for events inside one cell.
struct SubsetDpGuarantee {
  CellId cell;
  double epsilon;
  double delta;

  SubsetDpGuarantee(CellId cell, double epsilon, double delta);
};

// Output differential privacy guarantee: a finite partition of the output
// set, one epsilon per cell, and a single global delta. Immutable.
class OdpGuarantee {
 public:
  using Cell = std::pair<CellId, double>;

  OdpGuarantee(std::vector<Cell> cells, double delta);

  const std::vector<Cell>& cells() const { return cells_; }
  double delta() const { return delta_; }

  // Largest per-cell epsilon; the DP epsilon of the guarantee.
  double sup_epsilon() const;

  bool has_cell(const CellId& id) const;

  // Epsilon of the given cell; throws UnknownCell if absent.
  double epsilon_of(const CellId& id) const;

 private:
  std::vector<Cell> cells_;
  double delta_;
};

// A DP guarantee is an ODP guarantee with the constant epsilon on any
// partition. `cells` must be non-empty and free of duplicates.
OdpGuarantee dp_to_odp(const DpGuarantee& g, const std::vector<CellId>& cells);

// Collapses an ODP guarantee to (sup-cell epsilon, delta).
DpGuarantee odp_to_dp(const OdpGuarantee& g);

// Combines per-cell subset guarantees into one ODP guarantee. Epsilons are
// kept per cell; deltas add up (capped at 1).
OdpGuarantee combine_subset_dp(const std::vector<SubsetDpGuarantee>& parts);

// JSON form: {"cells":[{"id":...,"eps":...},...],"delta":...}
void to_json(nlohmann::json& j, const OdpGuarantee& g);
OdpGuarantee odp_guarantee_from_json(const nlohmann::json& j);

}  // namespace odp

// OdpGuarantee has no default constructor, so json::get<OdpGuarantee>() goes
// through an explicit serializer.
template <>
struct nlohmann::adl_serializer<odp::OdpGuarantee> {
  static odp::OdpGuarantee from_json(const json& j) {
    return odp::odp_guarantee_from_json(j);
  }
  static void to_json(json& j, const odp::OdpGuarantee& g) { odp::to_json(j, g); }
};
