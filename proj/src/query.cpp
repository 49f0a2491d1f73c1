// Copyright 2026 The tvelim Authors
// SPDX-License-Identifier: Apache-2.0

#include "tvelim/query.hpp"

#include "tvelim/error.hpp"

namespace tvelim {

std::size_t IndexTable::at(const std::map<std::string, std::size_t>& plate_index) const {
  std::size_t flat = 0;
  for (const auto& p : plates) flat = flat * p.size + plate_index.at(p.name);
  return values.at(flat);
}

Assignment empty_assignment(const PlatedFactorGraph& g) {
  Assignment a;
  for (const auto& [name, v] : g.variables()) {
    IndexTable t;
    for (const auto& p : v.plates) t.plates.push_back(plate_dim(p, g.plate_size(p)));
    t.values.assign(numel(t.plates), 0);
    a.values.emplace(name, std::move(t));
  }
  return a;
}

double evaluate_assignment(const PlatedFactorGraph& g, const Assignment& a, const Semiring& s) {
  double acc = s.one();
  for (const auto& [name, f] : g.factors()) {
    if (!f.table) throw Error(ErrorCode::Validation, "factor '" + name + "' has no table");
    const auto& table = *f.table;
    std::vector<Dim> plates;
    for (const auto& p : f.plates) plates.push_back(plate_dim(p, g.plate_size(p)));
    const auto slices = numel(plates);
    std::map<std::string, std::size_t> plate_index;
    std::vector<std::size_t> index(table.rank());
    for (std::uint64_t flat = 0; flat < slices; ++flat) {
      std::uint64_t rem = flat;
      for (std::size_t i = plates.size(); i-- > 0;) {
        plate_index[plates[i].name] = rem % plates[i].size;
        rem /= plates[i].size;
      }
      for (std::size_t d = 0; d < table.rank(); ++d) {
        const auto& dim = table.dims()[d];
        index[d] = dim.kind == DimKind::Plate ? plate_index.at(dim.name) : a.values.at(dim.name).at(plate_index);
      }
      acc = s.times(acc, table.at(index));
    }
  }
  return acc;
}

}  // namespace tvelim
