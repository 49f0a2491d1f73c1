// Copyright 2026 The tvelim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "tvelim/graph.hpp"
#include "tvelim/tensor.hpp"

namespace tvelim {

/// Per-variable marginals, each over (P(v) plates, v) in canonical order.
struct MarginalSet {
  std::map<std::string, NamedTensor> marginals;
  bool normalized = true;
};

/// Value indices of one variable, row-major over its plates (sorted by name).
struct IndexTable {
  std::vector<Dim> plates;
  std::vector<std::size_t> values;

  std::size_t at(const std::map<std::string, std::size_t>& plate_index) const;
};

struct Assignment {
  std::map<std::string, IndexTable> values;
  /// Semiring carrier value of the joint at this assignment.
  double score = 0.0;
};

/// Empty (all zero) IndexTable for every variable of g.
Assignment empty_assignment(const PlatedFactorGraph& g);

/// Times-fold of every grounded factor at the assignment: factors in name
/// order, each factor's plate slices in row-major order, starting from one().
double evaluate_assignment(const PlatedFactorGraph& g, const Assignment& a, const Semiring& s);

}  // namespace tvelim
