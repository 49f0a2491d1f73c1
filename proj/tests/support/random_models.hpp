// Copyright 2026 The tvelim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "tvelim/einsum.hpp"
#include "tvelim/graph.hpp"

namespace tvelim::testing {

struct GraphShape {
  std::size_t max_vars = 5;
  std::size_t max_domain = 3;
  std::size_t max_plates = 4;
  std::size_t max_plate_size = 3;
  std::size_t max_factors = 6;
  std::size_t max_factor_vars = 3;
  /// Bound on joint states times ground factors, keeping the oracle fast.
  std::uint64_t max_oracle_work = 1'000'000;
  /// Probability that a table entry is exactly zero.
  double zero_prob = 0.05;
};

/// Random valid plated factor graph with real-space tables in [0, 1).
PlatedFactorGraph random_graph(std::mt19937_64& rng, const GraphShape& shape = {});

/// Same, but structure only (no tables).
PlatedFactorGraph random_structure(std::mt19937_64& rng, const GraphShape& shape = {});

/// Draws random graphs until one is tractable and within the oracle budget.
PlatedFactorGraph random_tractable_graph(std::mt19937_64& rng, const GraphShape& shape = {});

/// Joint states times ground factor count.
std::uint64_t oracle_work(const PlatedFactorGraph& g);

struct RandomEinsum {
  EinsumSpec spec;
  std::vector<DenseArray> operands;
};

/// Tractable plated einsum with at most `max_symbols` distinct symbols,
/// `max_operands` operands and plate sizes at most 3.
RandomEinsum random_einsum(std::mt19937_64& rng, std::size_t max_symbols = 4, std::size_t max_operands = 3);

/// Operands as one random-valued array per shape.
std::vector<DenseArray> random_operands(std::mt19937_64& rng, const std::vector<std::vector<std::size_t>>& shapes);

/// Relative difference |a - b| / max(|a|, |b|), zero when both are zero.
double rel_diff(double a, double b);

}  // namespace tvelim::testing
