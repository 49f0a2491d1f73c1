// Copyright 2026 The tvelim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tvelim/graph.hpp"
#include "tvelim/semiring.hpp"
#include "tvelim/tensor.hpp"

namespace tvelim {

class ThreadPool;

/// Parsed plated einsum, e.g. "xy,iyz->xz" with plates "i".
struct EinsumSpec {
  std::vector<std::string> inputs;
  std::string output;
  std::set<char> plates;

  bool is_plate(char c) const { return plates.count(c) > 0; }
  /// "xy,iyz->xz"; plates are not part of the string.
  std::string to_string() const;
  std::string plates_string() const;

  friend bool operator==(const EinsumSpec&, const EinsumSpec&) = default;
};

/// Row-major array whose axes follow an operand's symbol order.
struct DenseArray {
  std::vector<std::size_t> shape;
  std::vector<double> values;
};

/// Throws SyntaxError, DuplicateSymbolInOperand, OutputSymbolNotInInputs or
/// PlateInOutput.
EinsumSpec parse_einsum(std::string_view spec, std::string_view plates);

/// Graph without tables. P(f) is the operand's plate symbols. A variable's
/// plate set is the intersection of P(f) over the operands containing it;
/// output variables are plate-free. Factors are named "f000", "f001", ...
PlatedFactorGraph infer_plate_sets(const EinsumSpec& spec, std::span<const std::vector<std::size_t>> shapes);

/// infer_plate_sets plus tables built from the operands.
PlatedFactorGraph einsum_graph(const EinsumSpec& spec, std::span<const DenseArray> operands);

/// Result over the output variables (canonical dim order). Operands are in
/// the semiring's carrier space.
NamedTensor plated_einsum(const EinsumSpec& spec, std::span<const DenseArray> operands, const Semiring& s,
                          const ThreadPool* pool = nullptr);

/// Values of an einsum result laid out in output symbol order.
DenseArray to_output_order(const EinsumSpec& spec, const NamedTensor& result);

}  // namespace tvelim
