// Copyright 2026 The tvelim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "tvelim/error.hpp"
#include "tvelim/graph.hpp"
#include "tvelim/semiring.hpp"
#include "tvelim/tensor.hpp"

namespace tvelim {

class ThreadPool;

/// One connected component processed at one leaf plate set.
struct ScheduleStep {
  PlateSet leaf;
  std::vector<std::string> factors;
  std::vector<std::string> eliminated;
  std::vector<std::string> produce_vars;
  PlateSet product_reduced;

  /// `L={a,b} eliminate={v} produce_vars={w} product_reduce={b}`
  std::string to_string() const;
};

struct Schedule {
  std::vector<ScheduleStep> steps;
  /// Scalar terms touched: each fused contraction costs the number of
  /// entries of the union of its inputs' dims; each plate product costs the
  /// number of entries of its input.
  std::uint64_t op_count = 0;

  std::string trace() const;
};

/// Where elimination got stuck: the component at `leaf` whose remaining
/// variables' plate sets cover all of `leaf`.
struct Intractability {
  PlateSet leaf;
  std::vector<std::string> factors;
  std::vector<std::string> remaining_vars;

  std::string to_string() const;
};

class IntractableError : public Error {
 public:
  explicit IntractableError(Intractability info)
      : Error(ErrorCode::Intractable, info.to_string()), info_(std::move(info)) {}
  const Intractability& info() const { return info_; }

 private:
  Intractability info_;
};

enum class NodeKind { Input, Constant, Contract, PlateProduct };

/// Node of the recorded computation. Contract nodes times their inputs and
/// plus-reduce `reduced` (variable dims); PlateProduct nodes times-reduce
/// `reduced` (plate dims) of their single input.
struct TapeNode {
  NodeKind kind = NodeKind::Constant;
  std::vector<std::size_t> inputs;
  std::set<std::string> reduced;
  NamedTensor value;
  /// Winning index per output entry for Contract nodes in argmax semirings.
  std::optional<NamedTensor> argmax;
  /// Source factor for Input nodes.
  std::string label;
};

/// Everything the forward pass computed, in execution order: every node's
/// inputs precede it and `root` holds the final result.
struct Tape {
  Semiring semiring = Semiring::real();
  std::vector<TapeNode> nodes;
  std::size_t root = 0;

  /// Recomputes every derived node from the Input and Constant leaves and
  /// returns the root value.
  NamedTensor replay(const ThreadPool* pool = nullptr) const;
};

struct EngineOptions {
  /// Worker count for plate-parallel kernels; ignored when `pool` is set.
  std::size_t threads = 1;
  const ThreadPool* pool = nullptr;
  /// Plate-free variables withheld from elimination; they remain as dims
  /// of the result.
  std::set<std::string> keep;
  /// When set, on_iteration runs after every pass of the leaf loop with the
  /// remaining graph and the scalars produced so far.
  bool debug_invariant = false;
  std::function<void(const PlatedFactorGraph& remaining, std::span<const NamedTensor> scalars)> on_iteration;
};

struct EliminationResult {
  NamedTensor value;
  Tape tape;
  Schedule schedule;
};

/// Sum-product over a plated factor graph by eliminating variables within
/// each leaf plate set and product-reducing plates along the way. Throws
/// IntractableError when a component's remaining variables span its whole
/// leaf plate set.
EliminationResult tensor_variable_elimination(const PlatedFactorGraph& g, const Semiring& s,
                                              const EngineOptions& options = {});

struct DryRun {
  Schedule schedule;
  std::optional<Intractability> intractable;

  bool tractable() const { return !intractable.has_value(); }
};

/// The control flow of tensor_variable_elimination on shapes alone.
DryRun dry_run(const PlatedFactorGraph& g, const std::set<std::string>& keep = {});

/// Times all factors and plus-reduce `vars`, by sequential variable
/// elimination. Variables absent from every factor contribute
/// sum_of_ones(size).
NamedTensor sum_product(std::span<const NamedTensor> factors, std::span<const Dim> vars, const Semiring& s,
                        const ThreadPool* pool = nullptr);

struct EliminationPlan {
  std::vector<std::string> order;
  std::uint64_t cost = 0;
};

/// Elimination order for `vars` over factors with the given dims: the
/// cheapest permutation when there are at most four variables, otherwise
/// greedy min-fill (ties: min degree, then name).
EliminationPlan plan_elimination(const std::vector<std::vector<Dim>>& factor_dims,
                                 const std::vector<std::string>& vars);

/// Cost of eliminating `order` in sequence under the Schedule cost model,
/// including the final product of the leftover factors.
std::uint64_t elimination_cost(const std::vector<std::vector<Dim>>& factor_dims,
                               const std::vector<std::string>& order);

}  // namespace tvelim
