// Copyright 2026 The tvelim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "tvelim/engine.hpp"
#include "tvelim/query.hpp"

namespace tvelim {

struct MarginalResult {
  MarginalSet marginals;
  /// Root of the same forward tape, bit-identical to tensor_variable_elimination.
  double partition = 0.0;
};

/// Marginals of every variable by a backward pass over the forward tape.
/// Requires a semiring with division (real or log).
MarginalResult marginals(const PlatedFactorGraph& g, const Semiring& s, bool normalize = true,
                         const EngineOptions& options = {});

/// Backward pass over an existing tape recorded for g.
MarginalResult marginals_from_tape(const PlatedFactorGraph& g, const Tape& tape, bool normalize = true,
                                   const ThreadPool* pool = nullptr);

/// Most probable assignment: forward pass in a max semiring recording
/// argmax backpointers, then backtracking in reverse elimination order.
/// Ties resolve to the lowest index at each backpointer.
Assignment map_assignment(const PlatedFactorGraph& g, const Semiring& s = Semiring::max_product(),
                          const EngineOptions& options = {});

struct SampleOptions {
  /// Compute each sample's joint score (evaluate_assignment).
  bool with_scores = true;
};

/// n i.i.d. joint samples by forward filtering and backward sampling.
/// Sample i draws from CounterRng(seed).split(i), so results are fixed by
/// (seed, i) irrespective of how samples are scheduled.
std::vector<Assignment> sample(const PlatedFactorGraph& g, const Semiring& s, std::uint64_t seed, std::size_t n,
                               const EngineOptions& options = {}, const SampleOptions& sample_options = {});

}  // namespace tvelim
