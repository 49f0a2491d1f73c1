// Copyright 2026 The tvelim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "tvelim/graph.hpp"
#include "tvelim/query.hpp"
#include "tvelim/semiring.hpp"

namespace tvelim::oracle {

// Reference answers by exhaustive enumeration of the fully unrolled graph.
// Nothing here eliminates variables, so these cannot share a bug with the
// engine. Works on intractable graphs too.

inline constexpr std::uint64_t kMaxStates = 10'000'000;

/// One replica of a plated variable.
struct GroundVariable {
  std::string variable;
  std::size_t slice = 0;  // row-major index over the variable's plates
  std::size_t domain = 1;
};

/// Carrier value of every joint assignment. Assignments are ordered
/// row-major over `variables` (variables by name, replicas row-major), the
/// first ground variable most significant.
struct JointTable {
  std::vector<GroundVariable> variables;
  std::vector<double> values;

  std::uint64_t index_of(const Assignment& a) const;
};

/// Number of joint assignments of the unrolled graph.
std::uint64_t state_count(const PlatedFactorGraph& g);

double brute_plated_sum_product(const PlatedFactorGraph& g, const Semiring& s,
                                std::uint64_t max_states = kMaxStates);

/// Sum-product leaving plate-free `keep` variables as dims of the result.
NamedTensor brute_contract(const PlatedFactorGraph& g, const Semiring& s, const std::set<std::string>& keep,
                           std::uint64_t max_states = kMaxStates);

/// Normalized marginals; requires division.
MarginalSet brute_marginals(const PlatedFactorGraph& g, const Semiring& s, std::uint64_t max_states = kMaxStates);

/// Maximizer over all assignments in a max semiring; ties go to the lowest
/// flat assignment index.
Assignment brute_map(const PlatedFactorGraph& g, const Semiring& s = Semiring::max_product(),
                     std::uint64_t max_states = kMaxStates);

JointTable brute_joint(const PlatedFactorGraph& g, const Semiring& s, std::uint64_t max_states = kMaxStates);

}  // namespace tvelim::oracle
