// Copyright 2026 The tvelim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tvelim/tensor.hpp"

namespace tvelim {

using PlateSet = std::set<std::string>;

struct Variable {
  std::string name;
  std::size_t domain = 1;
  PlateSet plates;
};

/// A factor's edges are its `variables`. The table, when present, has one
/// plate dim per entry of `plates` and one variable dim per neighbour.
struct Factor {
  std::string name;
  std::set<std::string> variables;
  PlateSet plates;
  std::optional<NamedTensor> table;
};

struct Violation {
  std::string rule;
  std::vector<std::string> names;
  std::string message;
};

/// Plated factor graph (V, F, E, P) with plate sizes M. Vertices and plates
/// are identified by name; containers iterate in name order.
class PlatedFactorGraph {
 public:
  void add_plate(const std::string& name, std::size_t size);
  void add_variable(const std::string& name, std::size_t domain, PlateSet plates = {});
  void add_factor(const std::string& name, std::set<std::string> variables, PlateSet plates,
                  std::optional<NamedTensor> table = std::nullopt);
  void set_table(const std::string& factor, NamedTensor table);
  void remove_factor(const std::string& name);
  void remove_variable(const std::string& name);

  const std::map<std::string, std::size_t>& plates() const { return plates_; }
  const std::map<std::string, Variable>& variables() const { return variables_; }
  const std::map<std::string, Factor>& factors() const { return factors_; }

  const Variable& variable(const std::string& name) const;
  const Factor& factor(const std::string& name) const;
  std::size_t plate_size(const std::string& name) const;
  bool has_plate(const std::string& name) const { return plates_.count(name) > 0; }

  /// Canonical dims a factor's table must have.
  std::vector<Dim> factor_dims(const Factor& f) const;
  std::size_t edge_count() const;
  bool empty() const { return variables_.empty() && factors_.empty(); }

  /// Every violated structural invariant; empty means valid.
  std::vector<Violation> validate() const;
  /// Throws Error(Validation) listing all violations.
  void require_valid() const;
  /// Throws unless every factor carries a table.
  void require_tables() const;

 private:
  std::map<std::string, std::size_t> plates_;
  std::map<std::string, Variable> variables_;
  std::map<std::string, Factor> factors_;
};

/// Name of instance `index` of `name` along `plate`. Indices are kept in a
/// sorted bracket suffix, e.g. "H[I=0,J=2]", so unrolling order never
/// changes names.
std::string instance_name(const std::string& name, const std::string& plate, std::size_t index);

/// Replaces plate b by M(b) explicit copies of every vertex in b. Edges join
/// copies with equal index, or any copy when b is not shared by both ends.
/// Tables are sliced along b.
PlatedFactorGraph unroll(const PlatedFactorGraph& g, const std::string& plate);
PlatedFactorGraph unroll_all(const PlatedFactorGraph& g);

struct Component {
  std::vector<std::string> variables;
  std::vector<std::string> factors;
};

/// Connected components of the bipartite graph on `variables` and the keys
/// of `factor_edges` (each mapped to its neighbours; neighbours outside
/// `variables` are ignored). Components are ordered by smallest member name.
std::vector<Component> partition(const std::set<std::string>& variables,
                                 const std::map<std::string, std::set<std::string>>& factor_edges);

/// Path u - x1 - ... - xk - w with a in P(u), b not in P(u), b in P(w),
/// a not in P(w), and {a, b} in P(xi) for every interior vertex. u and w are
/// variables. Its presence rules out polynomial-time elimination.
struct MinorWitness {
  std::string plate_a;
  std::string plate_b;
  std::string u;
  std::vector<std::string> path;
  std::string w;

  std::string to_string() const;
};

/// Breadth-first search for a MinorWitness over ordered plate pairs in name
/// order; returns the first (shortest) path found.
std::optional<MinorWitness> detect_forbidden_minor(const PlatedFactorGraph& g);

}  // namespace tvelim
