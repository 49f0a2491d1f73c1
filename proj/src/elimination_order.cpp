// Copyright 2026 The tvelim Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <map>

#include "tvelim/engine.hpp"

namespace tvelim {

namespace {

using DimSet = std::map<std::string, Dim>;

DimSet to_set(const std::vector<Dim>& dims) {
  DimSet s;
  for (const auto& d : dims) s.emplace(d.name, d);
  return s;
}

std::uint64_t size_of(const DimSet& s) {
  std::uint64_t n = 1;
  for (const auto& [_, d] : s) n *= d.size;
  return n;
}

// Eliminates v from the pool in place; returns the cost of the step.
std::uint64_t eliminate_one(std::vector<DimSet>& pool, const std::string& v) {
  DimSet joined;
  std::vector<DimSet> rest;
  bool touched = false;
  for (auto& s : pool) {
    if (s.count(v)) {
      joined.insert(s.begin(), s.end());
      touched = true;
    } else {
      rest.push_back(std::move(s));
    }
  }
  pool = std::move(rest);
  if (!touched) return 0;
  const auto cost = size_of(joined);
  joined.erase(v);
  pool.push_back(std::move(joined));
  return cost;
}

std::uint64_t final_cost(const std::vector<DimSet>& pool) {
  if (pool.size() <= 1) return 0;
  DimSet joined;
  for (const auto& s : pool) joined.insert(s.begin(), s.end());
  return size_of(joined);
}

}  // namespace

std::uint64_t elimination_cost(const std::vector<std::vector<Dim>>& factor_dims,
                               const std::vector<std::string>& order) {
  std::vector<DimSet> pool;
  for (const auto& f : factor_dims) pool.push_back(to_set(f));
  std::uint64_t cost = 0;
  for (const auto& v : order) cost += eliminate_one(pool, v);
  return cost + final_cost(pool);
}

EliminationPlan plan_elimination(const std::vector<std::vector<Dim>>& factor_dims,
                                 const std::vector<std::string>& vars) {
  std::vector<std::string> sorted = vars;
  std::sort(sorted.begin(), sorted.end());
  if (sorted.size() <= 4) {
    EliminationPlan best{sorted, elimination_cost(factor_dims, sorted)};
    auto perm = sorted;
    while (std::next_permutation(perm.begin(), perm.end())) {
      const auto c = elimination_cost(factor_dims, perm);
      if (c < best.cost) best = {perm, c};
    }
    return best;
  }

  std::vector<DimSet> pool;
  for (const auto& f : factor_dims) pool.push_back(to_set(f));
  std::vector<std::string> remaining = sorted;
  EliminationPlan plan;
  while (!remaining.empty()) {
    std::size_t best = 0;
    std::size_t best_fill = SIZE_MAX, best_degree = SIZE_MAX;
    for (std::size_t i = 0; i < remaining.size(); ++i) {
      const auto& v = remaining[i];
      std::set<std::string> neighbours;
      for (const auto& s : pool) {
        if (!s.count(v)) continue;
        for (const auto& [name, d] : s) {
          if (name != v && d.kind == DimKind::Variable) neighbours.insert(name);
        }
      }
      std::size_t fill = 0;
      for (auto a = neighbours.begin(); a != neighbours.end(); ++a) {
        for (auto b = std::next(a); b != neighbours.end(); ++b) {
          const bool linked = std::any_of(pool.begin(), pool.end(),
                                          [&](const DimSet& s) { return s.count(*a) && s.count(*b); });
          if (!linked) ++fill;
        }
      }
      if (fill < best_fill || (fill == best_fill && neighbours.size() < best_degree)) {
        best = i;
        best_fill = fill;
        best_degree = neighbours.size();
      }
    }
    plan.cost += eliminate_one(pool, remaining[best]);
    plan.order.push_back(remaining[best]);
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(best));
  }
  plan.cost += final_cost(pool);
  return plan;
}

}  // namespace tvelim
