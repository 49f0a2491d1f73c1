// Copyright 2026 The tvelim Authors
// SPDX-License-Identifier: Apache-2.0

#include "tvelim/graph.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <sstream>

#include "tvelim/error.hpp"

namespace tvelim {

namespace {

std::string join(const std::vector<std::string>& items, const char* sep = ",") {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += sep;
    out += items[i];
  }
  return out;
}

bool subset(const PlateSet& a, const PlateSet& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

}  // namespace

void PlatedFactorGraph::add_plate(const std::string& name, std::size_t size) {
  if (!plates_.emplace(name, size).second) throw Error(ErrorCode::Validation, "duplicate plate '" + name + "'");
}

void PlatedFactorGraph::add_variable(const std::string& name, std::size_t domain, PlateSet plates) {
  if (!variables_.emplace(name, Variable{name, domain, std::move(plates)}).second) {
    throw Error(ErrorCode::Validation, "duplicate variable '" + name + "'");
  }
}

void PlatedFactorGraph::add_factor(const std::string& name, std::set<std::string> variables, PlateSet plates,
                                   std::optional<NamedTensor> table) {
  if (!factors_.emplace(name, Factor{name, std::move(variables), std::move(plates), std::move(table)}).second) {
    throw Error(ErrorCode::Validation, "duplicate factor '" + name + "'");
  }
}

void PlatedFactorGraph::set_table(const std::string& factor, NamedTensor table) {
  auto it = factors_.find(factor);
  if (it == factors_.end()) throw Error(ErrorCode::Validation, "unknown factor '" + factor + "'");
  it->second.table = std::move(table);
}

void PlatedFactorGraph::remove_factor(const std::string& name) { factors_.erase(name); }
void PlatedFactorGraph::remove_variable(const std::string& name) { variables_.erase(name); }

const Variable& PlatedFactorGraph::variable(const std::string& name) const {
  auto it = variables_.find(name);
  if (it == variables_.end()) throw Error(ErrorCode::Validation, "unknown variable '" + name + "'");
  return it->second;
}

const Factor& PlatedFactorGraph::factor(const std::string& name) const {
  auto it = factors_.find(name);
  if (it == factors_.end()) throw Error(ErrorCode::Validation, "unknown factor '" + name + "'");
  return it->second;
}

std::size_t PlatedFactorGraph::plate_size(const std::string& name) const {
  auto it = plates_.find(name);
  if (it == plates_.end()) throw Error(ErrorCode::UnknownPlate, "unknown plate '" + name + "'");
  return it->second;
}

std::vector<Dim> PlatedFactorGraph::factor_dims(const Factor& f) const {
  std::vector<Dim> dims;
  for (const auto& p : f.plates) dims.push_back(plate_dim(p, plate_size(p)));
  for (const auto& v : f.variables) dims.push_back(var_dim(v, variable(v).domain));
  sort_canonical(dims);
  return dims;
}

std::size_t PlatedFactorGraph::edge_count() const {
  std::size_t n = 0;
  for (const auto& [_, f] : factors_) n += f.variables.size();
  return n;
}

std::vector<Violation> PlatedFactorGraph::validate() const {
  std::vector<Violation> out;
  auto add = [&](std::string rule, std::vector<std::string> names, std::string msg) {
    out.push_back({std::move(rule), std::move(names), std::move(msg)});
  };
  for (const auto& [name, size] : plates_) {
    if (size < 1) add("plate-size", {name}, "plate '" + name + "' has size 0");
    if (variables_.count(name) || factors_.count(name)) {
      add("name-clash", {name}, "'" + name + "' names both a plate and a vertex");
    }
  }
  for (const auto& [name, v] : variables_) {
    if (v.domain < 1) add("domain-size", {name}, "variable '" + name + "' has an empty domain");
    if (factors_.count(name)) add("name-clash", {name}, "'" + name + "' names both a variable and a factor");
    for (const auto& p : v.plates) {
      if (!plates_.count(p)) add("unknown-plate", {name, p}, "variable '" + name + "' uses unknown plate '" + p + "'");
    }
  }
  for (const auto& [name, f] : factors_) {
    bool shapes_known = true;
    for (const auto& p : f.plates) {
      if (!plates_.count(p)) {
        add("unknown-plate", {name, p}, "factor '" + name + "' uses unknown plate '" + p + "'");
        shapes_known = false;
      }
    }
    for (const auto& vname : f.variables) {
      auto it = variables_.find(vname);
      if (it == variables_.end()) {
        add("unknown-variable", {name, vname}, "factor '" + name + "' involves unknown variable '" + vname + "'");
        shapes_known = false;
        continue;
      }
      if (!subset(it->second.plates, f.plates)) {
        add("plate-containment", {vname, name},
            "P(" + vname + ") is not a subset of P(" + name + ")");
      }
    }
    if (f.table && shapes_known) {
      const auto expected = factor_dims(f);
      if (f.table->dims() != expected) {
        std::vector<std::string> got, want;
        for (const auto& d : f.table->dims()) got.push_back(d.name + ":" + std::to_string(d.size));
        for (const auto& d : expected) want.push_back(d.name + ":" + std::to_string(d.size));
        add("table-shape", {name},
            "factor '" + name + "' table has dims (" + join(got) + "), expected (" + join(want) + ")");
      }
    }
  }
  return out;
}

void PlatedFactorGraph::require_valid() const {
  const auto violations = validate();
  if (violations.empty()) return;
  std::vector<std::string> msgs;
  for (const auto& v : violations) msgs.push_back(v.message);
  throw Error(ErrorCode::Validation, join(msgs, "; "));
}

void PlatedFactorGraph::require_tables() const {
  for (const auto& [name, f] : factors_) {
    if (!f.table) throw Error(ErrorCode::Validation, "factor '" + name + "' has no table");
  }
}

std::string instance_name(const std::string& name, const std::string& plate, std::size_t index) {
  std::string base = name;
  std::map<std::string, std::string> entries;
  if (!name.empty() && name.back() == ']') {
    const auto open = name.rfind('[');
    if (open != std::string::npos) {
      base = name.substr(0, open);
      std::stringstream inner(name.substr(open + 1, name.size() - open - 2));
      std::string item;
      while (std::getline(inner, item, ',')) {
        const auto eq = item.find('=');
        entries[item.substr(0, eq)] = item.substr(eq + 1);
      }
    }
  }
  entries[plate] = std::to_string(index);
  std::vector<std::string> parts;
  for (const auto& [p, i] : entries) parts.push_back(p + "=" + i);
  return base + "[" + join(parts) + "]";
}

PlatedFactorGraph unroll(const PlatedFactorGraph& g, const std::string& plate) {
  const std::size_t m = g.plate_size(plate);
  PlatedFactorGraph out;
  for (const auto& [name, size] : g.plates()) {
    if (name != plate) out.add_plate(name, size);
  }
  // Name of the copy of variable v that pairs with copy i of a factor on b.
  auto var_copy = [&](const std::string& v, std::size_t i) {
    return g.variable(v).plates.count(plate) ? instance_name(v, plate, i) : v;
  };
  for (const auto& [name, v] : g.variables()) {
    PlateSet rest = v.plates;
    rest.erase(plate);
    if (v.plates.count(plate)) {
      for (std::size_t i = 0; i < m; ++i) out.add_variable(instance_name(name, plate, i), v.domain, rest);
    } else {
      out.add_variable(name, v.domain, rest);
    }
  }
  for (const auto& [name, f] : g.factors()) {
    PlateSet rest = f.plates;
    rest.erase(plate);
    if (!f.plates.count(plate)) {
      out.add_factor(name, f.variables, rest, f.table);
      continue;
    }
    for (std::size_t i = 0; i < m; ++i) {
      std::set<std::string> vars;
      std::map<std::string, std::string> renames;
      for (const auto& v : f.variables) {
        const auto copy = var_copy(v, i);
        vars.insert(copy);
        if (copy != v) renames[v] = copy;
      }
      std::optional<NamedTensor> table;
      if (f.table) table = f.table->slice(plate, i).renamed(renames);
      out.add_factor(instance_name(name, plate, i), std::move(vars), rest, std::move(table));
    }
  }
  return out;
}

PlatedFactorGraph unroll_all(const PlatedFactorGraph& g) {
  PlatedFactorGraph out = g;
  while (!out.plates().empty()) out = unroll(out, out.plates().begin()->first);
  return out;
}

std::vector<Component> partition(const std::set<std::string>& variables,
                                 const std::map<std::string, std::set<std::string>>& factor_edges) {
  std::vector<std::string> names(variables.begin(), variables.end());
  const std::size_t n_vars = names.size();
  for (const auto& [f, _] : factor_edges) names.push_back(f);
  std::vector<std::size_t> parent(names.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::size_t fi = n_vars;
  for (const auto& [f, vars] : factor_edges) {
    for (const auto& v : vars) {
      auto it = variables.find(v);
      if (it == variables.end()) continue;
      const auto vi = static_cast<std::size_t>(std::distance(variables.begin(), it));
      parent[find(vi)] = find(fi);
    }
    ++fi;
  }
  std::map<std::size_t, Component> by_root;
  for (std::size_t i = 0; i < names.size(); ++i) {
    auto& c = by_root[find(i)];
    (i < n_vars ? c.variables : c.factors).push_back(names[i]);
  }
  std::vector<std::pair<std::string, Component>> keyed;
  for (auto& [_, c] : by_root) {
    std::sort(c.variables.begin(), c.variables.end());
    std::sort(c.factors.begin(), c.factors.end());
    std::string key;
    if (!c.variables.empty()) key = c.variables.front();
    if (!c.factors.empty() && (key.empty() || c.factors.front() < key)) key = c.factors.front();
    keyed.emplace_back(std::move(key), std::move(c));
  }
  std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<Component> out;
  for (auto& [_, c] : keyed) out.push_back(std::move(c));
  return out;
}

std::string MinorWitness::to_string() const {
  return "plates=(" + plate_a + "," + plate_b + ") u=" + u + " path=[" + join(path) + "] w=" + w;
}

std::optional<MinorWitness> detect_forbidden_minor(const PlatedFactorGraph& g) {
  // Undirected adjacency over variable and factor names.
  std::map<std::string, std::vector<std::string>> adj;
  std::map<std::string, const PlateSet*> plates_of;
  std::set<std::string> is_variable;
  for (const auto& [name, v] : g.variables()) {
    adj[name];
    plates_of[name] = &v.plates;
    is_variable.insert(name);
  }
  for (const auto& [name, f] : g.factors()) {
    plates_of[name] = &f.plates;
    for (const auto& v : f.variables) {
      adj[name].push_back(v);
      adj[v].push_back(name);
    }
  }
  for (auto& [_, n] : adj) std::sort(n.begin(), n.end());

  for (const auto& [a, _a] : g.plates()) {
    for (const auto& [b, _b] : g.plates()) {
      if (a == b) continue;
      auto interior = [&](const std::string& x) { return plates_of[x]->count(a) && plates_of[x]->count(b); };
      auto endpoint_u = [&](const std::string& x) {
        return is_variable.count(x) && plates_of[x]->count(a) && !plates_of[x]->count(b);
      };
      auto endpoint_w = [&](const std::string& x) {
        return is_variable.count(x) && plates_of[x]->count(b) && !plates_of[x]->count(a);
      };
      for (const auto& [u, _v] : g.variables()) {
        if (!endpoint_u(u)) continue;
        std::map<std::string, std::string> parent;
        std::deque<std::string> queue;
        for (const auto& x : adj[u]) {
          if (interior(x) && !parent.count(x)) {
            parent[x] = u;
            queue.push_back(x);
          }
        }
        while (!queue.empty()) {
          const auto x = queue.front();
          queue.pop_front();
          for (const auto& y : adj[x]) {
            if (endpoint_w(y)) {
              MinorWitness w{a, b, u, {}, y};
              for (std::string p = x; p != u; p = parent[p]) w.path.push_back(p);
              std::reverse(w.path.begin(), w.path.end());
              return w;
            }
            if (interior(y) && !parent.count(y) && y != u) {
              parent[y] = x;
              queue.push_back(y);
            }
          }
        }
      }
    }
  }
  return std::nullopt;
}

}  // namespace tvelim
