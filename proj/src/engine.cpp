// Copyright 2026 The tvelim Authors
// SPDX-License-Identifier: Apache-2.0

#include "tvelim/engine.hpp"

#include <algorithm>
#include <map>
#include <memory>

#include "tvelim/parallel.hpp"

namespace tvelim {

namespace {

template <class Container>
std::string brace(const Container& items) {
  std::string out = "{";
  bool first = true;
  for (const auto& x : items) {
    if (!first) out += ",";
    out += x;
    first = false;
  }
  return out + "}";
}

std::vector<Dim> merge_dims(const std::vector<const std::vector<Dim>*>& parts) {
  std::map<std::string, Dim> seen;
  for (const auto* p : parts) {
    for (const auto& d : *p) seen.emplace(d.name, d);
  }
  std::vector<Dim> out;
  for (auto& [_, d] : seen) out.push_back(d);
  sort_canonical(out);
  return out;
}

// A tensor flowing through elimination: its shape, and in executing mode the
// tape node that holds its value.
struct Item {
  std::vector<Dim> dims;
  std::size_t node = SIZE_MAX;
};

// Records tape nodes (when executing) and accumulates the cost model. In
// shape-only mode nothing is computed and `node` stays unset.
class Recorder {
 public:
  Recorder(const Semiring& s, const ThreadPool* pool, bool execute) : pool_(pool), execute_(execute) {
    tape.semiring = s;
  }

  Tape tape;
  std::uint64_t cost = 0;

  bool executing() const { return execute_; }

  const NamedTensor& value(const Item& item) const { return tape.nodes[item.node].value; }

  Item leaf(NodeKind kind, std::vector<Dim> dims, std::optional<NamedTensor> value, std::string label = {}) {
    Item item{std::move(dims)};
    if (execute_) {
      TapeNode n;
      n.kind = kind;
      n.value = std::move(*value);
      n.label = std::move(label);
      item.node = push(std::move(n));
    }
    return item;
  }

  Item contract(const std::vector<Item>& inputs, const std::set<std::string>& reduce) {
    std::vector<const std::vector<Dim>*> parts;
    for (const auto& i : inputs) parts.push_back(&i.dims);
    auto all = merge_dims(parts);
    cost += numel(all);
    Item out;
    for (auto& d : all) {
      if (!reduce.count(d.name)) out.dims.push_back(d);
    }
    if (execute_) {
      TapeNode n;
      n.kind = NodeKind::Contract;
      n.reduced = reduce;
      std::vector<NamedTensor> values;
      for (const auto& i : inputs) {
        n.inputs.push_back(i.node);
        values.push_back(value(i));
      }
      if (tape.semiring.has_argmax() && !reduce.empty()) {
        auto r = contract_argmax(values, reduce, tape.semiring, pool_);
        n.value = std::move(r.value);
        n.argmax = std::move(r.argmax);
      } else {
        n.value = tvelim::contract(values, reduce, tape.semiring, pool_);
      }
      out.node = push(std::move(n));
    }
    return out;
  }

  Item plate_product(const Item& input, const PlateSet& plates) {
    if (plates.empty()) return input;
    cost += numel(input.dims);
    Item out;
    for (const auto& d : input.dims) {
      if (!plates.count(d.name)) out.dims.push_back(d);
    }
    if (execute_) {
      TapeNode n;
      n.kind = NodeKind::PlateProduct;
      n.inputs = {input.node};
      n.reduced = plates;
      n.value = reduce_product(value(input), plates, tape.semiring, pool_);
      out.node = push(std::move(n));
    }
    return out;
  }

  /// Sequential variable elimination of `vars` over `items`.
  Item eliminate(std::vector<Item> items, const std::vector<std::string>& vars) {
    std::vector<std::vector<Dim>> shapes;
    for (const auto& i : items) shapes.push_back(i.dims);
    const auto plan = plan_elimination(shapes, vars);
    for (const auto& v : plan.order) {
      std::vector<Item> touching, rest;
      for (auto& i : items) {
        const bool has = std::any_of(i.dims.begin(), i.dims.end(), [&](const Dim& d) { return d.name == v; });
        (has ? touching : rest).push_back(std::move(i));
      }
      items = std::move(rest);
      if (!touching.empty()) items.push_back(contract(touching, {v}));
    }
    if (items.empty()) return leaf(NodeKind::Constant, {}, NamedTensor::scalar(tape.semiring.one()));
    if (items.size() == 1) return items.front();
    return contract(items, {});
  }

 private:
  std::size_t push(TapeNode n) {
    tape.nodes.push_back(std::move(n));
    return tape.nodes.size() - 1;
  }

  const ThreadPool* pool_;
  bool execute_;
};

struct WorkFactor {
  std::set<std::string> vars;
  PlateSet plates;
  Item item;
};

struct Outcome {
  Schedule schedule;
  std::optional<Intractability> intractable;
  Item result;
};

// The leaf-plate loop shared by execution and dry runs.
Outcome run(const PlatedFactorGraph& g, Recorder& rec, const std::set<std::string>& keep,
            const EngineOptions* options) {
  g.require_valid();
  if (rec.executing()) g.require_tables();
  for (const auto& k : keep) {
    if (!g.variable(k).plates.empty()) {
      throw Error(ErrorCode::Validation, "kept variable '" + k + "' must not be plated");
    }
  }

  std::map<std::string, Variable> vars = g.variables();
  std::map<std::string, WorkFactor> factors;
  std::set<std::string> touched;
  for (const auto& [name, f] : g.factors()) {
    auto dims = g.factor_dims(f);
    auto item = rec.leaf(NodeKind::Input, dims, f.table, name);
    factors.emplace(name, WorkFactor{f.variables, f.plates, std::move(item)});
    touched.insert(f.variables.begin(), f.variables.end());
  }
  // A variable without factors gets an all-ones factor, so summing it out
  // multiplies by sum_of_ones(|dom|) in each of its plate slices.
  for (const auto& [name, v] : vars) {
    if (touched.count(name)) continue;
    Factor ones{"~ones:" + name, {name}, v.plates, std::nullopt};
    auto dims = g.factor_dims(ones);
    std::optional<NamedTensor> table;
    if (rec.executing()) table = NamedTensor::filled(dims, rec.tape.semiring.one());
    factors.emplace(ones.name, WorkFactor{{name}, v.plates, rec.leaf(NodeKind::Constant, dims, table, ones.name)});
  }

  Outcome out;
  std::vector<Item> scalars;
  std::size_t produced = 0;
  auto report = [&] {
    if (!options || !options->debug_invariant || !options->on_iteration) return;
    PlatedFactorGraph remaining;
    for (const auto& [name, size] : g.plates()) remaining.add_plate(name, size);
    for (const auto& [name, v] : vars) remaining.add_variable(name, v.domain, v.plates);
    for (const auto& [name, f] : factors) remaining.add_factor(name, f.vars, f.plates, rec.value(f.item));
    std::vector<NamedTensor> values;
    for (const auto& s : scalars) values.push_back(rec.value(s));
    options->on_iteration(remaining, values);
  };

  while (!factors.empty()) {
    // Leaf: a plate set of maximal size; ties go to the smallest in name order.
    const PlateSet* leaf = nullptr;
    for (const auto& [_, f] : factors) {
      if (!leaf || f.plates.size() > leaf->size() || (f.plates.size() == leaf->size() && f.plates < *leaf)) {
        leaf = &f.plates;
      }
    }
    const PlateSet L = *leaf;

    std::set<std::string> leaf_vars;
    for (const auto& [name, v] : vars) {
      if (v.plates == L && !keep.count(name)) leaf_vars.insert(name);
    }
    std::map<std::string, std::set<std::string>> leaf_factors;
    for (const auto& [name, f] : factors) {
      if (f.plates == L) leaf_factors.emplace(name, f.vars);
    }

    for (const auto& comp : partition(leaf_vars, leaf_factors)) {
      std::vector<Item> items;
      std::set<std::string> remaining_vars;
      for (const auto& fname : comp.factors) {
        const auto& wf = factors.at(fname);
        items.push_back(wf.item);
        remaining_vars.insert(wf.vars.begin(), wf.vars.end());
      }
      for (const auto& v : comp.variables) remaining_vars.erase(v);

      ScheduleStep step{L, comp.factors, comp.variables, {remaining_vars.begin(), remaining_vars.end()}, {}};

      PlateSet next;
      bool to_scalars = true;
      for (const auto& v : remaining_vars) {
        if (keep.count(v)) continue;
        to_scalars = false;
        next.insert(vars.at(v).plates.begin(), vars.at(v).plates.end());
      }
      if (!to_scalars && next == L) {
        out.schedule.op_count = rec.cost;
        out.intractable = Intractability{L, comp.factors, step.produce_vars};
        return out;
      }

      Item f = rec.eliminate(std::move(items), comp.variables);
      for (const auto& fname : comp.factors) factors.erase(fname);
      for (const auto& v : comp.variables) vars.erase(v);

      if (to_scalars) {
        step.product_reduced = L;
        scalars.push_back(rec.plate_product(f, L));
      } else {
        std::set_difference(L.begin(), L.end(), next.begin(), next.end(),
                            std::inserter(step.product_reduced, step.product_reduced.end()));
        Item reduced = rec.plate_product(f, step.product_reduced);
        factors.emplace("~f" + std::to_string(++produced), WorkFactor{remaining_vars, next, std::move(reduced)});
      }
      out.schedule.steps.push_back(std::move(step));
    }
    report();
  }

  if (scalars.empty()) {
    out.result = rec.leaf(NodeKind::Constant, {}, NamedTensor::scalar(rec.tape.semiring.one()));
  } else if (scalars.size() == 1) {
    out.result = scalars.front();
  } else {
    out.result = rec.contract(scalars, {});
  }
  out.schedule.op_count = rec.cost;
  return out;
}

}  // namespace

std::string ScheduleStep::to_string() const {
  return "L=" + brace(leaf) + " eliminate=" + brace(eliminated) + " produce_vars=" + brace(produce_vars) +
         " product_reduce=" + brace(product_reduced);
}

std::string Schedule::trace() const {
  std::string out;
  for (const auto& s : steps) out += s.to_string() + "\n";
  return out;
}

std::string Intractability::to_string() const {
  return "component " + brace(factors) + " at leaf " + brace(leaf) + " leaves variables " +
         brace(remaining_vars) + " whose plates cover the leaf";
}

NamedTensor Tape::replay(const ThreadPool* pool) const {
  std::vector<NamedTensor> values(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto& n = nodes[i];
    switch (n.kind) {
      case NodeKind::Input:
      case NodeKind::Constant:
        values[i] = n.value;
        break;
      case NodeKind::Contract: {
        std::vector<NamedTensor> in;
        for (auto j : n.inputs) in.push_back(values[j]);
        values[i] = semiring.has_argmax() && !n.reduced.empty()
                        ? contract_argmax(in, n.reduced, semiring, pool).value
                        : contract(in, n.reduced, semiring, pool);
        break;
      }
      case NodeKind::PlateProduct:
        values[i] = reduce_product(values[n.inputs.front()], n.reduced, semiring, pool);
        break;
    }
  }
  return values.at(root);
}

EliminationResult tensor_variable_elimination(const PlatedFactorGraph& g, const Semiring& s,
                                              const EngineOptions& options) {
  std::unique_ptr<ThreadPool> owned;
  const ThreadPool* pool = options.pool;
  if (!pool && options.threads > 1) {
    owned = std::make_unique<ThreadPool>(options.threads);
    pool = owned.get();
  }
  Recorder rec(s, pool, true);
  auto outcome = run(g, rec, options.keep, &options);
  if (outcome.intractable) throw IntractableError(*outcome.intractable);
  EliminationResult result;
  result.value = rec.value(outcome.result);
  rec.tape.root = outcome.result.node;
  result.tape = std::move(rec.tape);
  result.schedule = std::move(outcome.schedule);
  return result;
}

DryRun dry_run(const PlatedFactorGraph& g, const std::set<std::string>& keep) {
  Recorder rec(Semiring::real(), nullptr, false);
  auto outcome = run(g, rec, keep, nullptr);
  return {std::move(outcome.schedule), std::move(outcome.intractable)};
}

NamedTensor sum_product(std::span<const NamedTensor> factors, std::span<const Dim> vars, const Semiring& s,
                        const ThreadPool* pool) {
  Recorder rec(s, pool, true);
  std::vector<Item> items;
  std::set<std::string> present;
  for (const auto& f : factors) {
    items.push_back(rec.leaf(NodeKind::Input, f.dims(), f));
    for (const auto& d : f.dims()) present.insert(d.name);
  }
  std::vector<std::string> names;
  double isolated = s.one();
  for (const auto& v : vars) {
    if (v.kind != DimKind::Variable) {
      throw Error(ErrorCode::PlusOnPlateDim, "plate '" + v.name + "' cannot be summed out");
    }
    if (present.count(v.name)) {
      names.push_back(v.name);
    } else {
      isolated = s.times(isolated, sum_of_ones(v.size, s));
    }
  }
  Item result = rec.eliminate(std::move(items), names);
  if (isolated != s.one()) {
    result = rec.contract({result, rec.leaf(NodeKind::Constant, {}, NamedTensor::scalar(isolated))}, {});
  }
  return rec.value(result);
}

}  // namespace tvelim
