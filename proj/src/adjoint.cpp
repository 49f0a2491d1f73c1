// Copyright 2026 The tvelim Authors
// SPDX-License-Identifier: Apache-2.0

#include "tvelim/adjoint.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "tvelim/parallel.hpp"
#include "tvelim/rng.hpp"

namespace tvelim {

namespace {

std::unique_ptr<ThreadPool> make_pool(const EngineOptions& options, const ThreadPool*& pool) {
  pool = options.pool;
  if (!pool && options.threads > 1) {
    auto owned = std::make_unique<ThreadPool>(options.threads);
    pool = owned.get();
    return owned;
  }
  return nullptr;
}

void accumulate(std::optional<NamedTensor>& slot, NamedTensor value, const Semiring& s) {
  if (!slot) {
    slot = std::move(value);
    return;
  }
  auto a = slot->values();
  const auto b = value.broadcast_to(slot->dims()).values();
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = s.plus(a[i], b[i]);
  slot = NamedTensor::from_layout(slot->dims(), std::move(a));
}

// Normalizes a marginal over (plates..., v); v is the last canonical dim.
NamedTensor normalize_last(const NamedTensor& m, const Semiring& s) {
  auto values = m.values();
  const std::size_t dom = m.dims().back().size;
  for (std::size_t begin = 0; begin < values.size(); begin += dom) {
    const std::span<const double> block(&values[begin], dom);
    const double total = fold_plus(block, s);
    for (std::size_t x = 0; x < dom; ++x) values[begin + x] = s.divide(values[begin + x], total);
  }
  return NamedTensor::from_layout(m.dims(), std::move(values));
}

// Backward lookups for one eliminated variable v: for every plate slice of
// v, where to read each tensor given the values already chosen for the
// variables eliminated after v.
struct Lookup {
  struct Other {
    std::size_t var;
    std::size_t stride;
    std::vector<std::size_t> flat_of_slice;  // index into that variable's IndexTable
  };
  const double* data = nullptr;
  std::vector<std::size_t> slice_offset;
  std::size_t self_stride = 0;
  std::vector<Other> others;

  std::size_t offset(std::size_t slice, const std::vector<std::vector<std::size_t>>& chosen) const {
    std::size_t off = slice_offset[slice];
    for (const auto& o : others) off += o.stride * chosen[o.var][o.flat_of_slice[slice]];
    return off;
  }
};

struct BackStep {
  std::size_t var;
  std::size_t domain;
  std::size_t slices;
  std::vector<Lookup> inputs;
};

class Backtracker {
 public:
  explicit Backtracker(const PlatedFactorGraph& g) : g_(g) {
    for (const auto& [name, v] : g.variables()) {
      ids_.emplace(name, names_.size());
      names_.push_back(name);
      std::vector<Dim> plates;
      for (const auto& p : v.plates) plates.push_back(plate_dim(p, g.plate_size(p)));
      plates_.push_back(std::move(plates));
    }
  }

  bool is_variable(const std::string& name) const { return ids_.count(name) > 0; }

  BackStep step(const std::string& var, const std::vector<const NamedTensor*>& tensors) const {
    const std::size_t id = ids_.at(var);
    const auto& vplates = plates_[id];
    BackStep st{id, g_.variable(var).domain, static_cast<std::size_t>(numel(vplates)), {}};
    // Plate multi-index of every slice of v.
    std::vector<std::map<std::string, std::size_t>> slice_index(st.slices);
    for (std::size_t s = 0; s < st.slices; ++s) {
      std::size_t rem = s;
      for (std::size_t i = vplates.size(); i-- > 0;) {
        slice_index[s][vplates[i].name] = rem % vplates[i].size;
        rem /= vplates[i].size;
      }
    }
    for (const auto* t : tensors) {
      Lookup lk;
      lk.data = t->data() + t->offset();
      lk.slice_offset.assign(st.slices, 0);
      for (std::size_t d = 0; d < t->rank(); ++d) {
        const auto& dim = t->dims()[d];
        const std::size_t stride = t->strides()[d];
        if (dim.kind == DimKind::Plate) {
          for (std::size_t s = 0; s < st.slices; ++s) lk.slice_offset[s] += slice_index[s].at(dim.name) * stride;
        } else if (dim.name == var) {
          lk.self_stride = stride;
        } else {
          Lookup::Other o{ids_.at(dim.name), stride, std::vector<std::size_t>(st.slices)};
          const auto& uplates = plates_[o.var];
          for (std::size_t s = 0; s < st.slices; ++s) {
            std::size_t flat = 0;
            for (const auto& p : uplates) flat = flat * p.size + slice_index[s].at(p.name);
            o.flat_of_slice[s] = flat;
          }
          lk.others.push_back(std::move(o));
        }
      }
      st.inputs.push_back(std::move(lk));
    }
    return st;
  }

  std::vector<std::vector<std::size_t>> blank() const {
    std::vector<std::vector<std::size_t>> chosen;
    for (const auto& p : plates_) chosen.emplace_back(numel(p), 0);
    return chosen;
  }

  Assignment to_assignment(std::vector<std::vector<std::size_t>> chosen) const {
    Assignment a;
    for (std::size_t i = 0; i < names_.size(); ++i) a.values.emplace(names_[i], IndexTable{plates_[i], std::move(chosen[i])});
    return a;
  }

 private:
  const PlatedFactorGraph& g_;
  std::map<std::string, std::size_t> ids_;
  std::vector<std::string> names_;
  std::vector<std::vector<Dim>> plates_;
};

// Contract nodes that eliminate a single graph variable, in reverse order.
std::vector<std::size_t> elimination_nodes(const Tape& tape, const Backtracker& bt) {
  std::vector<std::size_t> out;
  for (std::size_t i = tape.nodes.size(); i-- > 0;) {
    const auto& n = tape.nodes[i];
    if (n.kind == NodeKind::Contract && n.reduced.size() == 1 && bt.is_variable(*n.reduced.begin())) {
      out.push_back(i);
    }
  }
  return out;
}

}  // namespace

MarginalResult marginals_from_tape(const PlatedFactorGraph& g, const Tape& tape, bool normalize,
                                   const ThreadPool* pool) {
  const Semiring& s = tape.semiring;
  if (!s.has_divide()) {
    throw Error(ErrorCode::DivisionUnsupported,
                "marginals need division; semiring '" + std::string(s.name()) + "' has none");
  }
  MarginalResult out;
  out.marginals.normalized = normalize;
  const auto& root = tape.nodes.at(tape.root).value;
  out.partition = root.rank() == 0 ? root.item() : s.zero();

  std::vector<std::optional<NamedTensor>> adj(tape.nodes.size());
  adj[tape.root] = NamedTensor::filled(root.dims(), s.one());
  for (std::size_t i = tape.root + 1; i-- > 0;) {
    if (!adj[i]) continue;
    const auto& node = tape.nodes[i];
    const NamedTensor& upstream = *adj[i];
    if (node.kind == NodeKind::Contract) {
      std::vector<NamedTensor> xs;
      for (auto j : node.inputs) xs.push_back(tape.nodes[j].value);
      if (node.reduced.size() == 1 && g.variables().count(*node.reduced.begin())) {
        const auto& v = *node.reduced.begin();
        std::vector<NamedTensor> terms{upstream};
        terms.insert(terms.end(), xs.begin(), xs.end());
        std::set<std::string> reduce;
        for (const auto& d : union_dims(terms)) {
          if (d.kind == DimKind::Variable && d.name != v) reduce.insert(d.name);
        }
        out.marginals.marginals[v] = contract(terms, reduce, s, pool);
      }
      for (std::size_t j = 0; j < xs.size(); ++j) {
        std::vector<NamedTensor> terms{upstream};
        for (std::size_t k = 0; k < xs.size(); ++k) {
          if (k != j) terms.push_back(xs[k]);
        }
        std::set<std::string> reduce;
        for (const auto& d : union_dims(terms)) {
          if (!xs[j].has(d.name)) reduce.insert(d.name);
        }
        accumulate(adj[node.inputs[j]], contract(terms, reduce, s, pool).broadcast_to(xs[j].dims()), s);
      }
    } else if (node.kind == NodeKind::PlateProduct) {
      const auto& x = tape.nodes[node.inputs.front()].value;
      const NamedTensor terms[] = {upstream, exclusive_product(x, node.reduced, s, pool)};
      accumulate(adj[node.inputs.front()], contract(terms, {}, s, pool), s);
    }
  }
  if (normalize) {
    for (auto& [_, m] : out.marginals.marginals) m = normalize_last(m, s);
  }
  return out;
}

MarginalResult marginals(const PlatedFactorGraph& g, const Semiring& s, bool normalize,
                         const EngineOptions& options) {
  if (!s.has_divide()) {
    throw Error(ErrorCode::DivisionUnsupported,
                "marginals need division; semiring '" + std::string(s.name()) + "' has none");
  }
  const ThreadPool* pool = nullptr;
  auto owned = make_pool(options, pool);
  EngineOptions forward = options;
  forward.pool = pool;
  const auto result = tensor_variable_elimination(g, s, forward);
  return marginals_from_tape(g, result.tape, normalize, pool);
}

Assignment map_assignment(const PlatedFactorGraph& g, const Semiring& s, const EngineOptions& options) {
  if (!s.has_argmax()) {
    throw Error(ErrorCode::Validation, "MAP needs a max semiring, got '" + std::string(s.name()) + "'");
  }
  const auto result = tensor_variable_elimination(g, s, options);
  Backtracker bt(g);
  auto chosen = bt.blank();
  for (auto i : elimination_nodes(result.tape, bt)) {
    const auto& node = result.tape.nodes[i];
    const auto st = bt.step(*node.reduced.begin(), {&*node.argmax});
    for (std::size_t slice = 0; slice < st.slices; ++slice) {
      const auto& lk = st.inputs.front();
      chosen[st.var][slice] = static_cast<std::size_t>(lk.data[lk.offset(slice, chosen)]);
    }
  }
  auto a = bt.to_assignment(std::move(chosen));
  a.score = evaluate_assignment(g, a, s);
  return a;
}

std::vector<Assignment> sample(const PlatedFactorGraph& g, const Semiring& s, std::uint64_t seed, std::size_t n,
                               const EngineOptions& options, const SampleOptions& sample_options) {
  if (s.kind() != SemiringKind::RealSumProduct && s.kind() != SemiringKind::LogSumExpProduct) {
    throw Error(ErrorCode::Validation, "sampling needs the real or log semiring, got '" + std::string(s.name()) + "'");
  }
  const ThreadPool* pool = nullptr;
  auto owned = make_pool(options, pool);
  EngineOptions forward = options;
  forward.pool = pool;
  const auto result = tensor_variable_elimination(g, s, forward);
  if (result.value.item() == s.zero()) throw Error(ErrorCode::ZeroPartition, "the joint has zero total mass");

  Backtracker bt(g);
  std::vector<BackStep> steps;
  for (auto i : elimination_nodes(result.tape, bt)) {
    const auto& node = result.tape.nodes[i];
    std::vector<const NamedTensor*> inputs;
    for (auto j : node.inputs) inputs.push_back(&result.tape.nodes[j].value);
    steps.push_back(bt.step(*node.reduced.begin(), inputs));
  }

  const bool log_space = s.log_space();
  const CounterRng root(seed);
  std::vector<Assignment> out(n);
  parallel_for(pool, n, [&](std::size_t begin, std::size_t end) {
    std::vector<double> weights;
    for (std::size_t i = begin; i < end; ++i) {
      CounterRng rng = root.split(i);
      auto chosen = bt.blank();
      for (const auto& st : steps) {
        weights.resize(st.domain);
        for (std::size_t slice = 0; slice < st.slices; ++slice) {
          for (std::size_t x = 0; x < st.domain; ++x) weights[x] = s.one();
          for (const auto& lk : st.inputs) {
            const std::size_t off = lk.offset(slice, chosen);
            for (std::size_t x = 0; x < st.domain; ++x) {
              weights[x] = s.times(weights[x], lk.data[off + x * lk.self_stride]);
            }
          }
          if (log_space) {
            const double top = *std::max_element(weights.begin(), weights.end());
            for (auto& w : weights) w = top == -INFINITY ? 0.0 : std::exp(w - top);
          }
          double total = 0.0;
          for (auto w : weights) total += w;
          const double target = rng.uniform() * total;
          std::size_t pick = 0;
          double cumulative = 0.0;
          for (std::size_t x = 0; x < st.domain; ++x) {
            cumulative += weights[x];
            pick = x;
            if (cumulative > target && weights[x] > 0.0) break;
          }
          chosen[st.var][slice] = pick;
        }
      }
      out[i] = bt.to_assignment(std::move(chosen));
      if (sample_options.with_scores) out[i].score = evaluate_assignment(g, out[i], s);
    }
  }, 16);
  return out;
}

}  // namespace tvelim
