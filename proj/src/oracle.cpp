// Copyright 2026 The tvelim Authors
// SPDX-License-Identifier: Apache-2.0

#include "tvelim/oracle.hpp"

#include <algorithm>

#include "tvelim/error.hpp"

namespace tvelim::oracle {

namespace {

std::vector<std::size_t> decode(std::size_t flat, const std::vector<std::size_t>& sizes) {
  std::vector<std::size_t> idx(sizes.size());
  for (std::size_t i = sizes.size(); i-- > 0;) {
    idx[i] = flat % sizes[i];
    flat /= sizes[i];
  }
  return idx;
}

struct GroundFactor {
  std::vector<std::size_t> vars;     // ground variable ids
  std::vector<std::size_t> strides;  // row-major over `vars`
  std::vector<double> values;
};

struct Ground {
  std::vector<GroundVariable> vars;
  std::map<std::string, std::size_t> first;  // first ground id of each variable
  std::vector<GroundFactor> factors;
  std::uint64_t states = 1;
};

Ground ground(const PlatedFactorGraph& g, std::uint64_t max_states) {
  g.require_valid();
  g.require_tables();
  Ground out;
  for (const auto& [name, v] : g.variables()) {
    std::size_t copies = 1;
    for (const auto& p : v.plates) copies *= g.plate_size(p);
    out.first[name] = out.vars.size();
    for (std::size_t i = 0; i < copies; ++i) {
      out.vars.push_back({name, i, v.domain});
      if (out.states > max_states / v.domain + 1) throw Error(ErrorCode::TooLarge, "joint table too large");
      out.states *= v.domain;
    }
  }
  if (out.states > max_states) throw Error(ErrorCode::TooLarge, "joint table has " + std::to_string(out.states) + " entries");

  for (const auto& [name, f] : g.factors()) {
    std::vector<std::string> plates(f.plates.begin(), f.plates.end());
    std::vector<std::size_t> psizes;
    for (const auto& p : plates) psizes.push_back(g.plate_size(p));
    std::size_t slices = 1;
    for (auto m : psizes) slices *= m;
    std::vector<std::string> vars(f.variables.begin(), f.variables.end());
    const auto& table = *f.table;
    for (std::size_t slice = 0; slice < slices; ++slice) {
      const auto pidx = decode(slice, psizes);
      std::map<std::string, std::size_t> at_plate;
      for (std::size_t i = 0; i < plates.size(); ++i) at_plate[plates[i]] = pidx[i];
      GroundFactor gf;
      std::vector<std::size_t> vsizes;
      for (const auto& v : vars) {
        const auto& var = g.variable(v);
        std::size_t local = 0;
        for (const auto& p : var.plates) local = local * g.plate_size(p) + at_plate.at(p);
        gf.vars.push_back(out.first.at(v) + local);
        vsizes.push_back(var.domain);
      }
      gf.strides.assign(vars.size(), 1);
      for (std::size_t i = vars.size(); i-- > 1;) gf.strides[i - 1] = gf.strides[i] * vsizes[i];
      std::size_t entries = 1;
      for (auto d : vsizes) entries *= d;
      std::vector<std::size_t> index(table.rank());
      for (std::size_t e = 0; e < entries; ++e) {
        const auto vidx = decode(e, vsizes);
        for (std::size_t d = 0; d < table.rank(); ++d) {
          const auto& dim = table.dims()[d];
          if (dim.kind == DimKind::Plate) {
            index[d] = at_plate.at(dim.name);
          } else {
            index[d] = vidx[static_cast<std::size_t>(std::find(vars.begin(), vars.end(), dim.name) - vars.begin())];
          }
        }
        gf.values.push_back(table.at(index));
      }
      out.factors.push_back(std::move(gf));
    }
  }
  return out;
}

// Calls f(flat, assignment, value) for every joint assignment in order.
template <class F>
void enumerate(const Ground& gr, const Semiring& s, F&& f) {
  std::vector<std::size_t> x(gr.vars.size(), 0);
  for (std::uint64_t flat = 0; flat < gr.states; ++flat) {
    double value = s.one();
    for (const auto& gf : gr.factors) {
      std::size_t e = 0;
      for (std::size_t i = 0; i < gf.vars.size(); ++i) e += x[gf.vars[i]] * gf.strides[i];
      value = s.times(value, gf.values[e]);
    }
    f(flat, x, value);
    for (std::size_t i = x.size(); i-- > 0;) {
      if (++x[i] < gr.vars[i].domain) break;
      x[i] = 0;
    }
  }
}

Assignment to_assignment(const PlatedFactorGraph& g, const Ground& gr, const std::vector<std::size_t>& x) {
  Assignment a;
  for (const auto& [name, v] : g.variables()) {
    IndexTable t;
    for (const auto& p : v.plates) t.plates.push_back(plate_dim(p, g.plate_size(p)));
    const auto n = numel(t.plates);
    for (std::size_t i = 0; i < n; ++i) t.values.push_back(x[gr.first.at(name) + i]);
    a.values.emplace(name, std::move(t));
  }
  return a;
}

}  // namespace

std::uint64_t JointTable::index_of(const Assignment& a) const {
  std::uint64_t flat = 0;
  for (const auto& gv : variables) flat = flat * gv.domain + a.values.at(gv.variable).values.at(gv.slice);
  return flat;
}

std::uint64_t state_count(const PlatedFactorGraph& g) {
  std::uint64_t states = 1;
  for (const auto& [_, v] : g.variables()) {
    std::uint64_t copies = 1;
    for (const auto& p : v.plates) copies *= g.plate_size(p);
    for (std::uint64_t i = 0; i < copies; ++i) {
      if (states > UINT64_MAX / (v.domain + 1)) return UINT64_MAX;
      states *= v.domain;
    }
  }
  return states;
}

double brute_plated_sum_product(const PlatedFactorGraph& g, const Semiring& s, std::uint64_t max_states) {
  const auto gr = ground(g, max_states);
  double total = s.zero();
  enumerate(gr, s, [&](std::uint64_t, const auto&, double v) { total = s.plus(total, v); });
  return total;
}

NamedTensor brute_contract(const PlatedFactorGraph& g, const Semiring& s, const std::set<std::string>& keep,
                           std::uint64_t max_states) {
  const auto gr = ground(g, max_states);
  std::vector<Dim> dims;
  std::vector<std::size_t> ids;
  for (const auto& k : keep) {
    const auto& v = g.variable(k);
    if (!v.plates.empty()) throw Error(ErrorCode::Validation, "kept variable '" + k + "' must not be plated");
    dims.push_back(var_dim(k, v.domain));
    ids.push_back(gr.first.at(k));
  }
  std::vector<double> out(numel(dims), s.zero());
  enumerate(gr, s, [&](std::uint64_t, const std::vector<std::size_t>& x, double v) {
    std::size_t e = 0;
    for (std::size_t i = 0; i < ids.size(); ++i) e = e * dims[i].size + x[ids[i]];
    out[e] = s.plus(out[e], v);
  });
  return NamedTensor::from_layout(std::move(dims), std::move(out));
}

MarginalSet brute_marginals(const PlatedFactorGraph& g, const Semiring& s, std::uint64_t max_states) {
  if (!s.has_divide()) throw Error(ErrorCode::DivisionUnsupported, "marginals need division");
  const auto gr = ground(g, max_states);
  std::vector<std::vector<double>> acc;
  for (const auto& gv : gr.vars) acc.emplace_back(gv.domain, s.zero());
  double total = s.zero();
  enumerate(gr, s, [&](std::uint64_t, const std::vector<std::size_t>& x, double v) {
    total = s.plus(total, v);
    for (std::size_t i = 0; i < x.size(); ++i) acc[i][x[i]] = s.plus(acc[i][x[i]], v);
  });
  MarginalSet out;
  for (const auto& [name, v] : g.variables()) {
    std::vector<Dim> dims;
    for (const auto& p : v.plates) dims.push_back(plate_dim(p, g.plate_size(p)));
    const auto copies = numel(dims);
    dims.push_back(var_dim(name, v.domain));
    std::vector<double> values;
    for (std::size_t i = 0; i < copies; ++i) {
      for (auto a : acc[gr.first.at(name) + i]) values.push_back(s.divide(a, total));
    }
    out.marginals.emplace(name, NamedTensor::from_layout(std::move(dims), std::move(values)));
  }
  return out;
}

Assignment brute_map(const PlatedFactorGraph& g, const Semiring& s, std::uint64_t max_states) {
  if (!s.has_argmax()) throw Error(ErrorCode::Validation, "MAP needs a max semiring");
  const auto gr = ground(g, max_states);
  std::vector<std::size_t> best_x;
  double best = s.zero();
  bool any = false;
  enumerate(gr, s, [&](std::uint64_t, const std::vector<std::size_t>& x, double v) {
    if (!any || v > best) {
      best = v;
      best_x = x;
      any = true;
    }
  });
  auto a = to_assignment(g, gr, best_x);
  a.score = best;
  return a;
}

JointTable brute_joint(const PlatedFactorGraph& g, const Semiring& s, std::uint64_t max_states) {
  const auto gr = ground(g, max_states);
  JointTable t;
  t.variables = gr.vars;
  t.values.reserve(gr.states);
  enumerate(gr, s, [&](std::uint64_t, const auto&, double v) { t.values.push_back(v); });
  return t;
}

}  // namespace tvelim::oracle
