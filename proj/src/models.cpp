// Copyright 2026 The tvelim Authors
// SPDX-License-Identifier: Apache-2.0

#include "tvelim/models.hpp"

#include <random>

namespace tvelim::models {

namespace {

void fill(PlatedFactorGraph& g, std::optional<std::uint64_t> seed) {
  if (seed) {
    randomize(g, *seed);
  } else {
    fill_ones(g);
  }
}

}  // namespace

void randomize(PlatedFactorGraph& g, std::uint64_t seed, double lo, double hi) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  for (const auto& [name, f] : g.factors()) {
    auto dims = g.factor_dims(f);
    std::vector<double> values(numel(dims));
    for (auto& v : values) v = u(rng);
    g.set_table(name, NamedTensor::from_layout(std::move(dims), std::move(values)));
  }
}

void fill_ones(PlatedFactorGraph& g) {
  for (const auto& [name, f] : g.factors()) g.set_table(name, NamedTensor::filled(g.factor_dims(f), 1.0));
}

PlatedFactorGraph nested(std::size_t I, std::size_t J, std::size_t domain, std::optional<std::uint64_t> seed) {
  PlatedFactorGraph g;
  g.add_plate("I", I);
  g.add_plate("J", J);
  g.add_variable("X", domain);
  g.add_variable("Y", domain, {"I"});
  g.add_factor("F", {"X"}, {});
  g.add_factor("G", {"Y"}, {"I"});
  g.add_factor("H", {"X", "Y"}, {"I", "J"});
  fill(g, seed);
  return g;
}

PlatedFactorGraph rbm(std::size_t I, std::size_t J, std::size_t domain, std::optional<std::uint64_t> seed) {
  PlatedFactorGraph g;
  g.add_plate("I", I);
  g.add_plate("J", J);
  g.add_variable("X", domain, {"I"});
  g.add_variable("Y", domain, {"J"});
  g.add_factor("F", {"X", "Y"}, {"I", "J"});
  fill(g, seed);
  return g;
}

PlatedFactorGraph benchmark(std::size_t domain, std::size_t I, std::size_t J, std::optional<std::uint64_t> seed,
                            bool extra_vz) {
  PlatedFactorGraph g;
  g.add_plate("a", I);
  g.add_plate("b", J);
  g.add_variable("v", domain, {"a", "b"});
  g.add_variable("w", domain, {"a"});
  g.add_variable("x", domain);
  g.add_variable("y", domain, {"b"});
  g.add_variable("z", domain, {"a", "b"});
  g.add_factor("f_vw", {"v", "w"}, {"a", "b"});
  g.add_factor("f_wx", {"w", "x"}, {"a"});
  g.add_factor("f_x", {"x"}, {});
  g.add_factor("f_xy", {"x", "y"}, {"b"});
  g.add_factor("f_yz", {"y", "z"}, {"a", "b"});
  if (extra_vz) g.add_factor("f_vz", {"v", "z"}, {"a", "b"});
  fill(g, seed);
  return g;
}

PlatedFactorGraph in_semiring(const PlatedFactorGraph& g, const Semiring& s) {
  PlatedFactorGraph out = g;
  for (const auto& [name, f] : g.factors()) {
    if (!f.table) continue;
    auto values = f.table->values();
    for (auto& v : values) v = s.from_real(v);
    out.set_table(name, NamedTensor::from_layout(f.table->dims(), std::move(values)));
  }
  return out;
}

}  // namespace tvelim::models
