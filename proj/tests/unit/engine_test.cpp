// Copyright 2026 The tvelim Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "random_models.hpp"
#include "tvelim/engine.hpp"
#include "tvelim/error.hpp"
#include "tvelim/models.hpp"
#include "tvelim/oracle.hpp"
#include "tvelim/parallel.hpp"

namespace tvelim {
namespace {

using testing::rel_diff;

TEST(SumProduct, MatrixMultiply) {
  const auto F = NamedTensor::from_layout({var_dim("x", 2), var_dim("y", 2)}, {1, 2, 3, 4});
  const auto G = NamedTensor::from_layout({var_dim("y", 2), var_dim("z", 2)}, {5, 6, 7, 8});
  const std::vector<NamedTensor> in = {F, G};
  const std::vector<Dim> vars = {var_dim("y", 2)};
  const auto r = sum_product(in, vars, Semiring::real());
  EXPECT_EQ(r.values(), (std::vector<double>{19, 22, 43, 50}));
}

TEST(SumProduct, EmptyIsOne) {
  for (const auto& s : {Semiring::real(), Semiring::log()}) EXPECT_EQ(sum_product({}, {}, s).item(), s.one());
}

TEST(SumProduct, IsolatedVariable) {
  const std::vector<NamedTensor> in = {NamedTensor::scalar(5.0)};
  const std::vector<Dim> vars = {var_dim("v", 3)};
  EXPECT_EQ(sum_product(in, vars, Semiring::real()).item(), 15.0);
}

TEST(SumProduct, AgreesWithDefinition) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto s = Semiring::real();
  for (int t = 0; t < 40; ++t) {
    PlatedFactorGraph g = testing::random_graph(rng, {.max_plates = 0});
    std::vector<NamedTensor> in;
    for (const auto& [_, f] : g.factors()) in.push_back(*f.table);
    std::vector<Dim> vars;
    for (const auto& [name, v] : g.variables()) vars.push_back(var_dim(name, v.domain));
    const auto got = sum_product(in, vars, s).item();
    EXPECT_LT(rel_diff(got, oracle::brute_plated_sum_product(g, s)), 1e-12);
  }
}

TEST(Planner, ExhaustiveIsOptimal) {
  // Chain a-b-c-d with a big middle dim: eliminating the ends first is best.
  const std::vector<std::vector<Dim>> f = {{var_dim("a", 2), var_dim("b", 30)},
                                           {var_dim("b", 30), var_dim("c", 30)},
                                           {var_dim("c", 30), var_dim("d", 2)}};
  const auto plan = plan_elimination(f, {"a", "b", "c", "d"});
  std::vector<std::string> perm = {"a", "b", "c", "d"};
  do {
    EXPECT_LE(plan.cost, elimination_cost(f, perm));
  } while (std::next_permutation(perm.begin(), perm.end()));
  EXPECT_EQ(plan.cost, elimination_cost(f, plan.order));
}

TEST(Planner, MinFillForLargerSets) {
  std::vector<std::vector<Dim>> f;
  std::vector<std::string> vars;
  for (int i = 0; i < 7; ++i) {
    vars.push_back(std::string(1, static_cast<char>('a' + i)));
    if (i) f.push_back({var_dim(vars[i - 1], 2), var_dim(vars[i], 2)});
  }
  const auto plan = plan_elimination(f, vars);
  EXPECT_EQ(plan.order.size(), vars.size());
  EXPECT_EQ(plan.order.front(), "a");
}

TEST(Engine, NestedMatchesFactoredExpression) {
  const std::size_t I = 2, J = 3, D = 2;
  const auto g = models::nested(I, J, D, 41);
  const auto& F = *g.factor("F").table;
  const auto& G = *g.factor("G").table;
  const auto& H = *g.factor("H").table;
  double expect = 0;
  for (std::size_t x = 0; x < D; ++x) {
    double prod_i = 1;
    for (std::size_t i = 0; i < I; ++i) {
      double sum_y = 0;
      for (std::size_t y = 0; y < D; ++y) {
        const std::vector<std::size_t> gi = {i, y};
        double term = G.at(gi);
        for (std::size_t j = 0; j < J; ++j) {
          const std::vector<std::size_t> hi = {i, j, x, y};
          term *= H.at(hi);
        }
        sum_y += term;
      }
      prod_i *= sum_y;
    }
    const std::vector<std::size_t> fi = {x};
    expect += F.at(fi) * prod_i;
  }
  const auto got = tensor_variable_elimination(g, Semiring::real()).value.item();
  EXPECT_LT(rel_diff(got, expect), 1e-12);
  EXPECT_LT(rel_diff(got, oracle::brute_plated_sum_product(g, Semiring::real())), 1e-12);
}

TEST(Engine, RbmIntractable) {
  try {
    tensor_variable_elimination(models::rbm(2, 2, 2, 1), Semiring::real());
    FAIL();
  } catch (const IntractableError& e) {
    EXPECT_EQ(e.code(), ErrorCode::Intractable);
    EXPECT_EQ(e.info().leaf, (PlateSet{"I", "J"}));
    EXPECT_EQ(e.info().remaining_vars, (std::vector<std::string>{"X", "Y"}));
  }
  const auto d = dry_run(models::rbm());
  ASSERT_FALSE(d.tractable());
  EXPECT_TRUE(d.schedule.steps.empty());
}

TEST(Engine, NormalizedSingleFactor) {
  PlatedFactorGraph g;
  g.add_variable("x", 2);
  g.add_factor("f", {"x"}, {}, NamedTensor::from_layout({var_dim("x", 2)}, {0.3, 0.7}));
  EXPECT_EQ(tensor_variable_elimination(g, Semiring::real()).value.item(), 1.0);
}

TEST(Engine, EmptyGraph) {
  const auto d = dry_run(PlatedFactorGraph{});
  EXPECT_TRUE(d.tractable());
  EXPECT_TRUE(d.schedule.steps.empty());
  EXPECT_EQ(d.schedule.op_count, 0u);
  EXPECT_EQ(tensor_variable_elimination(PlatedFactorGraph{}, Semiring::real()).value.item(), 1.0);
}

TEST(Engine, BenchmarkTrace) {
  const auto d = dry_run(models::benchmark());
  ASSERT_TRUE(d.tractable());
  EXPECT_EQ(d.schedule.trace(),
            "L={a,b} eliminate={v} produce_vars={w} product_reduce={b}\n"
            "L={a,b} eliminate={z} produce_vars={y} product_reduce={a}\n"
            "L={a} eliminate={w} produce_vars={x} product_reduce={a}\n"
            "L={b} eliminate={y} produce_vars={x} product_reduce={b}\n"
            "L={} eliminate={x} produce_vars={} product_reduce={}\n");
  EXPECT_FALSE(dry_run(models::benchmark(2, 2, 2, std::nullopt, true)).tractable());
}

TEST(Engine, DryRunMatchesExecution) {
  std::mt19937_64 rng(42);
  for (int t = 0; t < 100; ++t) {
    const auto g = testing::random_tractable_graph(rng);
    const auto d = dry_run(g);
    const auto r = tensor_variable_elimination(g, Semiring::real());
    EXPECT_EQ(d.schedule.trace(), r.schedule.trace());
    EXPECT_EQ(d.schedule.op_count, r.schedule.op_count);
  }
}

TEST(Engine, BenchmarkCostIsLinearInPlateProduct) {
  std::vector<double> counts;
  for (std::size_t k : {2u, 4u, 8u, 16u, 32u}) counts.push_back(static_cast<double>(dry_run(models::benchmark(32, k, k)).schedule.op_count));
  for (std::size_t i = 2; i + 1 < counts.size(); ++i) {
    const double ratio = counts[i + 1] / counts[i];
    EXPECT_GE(ratio, 3.4);
    EXPECT_LE(ratio, 4.6);
  }
}

TEST(Engine, MatchesOracleOnRandomGraphs) {
  std::mt19937_64 rng(43);
  for (int t = 0; t < 100; ++t) {
    const auto g = testing::random_tractable_graph(rng);
    for (const auto& s : {Semiring::real(), Semiring::log(), Semiring::max_product(), Semiring::max_sum()}) {
      const auto gs = models::in_semiring(g, s);
      const double got = tensor_variable_elimination(gs, s).value.item();
      const double want = oracle::brute_plated_sum_product(gs, s);
      if (got == want) continue;
      if (s.log_space()) {
        EXPECT_LT(std::fabs(got - want), 1e-9 * std::max(1.0, std::fabs(want))) << s.name();
      } else {
        EXPECT_LT(rel_diff(got, want), 1e-9) << s.name();
      }
    }
  }
}

TEST(Engine, TapeReplaysBitExactly) {
  std::mt19937_64 rng(44);
  for (int t = 0; t < 50; ++t) {
    const auto g = testing::random_tractable_graph(rng);
    const auto r = tensor_variable_elimination(g, Semiring::real());
    EXPECT_EQ(r.tape.replay().values(), r.value.values());
    for (std::size_t i = 0; i < r.tape.nodes.size(); ++i) {
      for (auto in : r.tape.nodes[i].inputs) EXPECT_LT(in, i);
    }
  }
}

TEST(Engine, KeepLeavesOutputDims) {
  std::mt19937_64 rng(45);
  for (int t = 0; t < 50; ++t) {
    const auto g = testing::random_tractable_graph(rng);
    std::set<std::string> keep;
    for (const auto& [name, v] : g.variables()) {
      if (v.plates.empty() && keep.size() < 2) keep.insert(name);
    }
    if (!dry_run(g, keep).tractable()) continue;
    EngineOptions options;
    options.keep = keep;
    const auto got = tensor_variable_elimination(g, Semiring::real(), options).value;
    const auto want = oracle::brute_contract(g, Semiring::real(), keep);
    ASSERT_EQ(got.dims(), want.dims());
    for (std::size_t i = 0; i < got.numel(); ++i) EXPECT_LT(rel_diff(got.flat(i), want.flat(i)), 1e-9);
  }
}

TEST(Engine, LoopInvariantHolds) {
  std::mt19937_64 rng(46);
  const auto s = Semiring::real();
  for (int t = 0; t < 50; ++t) {
    const auto g = testing::random_tractable_graph(rng, {.max_oracle_work = 100'000});
    const double total = oracle::brute_plated_sum_product(g, s);
    EngineOptions options;
    options.debug_invariant = true;
    int passes = 0;
    std::size_t last_leaf = SIZE_MAX;
    options.on_iteration = [&](const PlatedFactorGraph& remaining, std::span<const NamedTensor> scalars) {
      ++passes;
      double value = oracle::brute_plated_sum_product(remaining, s);
      for (const auto& x : scalars) value *= x.item();
      EXPECT_LT(rel_diff(value, total), 1e-9);
      std::size_t widest = 0;
      for (const auto& [_, f] : remaining.factors()) widest = std::max(widest, f.plates.size());
      EXPECT_LE(widest, last_leaf);
      last_leaf = widest;
    };
    tensor_variable_elimination(g, s, options);
    EXPECT_GT(passes, 0);
  }
}

TEST(Engine, LeafSizesNeverGrow) {
  std::mt19937_64 rng(47);
  for (int t = 0; t < 200; ++t) {
    const auto d = dry_run(testing::random_structure(rng));
    for (std::size_t i = 1; i < d.schedule.steps.size(); ++i) {
      EXPECT_LE(d.schedule.steps[i].leaf.size(), d.schedule.steps[i - 1].leaf.size());
    }
  }
}

TEST(Engine, DeterministicAcrossThreadCounts) {
  const auto g = models::in_semiring(models::benchmark(8, 8, 8, 3), Semiring::log());
  const auto base = tensor_variable_elimination(g, Semiring::log());
  for (std::size_t threads : {2u, 8u}) {
    EngineOptions options;
    options.threads = threads;
    const auto r = tensor_variable_elimination(g, Semiring::log(), options);
    EXPECT_EQ(r.value.values(), base.value.values());
    EXPECT_EQ(r.schedule.op_count, base.schedule.op_count);
  }
}

}  // namespace
}  // namespace tvelim
