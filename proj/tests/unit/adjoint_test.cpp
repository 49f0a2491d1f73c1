// Copyright 2026 The tvelim Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "random_models.hpp"
#include "tvelim/adjoint.hpp"
#include "tvelim/error.hpp"
#include "tvelim/models.hpp"
#include "tvelim/oracle.hpp"
#include "tvelim/rng.hpp"

namespace tvelim {
namespace {

using testing::rel_diff;

PlatedFactorGraph single(std::vector<double> values) {
  PlatedFactorGraph g;
  const auto n = values.size();
  g.add_variable("x", n);
  g.add_factor("f", {"x"}, {}, NamedTensor::from_layout({var_dim("x", n)}, std::move(values)));
  return g;
}

PlatedFactorGraph chain(std::size_t n, const std::vector<double>& unary, const std::vector<double>& pair) {
  PlatedFactorGraph g;
  for (std::size_t i = 0; i < n; ++i) g.add_variable("x" + std::to_string(i), 2);
  g.add_factor("u", {"x0"}, {}, NamedTensor::from_layout({var_dim("x0", 2)}, unary));
  for (std::size_t i = 1; i < n; ++i) {
    const auto a = "x" + std::to_string(i - 1), b = "x" + std::to_string(i);
    g.add_factor("p" + std::to_string(i), {a, b}, {}, NamedTensor::from_layout({var_dim(a, 2), var_dim(b, 2)}, pair));
  }
  return g;
}

void expect_marginals_near(const MarginalSet& a, const MarginalSet& b, double tol) {
  ASSERT_EQ(a.marginals.size(), b.marginals.size());
  for (const auto& [name, t] : a.marginals) {
    const auto& u = b.marginals.at(name);
    ASSERT_EQ(t.dims(), u.dims()) << name;
    for (std::size_t i = 0; i < t.numel(); ++i) EXPECT_NEAR(t.flat(i), u.flat(i), tol) << name;
  }
}

TEST(Marginals, SingleFactor) {
  const auto r = marginals(single({2, 6}), Semiring::real());
  EXPECT_EQ(r.partition, 8.0);
  EXPECT_EQ(r.marginals.marginals.at("x").values(), (std::vector<double>{0.25, 0.75}));
}

TEST(Marginals, UnnormalizedMode) {
  const auto r = marginals(single({2, 6}), Semiring::real(), false);
  EXPECT_FALSE(r.marginals.normalized);
  EXPECT_EQ(r.marginals.marginals.at("x").values(), (std::vector<double>{2, 6}));
}

TEST(Marginals, ChainMatchesEnumeration) {
  const auto g = chain(3, {0.3, 0.7}, {0.9, 0.1, 0.2, 0.8});
  expect_marginals_near(marginals(g, Semiring::real()).marginals, oracle::brute_marginals(g, Semiring::real()), 1e-9);
}

TEST(Marginals, NestedHasPlatedDims) {
  const auto g = models::nested(2, 3, 2, 5);
  const auto r = marginals(g, Semiring::real());
  const auto& y = r.marginals.marginals.at("Y");
  ASSERT_EQ(y.rank(), 2u);
  EXPECT_EQ(y.dims()[0], plate_dim("I", 2));
  EXPECT_EQ(y.dims()[1], var_dim("Y", 2));
  expect_marginals_near(r.marginals, oracle::brute_marginals(g, Semiring::real()), 1e-9);
}

TEST(Marginals, RequiresDivision) {
  try {
    marginals(single({1, 2}), Semiring::max_product());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DivisionUnsupported);
  }
  EXPECT_THROW(marginals(models::rbm(2, 2, 2, 1), Semiring::real()), IntractableError);
}

TEST(Marginals, PartitionIsBitIdenticalToForward) {
  std::mt19937_64 rng(51);
  for (int t = 0; t < 50; ++t) {
    const auto g = testing::random_tractable_graph(rng);
    const auto lg = models::in_semiring(g, Semiring::log());
    EXPECT_EQ(marginals(lg, Semiring::log()).partition, tensor_variable_elimination(lg, Semiring::log()).value.item());
  }
}

TEST(Marginals, RandomGraphsBothSemirings) {
  std::mt19937_64 rng(52);
  for (int t = 0; t < 100; ++t) {
    const auto g = testing::random_tractable_graph(rng, {.zero_prob = 0.0});
    const auto want = oracle::brute_marginals(g, Semiring::real());
    const auto got = marginals(g, Semiring::real());
    expect_marginals_near(got.marginals, want, 1e-9);
    for (const auto& [_, m] : got.marginals.marginals) {
      for (auto v : m.values()) EXPECT_GT(v, 0.0);
    }
    const auto lg = marginals(models::in_semiring(g, Semiring::log()), Semiring::log());
    for (const auto& [name, m] : lg.marginals.marginals) {
      const auto& w = want.marginals.at(name);
      for (std::size_t i = 0; i < m.numel(); ++i) EXPECT_NEAR(std::exp(m.flat(i)), w.flat(i), 1e-9);
    }
  }
}

TEST(Marginals, NormalizedSlicesSumToOne) {
  std::mt19937_64 rng(53);
  for (int t = 0; t < 50; ++t) {
    const auto g = testing::random_tractable_graph(rng, {.zero_prob = 0.0});
    for (const auto& [name, m] : marginals(g, Semiring::real()).marginals.marginals) {
      const auto total = reduce_plus(m, {name}, Semiring::real());
      for (auto v : total.values()) EXPECT_NEAR(v, 1.0, 1e-9);
    }
  }
}

TEST(Map, SingleFactor) {
  const auto a = map_assignment(single({0.2, 0.8}));
  EXPECT_EQ(a.values.at("x").values, (std::vector<std::size_t>{1}));
  EXPECT_EQ(a.score, 0.8);
}

TEST(Map, AgreementChain) {
  const auto g = chain(4, {0.4, 0.6}, {1, 0, 0, 1});
  const auto a = map_assignment(g);
  for (const auto& [_, t] : a.values) EXPECT_EQ(t.values, (std::vector<std::size_t>{1}));
  EXPECT_EQ(a.score, oracle::brute_map(g).score);
}

TEST(Map, TiesGoToLowestIndex) {
  const auto a = map_assignment(single({0.5, 0.5, 0.5}));
  EXPECT_EQ(a.values.at("x").values, (std::vector<std::size_t>{0}));
}

TEST(Map, BenchmarkMatchesOracle) {
  const auto g = models::benchmark(2, 2, 2, 77);
  const auto a = map_assignment(g);
  const auto b = oracle::brute_map(g);
  EXPECT_EQ(a.score, b.score);
  EXPECT_EQ(evaluate_assignment(g, a, Semiring::max_product()), a.score);
}

TEST(Map, MaxSumMatchesOracle) {
  std::mt19937_64 rng(54);
  for (int t = 0; t < 100; ++t) {
    const auto g = models::in_semiring(testing::random_tractable_graph(rng), Semiring::max_sum());
    EXPECT_EQ(map_assignment(g, Semiring::max_sum()).score, oracle::brute_map(g, Semiring::max_sum()).score);
  }
}

TEST(Map, NeedsMaxSemiring) { EXPECT_THROW(map_assignment(single({1, 2}), Semiring::real()), Error); }

TEST(Sample, Degenerate) {
  for (const auto& a : sample(single({1, 0}), Semiring::real(), 3, 1000)) {
    EXPECT_EQ(a.values.at("x").values, (std::vector<std::size_t>{0}));
  }
}

TEST(Sample, BernoulliFrequency) {
  const std::size_t n = 100000;
  const auto draws = sample(single({1, 3}), Semiring::real(), 9, n, {}, {.with_scores = false});
  double ones = 0;
  for (const auto& a : draws) ones += static_cast<double>(a.values.at("x").values[0]);
  const double se = std::sqrt(0.75 * 0.25 / static_cast<double>(n));
  EXPECT_LT(std::fabs(ones / static_cast<double>(n) - 0.75), 3 * se);
}

double tv_distance(const PlatedFactorGraph& g, const Semiring& s, std::uint64_t seed, std::size_t n) {
  auto joint = oracle::brute_joint(g, s);
  double total = 0;
  for (auto& v : joint.values) {
    v = s.to_real(v);
    total += v;
  }
  std::vector<double> counts(joint.values.size(), 0.0);
  for (const auto& a : sample(g, s, seed, n, {}, {.with_scores = false})) counts[joint.index_of(a)] += 1;
  double tv = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    tv += std::fabs(counts[i] / static_cast<double>(n) - joint.values[i] / total);
  }
  return tv / 2;
}

TEST(Sample, CoupledPairTotalVariation) {
  PlatedFactorGraph g;
  g.add_variable("a", 2);
  g.add_variable("b", 3);
  g.add_factor("f", {"a", "b"}, {}, NamedTensor::from_layout({var_dim("a", 2), var_dim("b", 3)}, {5, 1, 2, 1, 4, 3}));
  EXPECT_LT(tv_distance(g, Semiring::real(), 17, 100000), 0.02);
  EXPECT_LT(tv_distance(models::in_semiring(g, Semiring::log()), Semiring::log(), 17, 100000), 0.02);
}

TEST(Sample, PlatedModelTotalVariation) {
  EXPECT_LT(tv_distance(models::nested(2, 2, 2, 13), Semiring::real(), 5, 100000), 0.02);
}

TEST(Sample, DeterministicAndScheduleIndependent) {
  const auto g = models::benchmark(2, 2, 2, 4);
  const auto a = sample(g, Semiring::real(), 99, 50);
  EngineOptions options;
  options.threads = 4;
  const auto b = sample(g, Semiring::real(), 99, 50, options);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (const auto& [name, t] : a[i].values) EXPECT_EQ(t.values, b[i].values.at(name).values);
    EXPECT_GT(a[i].score, 0.0);
  }
  const auto prefix = sample(g, Semiring::real(), 99, 10);
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    for (const auto& [name, t] : prefix[i].values) EXPECT_EQ(t.values, a[i].values.at(name).values);
  }
}

TEST(Sample, MapDominatesSamples) {
  const auto g = models::benchmark(2, 2, 2, 8);
  const double best = map_assignment(g).score;
  for (const auto& a : sample(g, Semiring::real(), 1, 200)) {
    EXPECT_LE(evaluate_assignment(g, a, Semiring::max_product()), best);
  }
}

TEST(Sample, Errors) {
  EXPECT_THROW(sample(single({1, 2}), Semiring::max_product(), 1, 2), Error);
  try {
    sample(single({0, 0}), Semiring::real(), 1, 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ZeroPartition);
  }
}

TEST(Rng, SplitStreamsDiffer) {
  CounterRng r(1);
  auto a = r.split(0), b = r.split(1);
  EXPECT_NE(a.next(), b.next());
  CounterRng again(1);
  EXPECT_EQ(again.split(0).next(), CounterRng(1).split(0).next());
  for (int i = 0; i < 1000; ++i) {
    const double u = r.uniform();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
}

}  // namespace
}  // namespace tvelim
