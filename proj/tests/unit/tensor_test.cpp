// Copyright 2026 The tvelim Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "random_models.hpp"
#include "tvelim/error.hpp"
#include "tvelim/parallel.hpp"
#include "tvelim/tensor.hpp"

namespace tvelim {
namespace {

using testing::rel_diff;

NamedTensor vec(const std::string& name, std::vector<double> v, DimKind kind = DimKind::Variable) {
  const auto n = v.size();
  return NamedTensor::from_layout({Dim{name, kind, n}}, std::move(v));
}

NamedTensor random_tensor(std::mt19937_64& rng, std::vector<Dim> dims) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> v(numel(dims));
  for (auto& x : v) x = u(rng);
  return NamedTensor::from_layout(std::move(dims), std::move(v));
}

TEST(Tensor, CanonicalOrderPlatesFirst) {
  const auto t = NamedTensor::from_layout({var_dim("a", 2), plate_dim("z", 3)}, {0, 1, 2, 3, 4, 5});
  ASSERT_EQ(t.rank(), 2u);
  EXPECT_EQ(t.dims()[0].name, "z");
  EXPECT_EQ(t.dims()[1].name, "a");
  // Layout value at (a=1, z=2) is 5.
  const std::vector<std::size_t> idx = {2, 1};
  EXPECT_EQ(t.at(idx), 5.0);
}

TEST(Tensor, FromLayoutRejectsBadInput) {
  EXPECT_THROW(NamedTensor::from_layout({var_dim("x", 2)}, {1, 2, 3}), Error);
  EXPECT_THROW(NamedTensor::from_layout({var_dim("x", 2), var_dim("x", 2)}, {1, 2, 3, 4}), Error);
}

TEST(Tensor, AlignBroadcastsDisjointDims) {
  const std::vector<NamedTensor> in = {vec("x", {1, 2}), vec("y", {5, 6, 7})};
  const auto out = align(in);
  ASSERT_EQ(out.size(), 2u);
  for (const auto& t : out) {
    ASSERT_EQ(t.rank(), 2u);
    EXPECT_EQ(t.dims()[0].name, "x");
    EXPECT_EQ(t.dims()[1].name, "y");
  }
  for (std::size_t j = 0; j < 3; ++j) {
    const std::vector<std::size_t> idx = {0, j};
    EXPECT_EQ(out[0].at(idx), 1.0);
  }
}

TEST(Tensor, AlignSameDimsUnchanged) {
  const std::vector<NamedTensor> in = {vec("x", {1, 2}), vec("x", {3, 4})};
  const auto out = align(in);
  EXPECT_EQ(out[0].values(), (std::vector<double>{1, 2}));
  EXPECT_EQ(out[1].values(), (std::vector<double>{3, 4}));
}

TEST(Tensor, AlignPlatedEinsumOperands) {
  std::mt19937_64 rng(1);
  const std::vector<NamedTensor> in = {random_tensor(rng, {var_dim("x", 2), var_dim("y", 2)}),
                                       random_tensor(rng, {plate_dim("i", 3), var_dim("y", 2), var_dim("z", 2)})};
  const auto out = align(in);
  for (const auto& t : out) {
    std::vector<std::string> names;
    for (const auto& d : t.dims()) names.push_back(d.name);
    EXPECT_EQ(names, (std::vector<std::string>{"i", "x", "y", "z"}));
  }
}

TEST(Tensor, AlignIsIdempotent) {
  std::mt19937_64 rng(2);
  const std::vector<NamedTensor> in = {random_tensor(rng, {var_dim("x", 2)}),
                                       random_tensor(rng, {plate_dim("b", 2), var_dim("y", 3)})};
  const auto once = align(in);
  const auto twice = align(once);
  for (std::size_t i = 0; i < in.size(); ++i) EXPECT_EQ(once[i].values(), twice[i].values());
}

TEST(Tensor, AlignErrors) {
  const std::vector<NamedTensor> sizes = {vec("x", {1, 2}), vec("x", {1, 2, 3})};
  try {
    align(sizes);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SizeMismatch);
  }
  const std::vector<NamedTensor> kinds = {vec("x", {1, 2}), vec("x", {1, 2}, DimKind::Plate)};
  try {
    align(kinds);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::KindMismatch);
  }
}

TEST(Tensor, PointwiseTimesOuter) {
  const auto r = pointwise_times(vec("x", {2, 3}), vec("y", {10, 100}), Semiring::real());
  EXPECT_EQ(r.values(), (std::vector<double>{20, 200, 30, 300}));
}

TEST(Tensor, PointwiseTimesIdentityAndMaxProduct) {
  const auto a = vec("x", {2, 3});
  EXPECT_EQ(pointwise_times(a, NamedTensor::scalar(1.0), Semiring::real()).values(), a.values());
  const auto r = pointwise_times(vec("x", {0.2, 0.5}), vec("x", {0.5, 0.5}), Semiring::max_product());
  EXPECT_EQ(r.values(), (std::vector<double>{0.1, 0.25}));
}

TEST(Tensor, ReducePlus) {
  const auto t = NamedTensor::from_layout({var_dim("x", 2), var_dim("y", 2)}, {1, 2, 3, 4});
  EXPECT_EQ(reduce_plus(t, {"x"}, Semiring::real()).values(), (std::vector<double>{4, 6}));
  EXPECT_EQ(reduce_plus(t, {}, Semiring::real()).values(), t.values());
  EXPECT_EQ(reduce_plus(t, {"x"}, Semiring::max_product()).values(), (std::vector<double>{3, 4}));
}

TEST(Tensor, ReducePlusErrors) {
  const auto t = NamedTensor::from_layout({plate_dim("b", 2), var_dim("x", 2)}, {1, 2, 3, 4});
  try {
    reduce_plus(t, {"b"}, Semiring::real());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::PlusOnPlateDim);
  }
  try {
    reduce_plus(t, {"q"}, Semiring::real());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownDim);
  }
}

TEST(Tensor, ReduceProduct) {
  const auto t = vec("b", {2, 3, 4}, DimKind::Plate);
  EXPECT_EQ(reduce_product(t, {"b"}, Semiring::real()).item(), 24.0);
  EXPECT_EQ(reduce_product(t, {}, Semiring::real()).values(), t.values());
  const auto l = vec("b", {0.1, 0.2, 0.3}, DimKind::Plate);
  EXPECT_LT(rel_diff(reduce_product(l, {"b"}, Semiring::log()).item(), 0.6), 1e-15);
  try {
    reduce_product(vec("x", {1, 2}), {"x"}, Semiring::real());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ProductOnVariableDim);
  }
}

TEST(Tensor, ReducePlusCommutes) {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 50; ++t) {
    const auto x = random_tensor(rng, {var_dim("x", 7), var_dim("y", 5), var_dim("z", 4)});
    const auto a = reduce_plus(reduce_plus(x, {"x"}, Semiring::real()), {"z"}, Semiring::real());
    const auto b = reduce_plus(reduce_plus(x, {"z"}, Semiring::real()), {"x"}, Semiring::real());
    for (std::size_t i = 0; i < a.numel(); ++i) EXPECT_LT(rel_diff(a.flat(i), b.flat(i)), 1e-12);
  }
}

TEST(Tensor, PointwiseTimesCommutativeAssociative) {
  std::mt19937_64 rng(6);
  for (int t = 0; t < 50; ++t) {
    const auto a = random_tensor(rng, {var_dim("x", 3)});
    const auto b = random_tensor(rng, {plate_dim("i", 2), var_dim("y", 2)});
    const auto c = random_tensor(rng, {var_dim("x", 3), var_dim("y", 2)});
    const auto s = Semiring::real();
    const auto ab = pointwise_times(a, b, s);
    const auto ba = pointwise_times(b, a, s);
    EXPECT_EQ(ab.values(), ba.values());
    const auto l = pointwise_times(ab, c, s);
    const auto r = pointwise_times(a, pointwise_times(b, c, s), s);
    for (std::size_t i = 0; i < l.numel(); ++i) EXPECT_LT(rel_diff(l.flat(i), r.flat(i)), 1e-12);
  }
}

TEST(Tensor, ContractMatchesExplicitProductThenReduce) {
  std::mt19937_64 rng(8);
  const auto s = Semiring::real();
  for (int t = 0; t < 30; ++t) {
    const std::vector<NamedTensor> in = {random_tensor(rng, {var_dim("x", 3), var_dim("y", 4)}),
                                         random_tensor(rng, {plate_dim("b", 2), var_dim("y", 4)}),
                                         random_tensor(rng, {var_dim("z", 2)})};
    const auto fused = contract(in, {"y", "z"}, s);
    const auto full = pointwise_times(pointwise_times(in[0], in[1], s), in[2], s);
    const auto ref = reduce_plus(full, {"y", "z"}, s);
    ASSERT_EQ(fused.dims(), ref.dims());
    for (std::size_t i = 0; i < ref.numel(); ++i) EXPECT_LT(rel_diff(fused.flat(i), ref.flat(i)), 1e-12);
  }
}

TEST(Tensor, ContractArgmax) {
  const auto t = NamedTensor::from_layout({var_dim("x", 3), var_dim("y", 2)}, {1, 9, 7, 9, 7, 2});
  const std::vector<NamedTensor> in = {t};
  const auto r = contract_argmax(in, {"x"}, Semiring::max_product());
  EXPECT_EQ(r.value.values(), (std::vector<double>{7, 9}));
  EXPECT_EQ(r.argmax.values(), (std::vector<double>{1, 0}));
}

TEST(Tensor, ExclusiveProduct) {
  const auto t = vec("b", {2, 3, 0, 5}, DimKind::Plate);
  const auto r = exclusive_product(t, {"b"}, Semiring::real());
  EXPECT_EQ(r.values(), (std::vector<double>{0, 0, 30, 0}));
}

TEST(Tensor, SliceAndRename) {
  const auto t = NamedTensor::from_layout({plate_dim("b", 2), var_dim("x", 2)}, {1, 2, 3, 4});
  const auto s = t.slice("b", 1);
  EXPECT_EQ(s.values(), (std::vector<double>{3, 4}));
  EXPECT_EQ(s.renamed({{"x", "y"}}).dims()[0].name, "y");
}

TEST(Tensor, DeterministicAcrossThreadCounts) {
  std::mt19937_64 rng(10);
  const std::vector<NamedTensor> in = {random_tensor(rng, {plate_dim("a", 16), var_dim("x", 8), var_dim("y", 8)}),
                                       random_tensor(rng, {plate_dim("a", 16), var_dim("y", 8), var_dim("z", 8)})};
  const auto serial = contract(in, {"y"}, Semiring::log());
  for (std::size_t w : {2u, 3u, 8u}) {
    ThreadPool pool(w);
    EXPECT_EQ(contract(in, {"y"}, Semiring::log(), &pool).values(), serial.values());
  }
}

TEST(Parallel, CoversRangeExactlyOnce) {
  ThreadPool pool(4);
  std::vector<int> hits(10007, 0);
  pool.parallel_for(hits.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) ++hits[i];
  }, 16);
  for (int h : hits) EXPECT_EQ(h, 1);
}

TEST(Parallel, RepeatedJobs) {
  ThreadPool pool(3);
  for (int round = 0; round < 100; ++round) {
    std::vector<int> hits(257, 0);
    parallel_for(&pool, hits.size(), [&](std::size_t b, std::size_t e) {
      for (std::size_t i = b; i < e; ++i) hits[i] += round;
    }, 1);
    for (int h : hits) ASSERT_EQ(h, round);
  }
}

}  // namespace
}  // namespace tvelim
