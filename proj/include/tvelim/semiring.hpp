// Copyright 2026 The tvelim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <utility>

namespace tvelim {

enum class SemiringKind { RealSumProduct, LogSumExpProduct, MaxProduct, MaxSum };

namespace ops {

// Scalar operations per semiring instance. Kernels are instantiated once per
// struct so the inner loops never branch on the semiring kind.

struct Real {
  static constexpr double zero() { return 0.0; }
  static constexpr double one() { return 1.0; }
  static double plus(double a, double b) { return a + b; }
  static double times(double a, double b) { return a * b; }
  static bool better(double, double) { return false; }
};

struct LogSumExp {
  static constexpr double zero() { return -std::numeric_limits<double>::infinity(); }
  static constexpr double one() { return 0.0; }
  static double plus(double a, double b) {
    if (a < b) std::swap(a, b);
    if (b == zero()) return a;
    return a + std::log1p(std::exp(b - a));
  }
  static double times(double a, double b) { return a + b; }
  static bool better(double, double) { return false; }
};

struct MaxProduct {
  static constexpr double zero() { return 0.0; }
  static constexpr double one() { return 1.0; }
  static double plus(double a, double b) { return b > a ? b : a; }
  static double times(double a, double b) { return a * b; }
  // True when `challenger` should replace the incumbent in an argmax fold.
  static bool better(double challenger, double incumbent) { return challenger > incumbent; }
};

struct MaxSum {
  static constexpr double zero() { return -std::numeric_limits<double>::infinity(); }
  static constexpr double one() { return 0.0; }
  static double plus(double a, double b) { return b > a ? b : a; }
  static double times(double a, double b) { return a + b; }
  static bool better(double challenger, double incumbent) { return challenger > incumbent; }
};

}  // namespace ops

/// Value plus the index of the winning element of a plus-fold.
struct ArgFold {
  double value;
  std::size_t index;
};

/// A commutative semiring over float64 carriers. Instances are stateless
/// values; copy them freely.
class Semiring {
 public:
  static Semiring real() { return Semiring(SemiringKind::RealSumProduct); }
  static Semiring log() { return Semiring(SemiringKind::LogSumExpProduct); }
  static Semiring max_product() { return Semiring(SemiringKind::MaxProduct); }
  static Semiring max_sum() { return Semiring(SemiringKind::MaxSum); }

  /// Accepts the CLI names `real`, `log`, `maxprod`, `maxsum`.
  static Semiring from_name(std::string_view name);

  explicit Semiring(SemiringKind kind) : kind_(kind) {}

  SemiringKind kind() const { return kind_; }
  std::string_view name() const;

  double zero() const;
  double one() const;
  double plus(double a, double b) const;
  double times(double a, double b) const;

  bool has_divide() const;
  /// Inverse of times. Division by zero yields zero() and bumps the
  /// process-wide counter returned by division_by_zero_count().
  double divide(double a, double b) const;

  bool has_argmax() const;

  /// True for the instances whose carrier is a log value.
  bool log_space() const;
  /// Maps a nonnegative real potential into the carrier and back.
  double from_real(double p) const;
  double to_real(double c) const;

  /// Calls f with the ops:: struct matching this instance.
  template <class F>
  decltype(auto) visit(F&& f) const {
    switch (kind_) {
      case SemiringKind::RealSumProduct: return f(ops::Real{});
      case SemiringKind::LogSumExpProduct: return f(ops::LogSumExp{});
      case SemiringKind::MaxProduct: return f(ops::MaxProduct{});
      case SemiringKind::MaxSum: return f(ops::MaxSum{});
    }
    return f(ops::Real{});
  }

  friend bool operator==(const Semiring&, const Semiring&) = default;

 private:
  SemiringKind kind_;
};

std::uint64_t division_by_zero_count();

/// Pairwise-tree plus-fold, in place over `buffer`. Level k combines
/// neighbours (2i, 2i+1) of level k-1; an odd tail is carried up unchanged.
/// The tree depends only on the length, never on the caller's threading.
template <class Ops>
double pairwise_plus(std::span<double> buffer) {
  std::size_t n = buffer.size();
  if (n == 0) return Ops::zero();
  while (n > 1) {
    const std::size_t half = n / 2;
    for (std::size_t i = 0; i < half; ++i) buffer[i] = Ops::plus(buffer[2 * i], buffer[2 * i + 1]);
    if (n % 2 == 1) buffer[half] = buffer[n - 1];
    n = half + n % 2;
  }
  return buffer[0];
}

template <class Ops>
double pairwise_times(std::span<double> buffer) {
  std::size_t n = buffer.size();
  if (n == 0) return Ops::one();
  while (n > 1) {
    const std::size_t half = n / 2;
    for (std::size_t i = 0; i < half; ++i) buffer[i] = Ops::times(buffer[2 * i], buffer[2 * i + 1]);
    if (n % 2 == 1) buffer[half] = buffer[n - 1];
    n = half + n % 2;
  }
  return buffer[0];
}

/// Same tree as pairwise_plus; the left operand always holds lower indices,
/// so strict `better` keeps the lowest index on ties.
template <class Ops>
ArgFold pairwise_argplus(std::span<double> buffer, std::span<std::size_t> index) {
  std::size_t n = buffer.size();
  if (n == 0) return {Ops::zero(), 0};
  for (std::size_t i = 0; i < n; ++i) index[i] = i;
  while (n > 1) {
    const std::size_t half = n / 2;
    for (std::size_t i = 0; i < half; ++i) {
      const bool right = Ops::better(buffer[2 * i + 1], buffer[2 * i]);
      buffer[i] = right ? buffer[2 * i + 1] : buffer[2 * i];
      index[i] = right ? index[2 * i + 1] : index[2 * i];
    }
    if (n % 2 == 1) {
      buffer[half] = buffer[n - 1];
      index[half] = index[n - 1];
    }
    n = half + n % 2;
  }
  return {buffer[0], index[0]};
}

/// Plus-fold of an arbitrary sequence; empty folds to zero.
double fold_plus(std::span<const double> values, const Semiring& s);
/// Plus-fold with the winning index; only for semirings with argmax.
ArgFold fold_argplus(std::span<const double> values, const Semiring& s);
double fold_times(std::span<const double> values, const Semiring& s);

/// Plus-fold of k copies of one(): the contribution of summing out a
/// variable that no factor touches.
double sum_of_ones(std::size_t k, const Semiring& s);

}  // namespace tvelim
