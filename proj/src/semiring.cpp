// Copyright 2026 The tvelim Authors
// SPDX-License-Identifier: Apache-2.0

#include "tvelim/semiring.hpp"

#include <atomic>
#include <vector>

#include "tvelim/error.hpp"

namespace tvelim {

namespace {
std::atomic<std::uint64_t> g_division_by_zero{0};
}

std::uint64_t division_by_zero_count() { return g_division_by_zero.load(); }

Semiring Semiring::from_name(std::string_view name) {
  if (name == "real") return real();
  if (name == "log") return log();
  if (name == "maxprod") return max_product();
  if (name == "maxsum") return max_sum();
  throw Error(ErrorCode::Validation, "unknown semiring '" + std::string(name) + "'");
}

std::string_view Semiring::name() const {
  switch (kind_) {
    case SemiringKind::RealSumProduct: return "real";
    case SemiringKind::LogSumExpProduct: return "log";
    case SemiringKind::MaxProduct: return "maxprod";
    case SemiringKind::MaxSum: return "maxsum";
  }
  return "real";
}

double Semiring::zero() const {
  return visit([](auto o) { return decltype(o)::zero(); });
}
double Semiring::one() const {
  return visit([](auto o) { return decltype(o)::one(); });
}
double Semiring::plus(double a, double b) const {
  return visit([&](auto o) { return decltype(o)::plus(a, b); });
}
double Semiring::times(double a, double b) const {
  return visit([&](auto o) { return decltype(o)::times(a, b); });
}

bool Semiring::has_divide() const {
  return kind_ == SemiringKind::RealSumProduct || kind_ == SemiringKind::LogSumExpProduct;
}

double Semiring::divide(double a, double b) const {
  switch (kind_) {
    case SemiringKind::RealSumProduct:
      if (b == 0.0) {
        ++g_division_by_zero;
        return 0.0;
      }
      return a / b;
    case SemiringKind::LogSumExpProduct:
      if (b == ops::LogSumExp::zero()) {
        ++g_division_by_zero;
        return ops::LogSumExp::zero();
      }
      return a - b;
    default:
      throw Error(ErrorCode::DivisionUnsupported,
                  "semiring '" + std::string(name()) + "' has no division");
  }
}

bool Semiring::has_argmax() const {
  return kind_ == SemiringKind::MaxProduct || kind_ == SemiringKind::MaxSum;
}

bool Semiring::log_space() const {
  return kind_ == SemiringKind::LogSumExpProduct || kind_ == SemiringKind::MaxSum;
}

double Semiring::from_real(double p) const { return log_space() ? std::log(p) : p; }
double Semiring::to_real(double c) const { return log_space() ? std::exp(c) : c; }

double fold_plus(std::span<const double> values, const Semiring& s) {
  std::vector<double> buffer(values.begin(), values.end());
  return s.visit([&](auto o) { return pairwise_plus<decltype(o)>(buffer); });
}

ArgFold fold_argplus(std::span<const double> values, const Semiring& s) {
  if (!s.has_argmax()) {
    throw Error(ErrorCode::Validation,
                "semiring '" + std::string(s.name()) + "' has no argmax");
  }
  std::vector<double> buffer(values.begin(), values.end());
  std::vector<std::size_t> index(values.size());
  return s.visit([&](auto o) { return pairwise_argplus<decltype(o)>(buffer, index); });
}

double fold_times(std::span<const double> values, const Semiring& s) {
  std::vector<double> buffer(values.begin(), values.end());
  return s.visit([&](auto o) { return pairwise_times<decltype(o)>(buffer); });
}

double sum_of_ones(std::size_t k, const Semiring& s) {
  if (s.kind() == SemiringKind::RealSumProduct) return static_cast<double>(k);
  std::vector<double> ones(k, s.one());
  return fold_plus(ones, s);
}

}  // namespace tvelim
