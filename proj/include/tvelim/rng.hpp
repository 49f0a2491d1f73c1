// Copyright 2026 The tvelim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

namespace tvelim {

/// Counter-based generator: draw n of a stream with key k is
/// splitmix64(k + (n + 1) * 0x9E3779B97F4A7C15). split(i) derives an
/// independent stream with key splitmix64(k ^ splitmix64(i)). The stream is
/// stable across releases; sampling results depend on it.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : key_(mix(seed)) {}

  static constexpr std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t next() { return mix(key_ + (++counter_) * 0x9E3779B97F4A7C15ULL); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  CounterRng split(std::uint64_t index) const {
    CounterRng r(0);
    r.key_ = mix(key_ ^ mix(index));
    return r;
  }

  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace tvelim
