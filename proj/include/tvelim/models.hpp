// Copyright 2026 The tvelim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>

#include "tvelim/graph.hpp"
#include "tvelim/semiring.hpp"

namespace tvelim::models {

// Reference models. Tables hold real-space values: all ones when `seed` is
// empty, otherwise uniform in [0.05, 1) drawn per factor in name order.

/// X - F, X - H - Y - G with plates J inside I: P(Y) = P(G) = {I},
/// P(H) = {I, J}.
PlatedFactorGraph nested(std::size_t I = 2, std::size_t J = 3, std::size_t domain = 2,
                         std::optional<std::uint64_t> seed = std::nullopt);

/// Restricted Boltzmann machine X - F - Y with P(X) = {I}, P(Y) = {J},
/// P(F) = {I, J}. Intractable.
PlatedFactorGraph rbm(std::size_t I = 2, std::size_t J = 2, std::size_t domain = 2,
                      std::optional<std::uint64_t> seed = std::nullopt);

/// Chain v - w - x - y - z with plates a (size I) and b (size J):
/// P(v) = P(z) = {a, b}, P(w) = {a}, P(x) = {}, P(y) = {b}. With
/// `extra_vz` a factor f_vz over {a, b} joins v and z, which makes it
/// intractable.
PlatedFactorGraph benchmark(std::size_t domain = 2, std::size_t I = 2, std::size_t J = 2,
                            std::optional<std::uint64_t> seed = std::nullopt, bool extra_vz = false);

/// Fills every factor's table with seeded uniform values in [lo, hi).
void randomize(PlatedFactorGraph& g, std::uint64_t seed, double lo = 0.05, double hi = 1.0);
void fill_ones(PlatedFactorGraph& g);

/// Copy with every table mapped from real space into s's carrier.
PlatedFactorGraph in_semiring(const PlatedFactorGraph& g, const Semiring& s);

}  // namespace tvelim::models
