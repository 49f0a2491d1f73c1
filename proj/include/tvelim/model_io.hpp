// Copyright 2026 The tvelim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <optional>

#include <json.hpp>

#include "tvelim/einsum.hpp"
#include "tvelim/graph.hpp"
#include "tvelim/query.hpp"
#include "tvelim/semiring.hpp"

namespace tvelim {

/// A model file: a plated factor graph plus the semiring it is meant for.
///
///   {"plates": {"a": 2},
///    "variables": {"x": {"domain": 2, "plates": ["a"]}},
///    "factors": [{"name": "f", "variables": ["x"], "plates": ["a"],
///                 "data": [[0.2, 0.8], [0.5, 0.5]]}],
///    "semiring": "log"}
///
/// `data` is real-space: nested arrays over the factor's canonical dims
/// (plates by name, then variables by name), "uniform", "random(SEED)", or
/// {"ten": "relative/path.ten"}. Values are mapped into the semiring's
/// carrier on load.
struct ModelFile {
  PlatedFactorGraph graph;
  Semiring semiring = Semiring::real();
};

/// `semiring`, when given, replaces the file's own choice.
ModelFile model_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {},
                          std::optional<Semiring> semiring = std::nullopt);
/// Writes every table as explicit nested real-space arrays.
nlohmann::json model_to_json(const ModelFile& m);

ModelFile load_model(const std::filesystem::path& path, std::optional<Semiring> semiring = std::nullopt);
void save_model(const ModelFile& m, const std::filesystem::path& path);

/// `.ten` payload: uint32 rank, uint64 extent per axis, then float64
/// row-major values, all little-endian.
DenseArray read_ten(const std::filesystem::path& path);
void write_ten(const DenseArray& a, const std::filesystem::path& path);

/// Nested arrays of a tensor's values in canonical dim order.
nlohmann::json to_nested(const NamedTensor& t);
nlohmann::json to_nested(const DenseArray& a);
DenseArray from_nested(const nlohmann::json& j);

/// {"x": {"dims": ["a", "x"], "values": nested}, ...}
nlohmann::json to_json(const MarginalSet& m, const Semiring& s);
/// {"x": {"plates": ["a"], "values": nested indices}, ...}
nlohmann::json to_json(const Assignment& a);

}  // namespace tvelim
