// Copyright 2026 The tvelim Authors
// SPDX-License-Identifier: Apache-2.0

#include "tvelim/model_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <random>
#include <regex>

#include "tvelim/error.hpp"

namespace tvelim {

namespace {

using nlohmann::json;

static_assert(std::endian::native == std::endian::little, ".ten I/O assumes a little-endian host");

template <class T>
json nest(const std::vector<std::size_t>& shape, const std::vector<T>& values, std::size_t axis, std::size_t& pos) {
  if (axis == shape.size()) return values[pos++];
  json arr = json::array();
  for (std::size_t i = 0; i < shape[axis]; ++i) arr.push_back(nest(shape, values, axis + 1, pos));
  return arr;
}

void flatten(const json& j, std::size_t depth, std::vector<std::size_t>& shape, std::vector<double>& out) {
  if (!j.is_array()) {
    if (!j.is_number()) throw Error(ErrorCode::Validation, "tensor entries must be numbers");
    if (depth != shape.size()) throw Error(ErrorCode::SizeMismatch, "ragged nested array");
    out.push_back(j.get<double>());
    return;
  }
  if (depth == shape.size()) shape.push_back(j.size());
  if (depth > shape.size() || shape[depth] != j.size()) throw Error(ErrorCode::SizeMismatch, "ragged nested array");
  for (const auto& e : j) flatten(e, depth + 1, shape, out);
}

std::vector<std::size_t> extents(const std::vector<Dim>& dims) {
  std::vector<std::size_t> shape;
  for (const auto& d : dims) shape.push_back(d.size);
  return shape;
}

std::vector<double> factor_data(const json& data, const std::vector<Dim>& dims, const std::filesystem::path& base,
                                const std::string& name) {
  const auto n = numel(dims);
  if (data.is_string()) {
    const auto text = data.get<std::string>();
    if (text == "uniform") {
      std::uint64_t states = 1;
      for (const auto& d : dims) {
        if (d.kind == DimKind::Variable) states *= d.size;
      }
      return std::vector<double>(n, 1.0 / static_cast<double>(states));
    }
    std::smatch m;
    static const std::regex random_re(R"(random\((\d+)\))");
    if (std::regex_match(text, m, random_re)) {
      std::mt19937_64 rng(std::stoull(m[1].str()));
      std::uniform_real_distribution<double> u(0.05, 1.0);
      std::vector<double> v(n);
      for (auto& x : v) x = u(rng);
      return v;
    }
    throw Error(ErrorCode::Validation, "factor '" + name + "': unknown data generator '" + text + "'");
  }
  DenseArray a;
  if (data.is_object() && data.contains("ten")) {
    a = read_ten(base / data.at("ten").get<std::string>());
  } else {
    a = from_nested(data);
  }
  if (a.shape != extents(dims)) {
    throw Error(ErrorCode::SizeMismatch, "factor '" + name + "': data shape does not match its canonical dims");
  }
  return a.values;
}

}  // namespace

json to_nested(const DenseArray& a) {
  std::size_t pos = 0;
  return nest(a.shape, a.values, 0, pos);
}

json to_nested(const NamedTensor& t) { return to_nested(DenseArray{extents(t.dims()), t.values()}); }

DenseArray from_nested(const json& j) {
  DenseArray a;
  flatten(j, 0, a.shape, a.values);
  return a;
}

ModelFile model_from_json(const json& j, const std::filesystem::path& base_dir, std::optional<Semiring> semiring) {
  try {
    ModelFile m;
    if (semiring) {
      m.semiring = *semiring;
    } else if (j.contains("semiring")) {
      m.semiring = Semiring::from_name(j.at("semiring").get<std::string>());
    }
    if (j.contains("plates")) {
      for (const auto& [name, size] : j.at("plates").items()) m.graph.add_plate(name, size.get<std::size_t>());
    }
    for (const auto& [name, v] : j.at("variables").items()) {
      PlateSet plates;
      if (v.contains("plates")) plates = v.at("plates").get<PlateSet>();
      m.graph.add_variable(name, v.at("domain").get<std::size_t>(), plates);
    }
    for (const auto& f : j.at("factors")) {
      const auto name = f.at("name").get<std::string>();
      PlateSet plates;
      if (f.contains("plates")) plates = f.at("plates").get<PlateSet>();
      m.graph.add_factor(name, f.at("variables").get<std::set<std::string>>(), plates);
    }
    m.graph.require_valid();
    for (const auto& f : j.at("factors")) {
      const auto name = f.at("name").get<std::string>();
      const auto dims = m.graph.factor_dims(m.graph.factor(name));
      auto values = factor_data(f.contains("data") ? f.at("data") : json("uniform"), dims, base_dir, name);
      for (auto& v : values) v = m.semiring.from_real(v);
      m.graph.set_table(name, NamedTensor::from_layout(dims, std::move(values)));
    }
    m.graph.require_valid();
    return m;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Validation, std::string("malformed model: ") + e.what());
  }
}

json model_to_json(const ModelFile& m) {
  json j;
  j["semiring"] = std::string(m.semiring.name());
  j["plates"] = json::object();
  for (const auto& [name, size] : m.graph.plates()) j["plates"][name] = size;
  j["variables"] = json::object();
  for (const auto& [name, v] : m.graph.variables()) {
    j["variables"][name] = {{"domain", v.domain}, {"plates", v.plates}};
  }
  j["factors"] = json::array();
  for (const auto& [name, f] : m.graph.factors()) {
    json entry = {{"name", name}, {"variables", f.variables}, {"plates", f.plates}};
    if (f.table) {
      auto values = f.table->values();
      for (auto& v : values) v = m.semiring.to_real(v);
      entry["data"] = to_nested(DenseArray{extents(f.table->dims()), std::move(values)});
    }
    j["factors"].push_back(std::move(entry));
  }
  return j;
}

ModelFile load_model(const std::filesystem::path& path, std::optional<Semiring> semiring) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Validation, "'" + path.string() + "': " + e.what());
  }
  return model_from_json(j, path.parent_path(), semiring);
}

void save_model(const ModelFile& m, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write '" + path.string() + "'");
  out << model_to_json(m).dump(2) << '\n';
}

DenseArray read_ten(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "'");
  std::uint32_t rank = 0;
  in.read(reinterpret_cast<char*>(&rank), sizeof rank);
  DenseArray a;
  std::size_t n = 1;
  for (std::uint32_t i = 0; i < rank && in; ++i) {
    std::uint64_t extent = 0;
    in.read(reinterpret_cast<char*>(&extent), sizeof extent);
    a.shape.push_back(extent);
    n *= extent;
  }
  a.values.resize(n);
  in.read(reinterpret_cast<char*>(a.values.data()), static_cast<std::streamsize>(n * sizeof(double)));
  if (!in) throw Error(ErrorCode::Io, "truncated tensor file '" + path.string() + "'");
  return a;
}

void write_ten(const DenseArray& a, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write '" + path.string() + "'");
  const auto rank = static_cast<std::uint32_t>(a.shape.size());
  out.write(reinterpret_cast<const char*>(&rank), sizeof rank);
  for (auto e : a.shape) {
    const auto extent = static_cast<std::uint64_t>(e);
    out.write(reinterpret_cast<const char*>(&extent), sizeof extent);
  }
  out.write(reinterpret_cast<const char*>(a.values.data()), static_cast<std::streamsize>(a.values.size() * sizeof(double)));
}

json to_json(const MarginalSet& m, const Semiring& s) {
  json j = json::object();
  for (const auto& [name, t] : m.marginals) {
    json dims = json::array();
    for (const auto& d : t.dims()) dims.push_back(d.name);
    auto values = t.values();
    for (auto& v : values) v = s.to_real(v);
    j[name] = {{"dims", dims}, {"values", to_nested(DenseArray{extents(t.dims()), std::move(values)})}};
  }
  return j;
}

json to_json(const Assignment& a) {
  json j = json::object();
  for (const auto& [name, t] : a.values) {
    json plates = json::array();
    for (const auto& d : t.plates) plates.push_back(d.name);
    std::size_t pos = 0;
    json nested = nest(extents(t.plates), t.values, 0, pos);
    j[name] = {{"plates", plates}, {"values", nested}};
  }
  return j;
}

}  // namespace tvelim
