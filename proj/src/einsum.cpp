// Copyright 2026 The tvelim Authors
// SPDX-License-Identifier: Apache-2.0

#include "tvelim/einsum.hpp"

#include <cctype>
#include <cstdio>
#include <map>

#include "tvelim/engine.hpp"
#include "tvelim/error.hpp"

namespace tvelim {

namespace {

std::string factor_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "f%03zu", i);
  return buf;
}

bool is_symbol(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }

}  // namespace

std::string EinsumSpec::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (i) out += ',';
    out += inputs[i];
  }
  return out + "->" + output;
}

std::string EinsumSpec::plates_string() const { return {plates.begin(), plates.end()}; }

EinsumSpec parse_einsum(std::string_view spec, std::string_view plates) {
  EinsumSpec out;
  for (std::size_t i = 0; i < plates.size(); ++i) {
    if (!is_symbol(plates[i])) throw SyntaxError(i, "invalid plate symbol");
    out.plates.insert(plates[i]);
  }

  const auto arrow = spec.find("->");
  if (arrow == std::string_view::npos) throw SyntaxError(spec.size(), "expected '->'");
  std::string current;
  for (std::size_t i = 0; i < arrow; ++i) {
    const char c = spec[i];
    if (c == ',') {
      out.inputs.push_back(std::move(current));
      current.clear();
    } else if (is_symbol(c)) {
      if (current.find(c) != std::string::npos) {
        throw Error(ErrorCode::DuplicateSymbolInOperand,
                    std::string("symbol '") + c + "' repeated in operand " + std::to_string(out.inputs.size()));
      }
      current += c;
    } else {
      throw SyntaxError(i, std::string("unexpected character '") + c + "'");
    }
  }
  out.inputs.push_back(std::move(current));

  std::set<char> seen;
  for (const auto& in : out.inputs) seen.insert(in.begin(), in.end());
  for (std::size_t i = arrow + 2; i < spec.size(); ++i) {
    const char c = spec[i];
    if (!is_symbol(c)) throw SyntaxError(i, std::string("unexpected character '") + c + "'");
    if (out.output.find(c) != std::string::npos) {
      throw Error(ErrorCode::DuplicateSymbolInOperand, std::string("symbol '") + c + "' repeated in output");
    }
    if (!seen.count(c)) {
      throw Error(ErrorCode::OutputSymbolNotInInputs, std::string("output symbol '") + c + "' not in any input");
    }
    if (out.is_plate(c)) throw Error(ErrorCode::PlateInOutput, std::string("plate '") + c + "' in output");
    out.output += c;
  }
  return out;
}

PlatedFactorGraph infer_plate_sets(const EinsumSpec& spec, std::span<const std::vector<std::size_t>> shapes) {
  if (shapes.size() != spec.inputs.size()) {
    throw Error(ErrorCode::SizeMismatch, "expected " + std::to_string(spec.inputs.size()) + " operands, got " +
                                             std::to_string(shapes.size()));
  }
  std::map<char, std::size_t> sizes;
  std::map<char, PlateSet> var_plates;
  for (std::size_t k = 0; k < spec.inputs.size(); ++k) {
    const auto& in = spec.inputs[k];
    if (shapes[k].size() != in.size()) {
      throw Error(ErrorCode::SizeMismatch, "operand " + std::to_string(k) + " has rank " +
                                               std::to_string(shapes[k].size()) + ", spec '" + in + "'");
    }
    PlateSet here;
    for (char c : in) {
      if (spec.is_plate(c)) here.insert(std::string(1, c));
    }
    for (std::size_t a = 0; a < in.size(); ++a) {
      const char c = in[a];
      auto [it, fresh] = sizes.emplace(c, shapes[k][a]);
      if (!fresh && it->second != shapes[k][a]) {
        throw Error(ErrorCode::SizeMismatch, std::string("symbol '") + c + "' has sizes " +
                                                 std::to_string(it->second) + " and " + std::to_string(shapes[k][a]));
      }
      if (spec.is_plate(c)) continue;
      auto [vp, first] = var_plates.emplace(c, here);
      if (!first) {
        PlateSet common;
        for (const auto& p : vp->second) {
          if (here.count(p)) common.insert(p);
        }
        vp->second = std::move(common);
      }
    }
  }
  for (char c : spec.output) var_plates[c].clear();

  PlatedFactorGraph g;
  for (const auto& [c, n] : sizes) {
    if (spec.is_plate(c)) g.add_plate(std::string(1, c), n);
  }
  for (const auto& [c, plates] : var_plates) g.add_variable(std::string(1, c), sizes.at(c), plates);
  for (std::size_t k = 0; k < spec.inputs.size(); ++k) {
    std::set<std::string> vars;
    PlateSet plates;
    for (char c : spec.inputs[k]) (spec.is_plate(c) ? plates : vars).insert(std::string(1, c));
    g.add_factor(factor_name(k), std::move(vars), std::move(plates));
  }
  g.require_valid();
  return g;
}

PlatedFactorGraph einsum_graph(const EinsumSpec& spec, std::span<const DenseArray> operands) {
  std::vector<std::vector<std::size_t>> shapes;
  for (const auto& op : operands) shapes.push_back(op.shape);
  auto g = infer_plate_sets(spec, shapes);
  for (std::size_t k = 0; k < operands.size(); ++k) {
    std::vector<Dim> layout;
    for (std::size_t a = 0; a < spec.inputs[k].size(); ++a) {
      const char c = spec.inputs[k][a];
      layout.push_back(spec.is_plate(c) ? plate_dim(std::string(1, c), operands[k].shape[a])
                                        : var_dim(std::string(1, c), operands[k].shape[a]));
    }
    if (numel(layout) != operands[k].values.size()) {
      throw Error(ErrorCode::SizeMismatch, "operand " + std::to_string(k) + " has " +
                                               std::to_string(operands[k].values.size()) + " values, shape needs " +
                                               std::to_string(numel(layout)));
    }
    g.set_table(factor_name(k), NamedTensor::from_layout(std::move(layout), operands[k].values));
  }
  return g;
}

NamedTensor plated_einsum(const EinsumSpec& spec, std::span<const DenseArray> operands, const Semiring& s,
                          const ThreadPool* pool) {
  const auto g = einsum_graph(spec, operands);
  EngineOptions options;
  options.pool = pool;
  for (char c : spec.output) options.keep.insert(std::string(1, c));
  return tensor_variable_elimination(g, s, options).value;
}

DenseArray to_output_order(const EinsumSpec& spec, const NamedTensor& result) {
  DenseArray out;
  std::vector<std::string> order;
  for (char c : spec.output) {
    order.emplace_back(1, c);
    out.shape.push_back(result.dim(order.back()).size);
  }
  out.values = result.values_in(order);
  return out;
}

}  // namespace tvelim
