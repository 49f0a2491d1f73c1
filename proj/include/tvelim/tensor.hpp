// Copyright 2026 The tvelim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tvelim/semiring.hpp"

namespace tvelim {

class ThreadPool;

enum class DimKind { Plate, Variable };

/// A named tensor dimension. Plates index replicas, variables index values.
struct Dim {
  std::string name;
  DimKind kind = DimKind::Variable;
  std::size_t size = 1;

  friend bool operator==(const Dim&, const Dim&) = default;
};

inline Dim plate_dim(std::string name, std::size_t size) {
  return {std::move(name), DimKind::Plate, size};
}
inline Dim var_dim(std::string name, std::size_t size) {
  return {std::move(name), DimKind::Variable, size};
}

/// Canonical order: plates before variables, each group sorted by name.
bool canonical_less(const Dim& a, const Dim& b);
void sort_canonical(std::vector<Dim>& dims);

std::uint64_t numel(std::span<const Dim> dims);

/// Immutable dense tensor with named dimensions held in canonical order.
///
/// Storage is shared and strided; a stride of zero marks a broadcast
/// dimension, so align() and broadcast_to() never copy. Copies are cheap and
/// instances are safe to share across threads.
class NamedTensor {
 public:
  /// Zero-dimensional tensor holding 0.
  NamedTensor();

  static NamedTensor scalar(double value);
  static NamedTensor filled(std::vector<Dim> dims, double value);
  /// `values` is row-major over `layout`, which may be in any order; the
  /// result is stored in canonical order.
  static NamedTensor from_layout(std::vector<Dim> layout, std::vector<double> values);

  const std::vector<Dim>& dims() const { return dims_; }
  std::size_t rank() const { return dims_.size(); }
  std::size_t numel() const;

  std::optional<std::size_t> axis(std::string_view name) const;
  bool has(std::string_view name) const { return axis(name).has_value(); }
  const Dim& dim(std::string_view name) const;

  /// Entry at a multi-index given in canonical dim order.
  double at(std::span<const std::size_t> index) const;
  /// Entry at a flat row-major index over the canonical dims.
  double flat(std::size_t index) const;
  /// The single entry of a zero-dimensional tensor.
  double item() const;

  /// Materialized row-major values in canonical order.
  std::vector<double> values() const;
  /// Row-major values with dimensions permuted to `order` (a permutation of the dim names).
  std::vector<double> values_in(std::span<const std::string> order) const;

  bool contiguous() const;
  NamedTensor materialize() const;

  /// View with `name` fixed at `index` and removed.
  NamedTensor slice(std::string_view name, std::size_t index) const;
  /// View extended to `dims` (a superset of this tensor's dims) with stride-0 expansion.
  NamedTensor broadcast_to(std::vector<Dim> dims) const;
  /// View with dimensions renamed; entries not in the map keep their names.
  NamedTensor renamed(const std::map<std::string, std::string>& names) const;

  const std::vector<std::size_t>& strides() const { return strides_; }
  std::size_t offset() const { return offset_; }
  const double* data() const { return data_->data(); }

 private:
  NamedTensor(std::vector<Dim> dims, std::vector<std::size_t> strides, std::size_t offset,
              std::shared_ptr<const std::vector<double>> data);

  std::vector<Dim> dims_;
  std::vector<std::size_t> strides_;
  std::size_t offset_ = 0;
  std::shared_ptr<const std::vector<double>> data_;
};

/// Union of the inputs' dims in canonical order; throws SizeMismatch or
/// KindMismatch when a shared name disagrees.
std::vector<Dim> union_dims(std::span<const NamedTensor> tensors);

/// Broadcasts every input to the union of all dims.
std::vector<NamedTensor> align(std::span<const NamedTensor> tensors);

NamedTensor pointwise_times(const NamedTensor& a, const NamedTensor& b, const Semiring& s,
                            const ThreadPool* pool = nullptr);

/// Plus-reduces variable dims. Plates are never plus-reduced.
NamedTensor reduce_plus(const NamedTensor& t, const std::set<std::string>& dims,
                        const Semiring& s, const ThreadPool* pool = nullptr);

/// Times-reduces plate dims.
NamedTensor reduce_product(const NamedTensor& t, const std::set<std::string>& plates,
                           const Semiring& s, const ThreadPool* pool = nullptr);

/// Fused kernel: times all inputs pointwise and plus-fold over `reduce`,
/// without materializing the product. `reduce` may name dims of any kind
/// (the adjoint pass sums over plates of co-factors); callers enforce kinds.
NamedTensor contract(std::span<const NamedTensor> inputs, const std::set<std::string>& reduce,
                     const Semiring& s, const ThreadPool* pool = nullptr);

struct ArgContraction {
  NamedTensor value;
  /// Flat index of the winning combination of the reduced dims (canonical
  /// order), stored as double, over the same dims as `value`.
  NamedTensor argmax;
};

/// contract() for semirings with argmax; ties resolve to the lowest index.
ArgContraction contract_argmax(std::span<const NamedTensor> inputs,
                               const std::set<std::string>& reduce, const Semiring& s,
                               const ThreadPool* pool = nullptr);

/// out[p, r] = times over all other plate slices p' != p of t[p', r], where p
/// ranges over `plates`. Computed with prefix/suffix products, no division.
NamedTensor exclusive_product(const NamedTensor& t, const std::set<std::string>& plates,
                              const Semiring& s, const ThreadPool* pool = nullptr);

}  // namespace tvelim
