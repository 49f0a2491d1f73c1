// Copyright 2026 The tvelim Authors
// SPDX-License-Identifier: Apache-2.0

#include "tvelim/tensor.hpp"

#include <algorithm>
#include <numeric>

#include "tvelim/error.hpp"
#include "tvelim/parallel.hpp"

namespace tvelim {

bool canonical_less(const Dim& a, const Dim& b) {
  if (a.kind != b.kind) return a.kind == DimKind::Plate;
  return a.name < b.name;
}

void sort_canonical(std::vector<Dim>& dims) { std::sort(dims.begin(), dims.end(), canonical_less); }

std::uint64_t numel(std::span<const Dim> dims) {
  std::uint64_t n = 1;
  for (const auto& d : dims) n *= d.size;
  return n;
}

namespace {

std::vector<std::size_t> row_major_strides(const std::vector<Dim>& dims) {
  std::vector<std::size_t> strides(dims.size());
  std::size_t s = 1;
  for (std::size_t i = dims.size(); i-- > 0;) {
    strides[i] = s;
    s *= dims[i].size;
  }
  return strides;
}

void check_unique(const std::vector<Dim>& dims) {
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (dims[i].size == 0) throw Error(ErrorCode::SizeMismatch, "dim '" + dims[i].name + "' has size 0");
    for (std::size_t j = i + 1; j < dims.size(); ++j) {
      if (dims[i].name == dims[j].name) {
        throw Error(ErrorCode::Validation, "duplicate dim name '" + dims[i].name + "'");
      }
    }
  }
}

// Walks a strided view in row-major order of `dims` and calls f(offset).
template <class F>
void for_each_offset(const std::vector<Dim>& dims, const std::vector<std::size_t>& strides,
                     std::size_t offset, F&& f) {
  const std::size_t rank = dims.size();
  const std::uint64_t total = numel(dims);
  std::vector<std::size_t> counter(rank, 0);
  std::size_t off = offset;
  for (std::uint64_t n = 0; n < total; ++n) {
    f(off);
    for (std::size_t d = rank; d-- > 0;) {
      off += strides[d];
      if (++counter[d] < dims[d].size) break;
      off -= strides[d] * dims[d].size;
      counter[d] = 0;
    }
  }
}

}  // namespace

NamedTensor::NamedTensor()
    : NamedTensor({}, {}, 0, std::make_shared<const std::vector<double>>(1, 0.0)) {}

NamedTensor::NamedTensor(std::vector<Dim> dims, std::vector<std::size_t> strides, std::size_t offset,
                         std::shared_ptr<const std::vector<double>> data)
    : dims_(std::move(dims)), strides_(std::move(strides)), offset_(offset), data_(std::move(data)) {}

NamedTensor NamedTensor::scalar(double value) {
  return NamedTensor({}, {}, 0, std::make_shared<const std::vector<double>>(1, value));
}

NamedTensor NamedTensor::filled(std::vector<Dim> dims, double value) {
  check_unique(dims);
  sort_canonical(dims);
  const auto n = tvelim::numel(dims);
  auto strides = row_major_strides(dims);
  return NamedTensor(std::move(dims), std::move(strides), 0,
                     std::make_shared<const std::vector<double>>(n, value));
}

NamedTensor NamedTensor::from_layout(std::vector<Dim> layout, std::vector<double> values) {
  check_unique(layout);
  if (values.size() != tvelim::numel(layout)) {
    throw Error(ErrorCode::SizeMismatch, "expected " + std::to_string(tvelim::numel(layout)) +
                                             " values, got " + std::to_string(values.size()));
  }
  auto strides = row_major_strides(layout);
  std::vector<std::size_t> order(layout.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return canonical_less(layout[a], layout[b]); });
  const bool sorted = std::is_sorted(order.begin(), order.end());
  std::vector<Dim> dims;
  std::vector<std::size_t> permuted;
  for (auto i : order) {
    dims.push_back(layout[i]);
    permuted.push_back(strides[i]);
  }
  NamedTensor view(std::move(dims), std::move(permuted), 0,
                   std::make_shared<const std::vector<double>>(std::move(values)));
  return sorted ? view : view.materialize();
}

std::size_t NamedTensor::numel() const { return tvelim::numel(dims_); }

std::optional<std::size_t> NamedTensor::axis(std::string_view name) const {
  for (std::size_t i = 0; i < dims_.size(); ++i) {
    if (dims_[i].name == name) return i;
  }
  return std::nullopt;
}

const Dim& NamedTensor::dim(std::string_view name) const {
  auto a = axis(name);
  if (!a) throw Error(ErrorCode::UnknownDim, "no dim named '" + std::string(name) + "'");
  return dims_[*a];
}

double NamedTensor::at(std::span<const std::size_t> index) const {
  if (index.size() != dims_.size()) throw Error(ErrorCode::SizeMismatch, "index rank mismatch");
  std::size_t off = offset_;
  for (std::size_t i = 0; i < index.size(); ++i) {
    if (index[i] >= dims_[i].size) throw Error(ErrorCode::SizeMismatch, "index out of range");
    off += index[i] * strides_[i];
  }
  return (*data_)[off];
}

double NamedTensor::flat(std::size_t index) const {
  std::size_t off = offset_;
  for (std::size_t i = dims_.size(); i-- > 0;) {
    off += (index % dims_[i].size) * strides_[i];
    index /= dims_[i].size;
  }
  return (*data_)[off];
}

double NamedTensor::item() const {
  if (!dims_.empty()) throw Error(ErrorCode::SizeMismatch, "item() on a tensor of rank " + std::to_string(rank()));
  return (*data_)[offset_];
}

std::vector<double> NamedTensor::values() const {
  std::vector<double> out;
  out.reserve(numel());
  for_each_offset(dims_, strides_, offset_, [&](std::size_t off) { out.push_back((*data_)[off]); });
  return out;
}

std::vector<double> NamedTensor::values_in(std::span<const std::string> order) const {
  if (order.size() != dims_.size()) throw Error(ErrorCode::UnknownDim, "order must name every dim");
  std::vector<Dim> dims;
  std::vector<std::size_t> strides;
  for (const auto& name : order) {
    auto a = axis(name);
    if (!a) throw Error(ErrorCode::UnknownDim, "no dim named '" + name + "'");
    dims.push_back(dims_[*a]);
    strides.push_back(strides_[*a]);
  }
  std::vector<double> out;
  out.reserve(numel());
  for_each_offset(dims, strides, offset_, [&](std::size_t off) { out.push_back((*data_)[off]); });
  return out;
}

bool NamedTensor::contiguous() const {
  return offset_ == 0 && strides_ == row_major_strides(dims_) && data_->size() == numel();
}

NamedTensor NamedTensor::materialize() const {
  if (contiguous()) return *this;
  auto strides = row_major_strides(dims_);
  return NamedTensor(dims_, std::move(strides), 0, std::make_shared<const std::vector<double>>(values()));
}

NamedTensor NamedTensor::slice(std::string_view name, std::size_t index) const {
  auto a = axis(name);
  if (!a) throw Error(ErrorCode::UnknownDim, "no dim named '" + std::string(name) + "'");
  if (index >= dims_[*a].size) throw Error(ErrorCode::SizeMismatch, "slice index out of range");
  auto dims = dims_;
  auto strides = strides_;
  const std::size_t off = offset_ + index * strides_[*a];
  dims.erase(dims.begin() + static_cast<std::ptrdiff_t>(*a));
  strides.erase(strides.begin() + static_cast<std::ptrdiff_t>(*a));
  return NamedTensor(std::move(dims), std::move(strides), off, data_);
}

NamedTensor NamedTensor::broadcast_to(std::vector<Dim> dims) const {
  sort_canonical(dims);
  std::vector<std::size_t> strides(dims.size(), 0);
  std::size_t matched = 0;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (auto a = axis(dims[i].name)) {
      if (dims_[*a].kind != dims[i].kind) throw Error(ErrorCode::KindMismatch, "dim '" + dims[i].name + "'");
      if (dims_[*a].size != dims[i].size) throw Error(ErrorCode::SizeMismatch, "dim '" + dims[i].name + "'");
      strides[i] = strides_[*a];
      ++matched;
    }
  }
  if (matched != dims_.size()) throw Error(ErrorCode::UnknownDim, "broadcast target must contain every dim");
  return NamedTensor(std::move(dims), std::move(strides), offset_, data_);
}

NamedTensor NamedTensor::renamed(const std::map<std::string, std::string>& names) const {
  std::vector<std::pair<Dim, std::size_t>> entries;
  for (std::size_t i = 0; i < dims_.size(); ++i) {
    Dim d = dims_[i];
    if (auto it = names.find(d.name); it != names.end()) d.name = it->second;
    entries.emplace_back(std::move(d), strides_[i]);
  }
  std::sort(entries.begin(), entries.end(),
            [](const auto& a, const auto& b) { return canonical_less(a.first, b.first); });
  std::vector<Dim> dims;
  std::vector<std::size_t> strides;
  for (auto& [d, s] : entries) {
    dims.push_back(std::move(d));
    strides.push_back(s);
  }
  check_unique(dims);
  return NamedTensor(std::move(dims), std::move(strides), offset_, data_);
}

std::vector<Dim> union_dims(std::span<const NamedTensor> tensors) {
  std::map<std::string, Dim> seen;
  for (const auto& t : tensors) {
    for (const auto& d : t.dims()) {
      auto [it, inserted] = seen.emplace(d.name, d);
      if (inserted) continue;
      if (it->second.kind != d.kind) throw Error(ErrorCode::KindMismatch, "dim '" + d.name + "'");
      if (it->second.size != d.size) {
        throw Error(ErrorCode::SizeMismatch, "dim '" + d.name + "' has sizes " +
                                                 std::to_string(it->second.size) + " and " +
                                                 std::to_string(d.size));
      }
    }
  }
  std::vector<Dim> out;
  for (auto& [_, d] : seen) out.push_back(d);
  sort_canonical(out);
  return out;
}

std::vector<NamedTensor> align(std::span<const NamedTensor> tensors) {
  const auto dims = union_dims(tensors);
  std::vector<NamedTensor> out;
  out.reserve(tensors.size());
  for (const auto& t : tensors) out.push_back(t.broadcast_to(dims));
  return out;
}

namespace {

enum class Fold { Plus, ArgPlus, Times };

// Core kernel. For every output entry, the integrand over the reduced dims is
// written to a buffer (times-folding the inputs left to right) and then
// folded with the fixed pairwise tree. Parallelism is over output entries
// only, so every entry's arithmetic is identical for any worker count.
template <class Ops>
void run_kernel(std::span<const NamedTensor> inputs, const std::vector<Dim>& out_dims,
                const std::vector<Dim>& red_dims, Fold fold, std::vector<double>& out,
                std::vector<double>* arg, const ThreadPool* pool) {
  const std::size_t k_inputs = inputs.size();
  const std::size_t n_out = tvelim::numel(out_dims);
  const std::size_t n_red = tvelim::numel(red_dims);

  auto strides_for = [&](const std::vector<Dim>& dims) {
    std::vector<std::size_t> s(dims.size() * k_inputs, 0);
    for (std::size_t k = 0; k < k_inputs; ++k) {
      for (std::size_t d = 0; d < dims.size(); ++d) {
        if (auto a = inputs[k].axis(dims[d].name)) s[d * k_inputs + k] = inputs[k].strides()[*a];
      }
    }
    return s;
  };
  const auto out_strides = strides_for(out_dims);
  const auto red_strides = strides_for(red_dims);
  std::vector<const double*> base(k_inputs);
  for (std::size_t k = 0; k < k_inputs; ++k) base[k] = inputs[k].data() + inputs[k].offset();

  out.assign(n_out, Ops::zero());
  if (arg) arg->assign(n_out, 0.0);

  auto body = [&](std::size_t begin, std::size_t end) {
    std::vector<double> buffer(n_red);
    std::vector<std::size_t> index(fold == Fold::ArgPlus ? n_red : 0);
    std::vector<std::size_t> out_off(k_inputs, 0), red_off(k_inputs), counter(out_dims.size(), 0),
        red_counter(red_dims.size());
    // Decode `begin` into the output odometer.
    std::size_t rem = begin;
    for (std::size_t d = out_dims.size(); d-- > 0;) {
      counter[d] = rem % out_dims[d].size;
      rem /= out_dims[d].size;
      for (std::size_t k = 0; k < k_inputs; ++k) out_off[k] += counter[d] * out_strides[d * k_inputs + k];
    }
    for (std::size_t o = begin; o < end; ++o) {
      red_off = out_off;
      std::fill(red_counter.begin(), red_counter.end(), 0);
      for (std::size_t r = 0; r < n_red; ++r) {
        double v = Ops::one();
        for (std::size_t k = 0; k < k_inputs; ++k) v = Ops::times(v, base[k][red_off[k]]);
        buffer[r] = v;
        for (std::size_t d = red_dims.size(); d-- > 0;) {
          const std::size_t* st = &red_strides[d * k_inputs];
          for (std::size_t k = 0; k < k_inputs; ++k) red_off[k] += st[k];
          if (++red_counter[d] < red_dims[d].size) break;
          for (std::size_t k = 0; k < k_inputs; ++k) red_off[k] -= st[k] * red_dims[d].size;
          red_counter[d] = 0;
        }
      }
      switch (fold) {
        case Fold::Plus: out[o] = pairwise_plus<Ops>(buffer); break;
        case Fold::Times: out[o] = pairwise_times<Ops>(buffer); break;
        case Fold::ArgPlus: {
          auto w = pairwise_argplus<Ops>(buffer, index);
          out[o] = w.value;
          (*arg)[o] = static_cast<double>(w.index);
          break;
        }
      }
      for (std::size_t d = out_dims.size(); d-- > 0;) {
        const std::size_t* st = &out_strides[d * k_inputs];
        for (std::size_t k = 0; k < k_inputs; ++k) out_off[k] += st[k];
        if (++counter[d] < out_dims[d].size) break;
        for (std::size_t k = 0; k < k_inputs; ++k) out_off[k] -= st[k] * out_dims[d].size;
        counter[d] = 0;
      }
    }
  };
  // Aim for chunks of at least ~4k scalar terms.
  const std::size_t grain = std::max<std::size_t>(1, 4096 / std::max<std::size_t>(1, n_red * k_inputs));
  parallel_for(pool, n_out, body, grain);
}

struct Split {
  std::vector<Dim> out;
  std::vector<Dim> red;
};

Split split_dims(const std::vector<Dim>& all, const std::set<std::string>& reduce) {
  Split s;
  for (const auto& d : all) (reduce.count(d.name) ? s.red : s.out).push_back(d);
  if (s.red.size() != reduce.size()) {
    for (const auto& name : reduce) {
      if (std::none_of(all.begin(), all.end(), [&](const Dim& d) { return d.name == name; })) {
        throw Error(ErrorCode::UnknownDim, "cannot reduce missing dim '" + name + "'");
      }
    }
  }
  return s;
}

NamedTensor make_contiguous(std::vector<Dim> dims, std::vector<double> values) {
  return NamedTensor::from_layout(std::move(dims), std::move(values));
}

}  // namespace

NamedTensor contract(std::span<const NamedTensor> inputs, const std::set<std::string>& reduce,
                     const Semiring& s, const ThreadPool* pool) {
  const auto split = split_dims(union_dims(inputs), reduce);
  std::vector<double> out;
  s.visit([&](auto o) { run_kernel<decltype(o)>(inputs, split.out, split.red, Fold::Plus, out, nullptr, pool); });
  return make_contiguous(split.out, std::move(out));
}

ArgContraction contract_argmax(std::span<const NamedTensor> inputs, const std::set<std::string>& reduce,
                               const Semiring& s, const ThreadPool* pool) {
  if (!s.has_argmax()) {
    throw Error(ErrorCode::Validation, "semiring '" + std::string(s.name()) + "' has no argmax");
  }
  const auto split = split_dims(union_dims(inputs), reduce);
  std::vector<double> out, arg;
  s.visit([&](auto o) { run_kernel<decltype(o)>(inputs, split.out, split.red, Fold::ArgPlus, out, &arg, pool); });
  return {make_contiguous(split.out, std::move(out)), make_contiguous(split.out, std::move(arg))};
}

NamedTensor pointwise_times(const NamedTensor& a, const NamedTensor& b, const Semiring& s,
                            const ThreadPool* pool) {
  const NamedTensor inputs[] = {a, b};
  return contract(inputs, {}, s, pool);
}

NamedTensor reduce_plus(const NamedTensor& t, const std::set<std::string>& dims, const Semiring& s,
                        const ThreadPool* pool) {
  for (const auto& name : dims) {
    if (t.dim(name).kind == DimKind::Plate) {
      throw Error(ErrorCode::PlusOnPlateDim, "plate '" + name + "' cannot be plus-reduced");
    }
  }
  if (dims.empty()) return t;
  return contract(std::span(&t, 1), dims, s, pool);
}

NamedTensor reduce_product(const NamedTensor& t, const std::set<std::string>& plates, const Semiring& s,
                           const ThreadPool* pool) {
  for (const auto& name : plates) {
    if (t.dim(name).kind == DimKind::Variable) {
      throw Error(ErrorCode::ProductOnVariableDim, "variable '" + name + "' cannot be product-reduced");
    }
  }
  if (plates.empty()) return t;
  const auto split = split_dims(t.dims(), plates);
  std::vector<double> out;
  s.visit([&](auto o) {
    run_kernel<decltype(o)>(std::span(&t, 1), split.out, split.red, Fold::Times, out, nullptr, pool);
  });
  return make_contiguous(split.out, std::move(out));
}

NamedTensor exclusive_product(const NamedTensor& t, const std::set<std::string>& plates, const Semiring& s,
                              const ThreadPool* pool) {
  const auto split = split_dims(t.dims(), plates);
  const std::size_t n_rest = tvelim::numel(split.out);
  const std::size_t n_plate = tvelim::numel(split.red);
  // Work in a (rest, plate) layout, then restore canonical order.
  std::vector<Dim> layout = split.out;
  layout.insert(layout.end(), split.red.begin(), split.red.end());
  std::vector<std::string> order;
  for (const auto& d : layout) order.push_back(d.name);
  const auto src = t.values_in(order);
  std::vector<double> out(src.size());
  s.visit([&](auto o) {
    using Ops = decltype(o);
    parallel_for(pool, n_rest, [&](std::size_t begin, std::size_t end) {
      std::vector<double> suffix(n_plate + 1);
      for (std::size_t r = begin; r < end; ++r) {
        const double* row = &src[r * n_plate];
        double* dst = &out[r * n_plate];
        suffix[n_plate] = Ops::one();
        for (std::size_t p = n_plate; p-- > 0;) suffix[p] = Ops::times(row[p], suffix[p + 1]);
        double prefix = Ops::one();
        for (std::size_t p = 0; p < n_plate; ++p) {
          dst[p] = Ops::times(prefix, suffix[p + 1]);
          prefix = Ops::times(prefix, row[p]);
        }
      }
    }, 64);
  });
  return NamedTensor::from_layout(std::move(layout), std::move(out));
}

}  // namespace tvelim
