// SPDX-FileCopyrightText: © 2026 igcl contributors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "igcl/errors.hpp"

namespace igcl {

using Shape = std::vector<std::size_t>;

std::string shape_str(const Shape& s);

/// Dense row-major float64 array. Copies share storage; use clone() for a
/// deep copy. An empty shape denotes a scalar.
class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor full(Shape shape, double value, bool requires_grad = false);
  static Tensor from(Shape shape, std::vector<double> values, bool requires_grad = false);
  static Tensor scalar(double value, bool requires_grad = false);
  static Tensor eye(std::size_t n);

  bool defined() const { return impl_ != nullptr; }
  const Shape& shape() const;
  std::size_t rank() const { return shape().size(); }
  std::size_t numel() const;
  std::size_t rows() const;
  std::size_t cols() const;
  bool is_scalar() const { return numel() == 1; }

  std::span<const double> data() const;
  std::span<double> mutable_data();
  double item() const;
  double at(std::size_t i, std::size_t j) const;
  double operator[](std::size_t i) const { return data()[i]; }

  bool requires_grad() const;
  void set_requires_grad(bool flag);

  bool has_grad() const;
  std::span<const double> grad() const;
  /// Gradient buffer, allocated zero-filled on first access.
  std::vector<double>& grad_buffer() const;
  void zero_grad();

  Tensor clone() const;
  /// Same storage identity (not value equality).
  bool same(const Tensor& other) const { return impl_ == other.impl_; }

 private:
  struct Impl {
    Shape shape;
    std::vector<double> data;
    std::vector<double> grad;
    bool requires_grad = false;
  };
  std::shared_ptr<Impl> impl_;
};

/// Define-by-run record of differentiable operations. Operations whose inputs
/// do not require gradients, or that run on a non-recording tape, leave no
/// record. One backward pass per recording; reset() before reuse.
class Tape {
 public:
  explicit Tape(bool recording = true) : recording_(recording) {}
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  bool recording() const { return recording_; }
  std::size_t size() const { return records_.size(); }

  /// True when an op over these inputs must be differentiated.
  bool tracks(std::initializer_list<const Tensor*> inputs) const;
  void record(Tensor output, std::function<void()> backward);

  void backward(const Tensor& loss);
  void reset();

 private:
  struct Record {
    Tensor output;
    std::function<void()> backward;
  };
  std::vector<Record> records_;
  bool recording_;
  bool consumed_ = false;
};

enum class ReduceKind { kSum, kMean, kMax, kMin };

// Primitive set. All functions are pure in their tensor inputs.
Tensor matmul(Tape& tape, const Tensor& a, const Tensor& b);
Tensor transpose(Tape& tape, const Tensor& a);

/// Equal shapes, or either side a single-element tensor.
Tensor add(Tape& tape, const Tensor& a, const Tensor& b);
Tensor sub(Tape& tape, const Tensor& a, const Tensor& b);
Tensor mul(Tape& tape, const Tensor& a, const Tensor& b);
/// x[m×n] + bias[n] added to every row.
Tensor add_row(Tape& tape, const Tensor& x, const Tensor& bias);

Tensor scale(Tape& tape, const Tensor& x, double factor);
Tensor neg(Tape& tape, const Tensor& x);
Tensor relu(Tape& tape, const Tensor& x);
Tensor exp(Tape& tape, const Tensor& x);
/// Throws DomainError on any nonpositive entry.
Tensor log(Tape& tape, const Tensor& x);

Tensor softmax_rows(Tape& tape, const Tensor& x);
Tensor log_softmax_rows(Tape& tape, const Tensor& x);

/// Reduce a rank-2 tensor along axis 0 or 1, or everything when axis is empty.
/// Max/min backward routes to the first extremal index.
Tensor reduce(Tape& tape, const Tensor& x, std::optional<std::size_t> axis, ReduceKind kind);
inline Tensor sum(Tape& tape, const Tensor& x) { return reduce(tape, x, std::nullopt, ReduceKind::kSum); }
inline Tensor mean(Tape& tape, const Tensor& x) { return reduce(tape, x, std::nullopt, ReduceKind::kMean); }

Tensor concat_rows(Tape& tape, std::span<const Tensor> parts);
Tensor concat_cols(Tape& tape, std::span<const Tensor> parts);
Tensor slice_rows(Tape& tape, const Tensor& x, std::size_t begin, std::size_t end);
Tensor slice_cols(Tape& tape, const Tensor& x, std::size_t begin, std::size_t end);

/// Rows of `table` picked by index; gradients scatter-add back.
Tensor gather_rows(Tape& tape, const Tensor& table, std::span<const std::size_t> index);

/// Per-row layer normalisation with affine gamma/beta of length n.
Tensor layer_norm_rows(Tape& tape, const Tensor& x, const Tensor& gamma, const Tensor& beta,
                       double eps = 1e-5);

/// Divide each row by its L2 norm. Throws DegenerateEmbeddingError on a
/// zero row.
Tensor normalize_rows(Tape& tape, const Tensor& x);

}  // namespace igcl
