// SPDX-FileCopyrightText: © 2026 igcl contributors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "igcl/tensor.hpp"

namespace igcl {

/// Deterministic 64-bit mix of (seed, stream). Used to derive independent
/// generator seeds without a sequential stream.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

/// Named learnable tensors, iterated in name order. Lookups of missing names
/// throw ConfigError.
class ParamStore {
 public:
  /// Registers a zero tensor; throws if the name already exists.
  Tensor& add(const std::string& name, Shape shape);
  Tensor& add_normal(const std::string& name, Shape shape, double stddev, std::mt19937_64& rng);
  Tensor& add_full(const std::string& name, Shape shape, double value);

  bool contains(const std::string& name) const { return params_.count(name) != 0; }
  const Tensor& get(const std::string& name) const;
  Tensor& get(const std::string& name);

  std::size_t size() const { return params_.size(); }
  std::size_t scalar_count() const;
  auto begin() const { return params_.begin(); }
  auto end() const { return params_.end(); }
  auto begin() { return params_.begin(); }
  auto end() { return params_.end(); }

  void zero_grad();
  ParamStore deep_copy() const;
  /// Copy values from a store with the same names and shapes.
  void assign_values(const ParamStore& other);
  bool all_finite() const;

  /// Binary checkpoint: magic, count, then per tensor name/shape/float64 LE data.
  void save(std::ostream& out) const;
  static ParamStore load(std::istream& in);
  /// JSON manifest mapping name -> {shape, offset} into the binary payload.
  std::string manifest_json() const;

 private:
  std::map<std::string, Tensor> params_;
};

}  // namespace igcl
