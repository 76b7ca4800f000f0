// SPDX-FileCopyrightText: © 2026 igcl contributors
//
// SPDX-License-Identifier: Apache-2.0

#include "igcl/params.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>

#include "json.hpp"

namespace igcl {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 finaliser over the pair.
  std::uint64_t z = seed * 0x9E3779B97F4A7C15ull + stream + 0x632BE59BD9B4E019ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

Tensor& ParamStore::add(const std::string& name, Shape shape) {
  auto [it, inserted] = params_.emplace(name, Tensor::zeros(std::move(shape), true));
  if (!inserted) throw ConfigError("parameter '" + name + "' registered twice");
  return it->second;
}

Tensor& ParamStore::add_normal(const std::string& name, Shape shape, double stddev, std::mt19937_64& rng) {
  Tensor& t = add(name, std::move(shape));
  std::normal_distribution<double> dist(0.0, stddev);
  for (double& v : t.mutable_data()) v = dist(rng);
  return t;
}

Tensor& ParamStore::add_full(const std::string& name, Shape shape, double value) {
  Tensor& t = add(name, std::move(shape));
  for (double& v : t.mutable_data()) v = value;
  return t;
}

const Tensor& ParamStore::get(const std::string& name) const {
  auto it = params_.find(name);
  if (it == params_.end()) throw ConfigError("no parameter named '" + name + "'");
  return it->second;
}

Tensor& ParamStore::get(const std::string& name) {
  auto it = params_.find(name);
  if (it == params_.end()) throw ConfigError("no parameter named '" + name + "'");
  return it->second;
}

std::size_t ParamStore::scalar_count() const {
  std::size_t n = 0;
  for (const auto& [_, t] : params_) n += t.numel();
  return n;
}

void ParamStore::zero_grad() {
  for (auto& [_, t] : params_) t.zero_grad();
}

ParamStore ParamStore::deep_copy() const {
  ParamStore out;
  for (const auto& [name, t] : params_) out.params_.emplace(name, t.clone());
  return out;
}

void ParamStore::assign_values(const ParamStore& other) {
  if (other.params_.size() != params_.size()) throw ConfigError("parameter sets differ in size");
  for (auto& [name, t] : params_) {
    const Tensor& src = other.get(name);
    if (src.shape() != t.shape()) throw DimensionError("parameter '" + name + "' shape mismatch");
    std::copy(src.data().begin(), src.data().end(), t.mutable_data().begin());
  }
}

bool ParamStore::all_finite() const {
  for (const auto& [_, t] : params_)
    for (double v : t.data())
      if (!std::isfinite(v)) return false;
  return true;
}

namespace {

constexpr char kMagic[8] = {'I', 'G', 'C', 'L', 'C', 'K', 'P', '1'};

template <class T>
void put(std::ostream& out, T value) {
  static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <class T>
T take(std::istream& in) {
  T value{};
  if (!in.read(reinterpret_cast<char*>(&value), sizeof(T))) throw DataError("truncated checkpoint");
  return value;
}

}  // namespace

void ParamStore::save(std::ostream& out) const {
  out.write(kMagic, sizeof kMagic);
  put<std::uint64_t>(out, params_.size());
  for (const auto& [name, t] : params_) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(t.rank()));
    for (auto d : t.shape()) put<std::uint64_t>(out, d);
    for (double v : t.data()) put<double>(out, v);
  }
}

ParamStore ParamStore::load(std::istream& in) {
  char magic[sizeof kMagic];
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof kMagic) != 0) {
    throw DataError("not an igcl checkpoint");
  }
  ParamStore store;
  const auto count = take<std::uint64_t>(in);
  for (std::uint64_t i = 0; i < count; ++i) {
    std::string name(take<std::uint32_t>(in), '\0');
    if (!in.read(name.data(), static_cast<std::streamsize>(name.size()))) throw DataError("truncated checkpoint");
    Shape shape(take<std::uint32_t>(in));
    for (auto& d : shape) d = take<std::uint64_t>(in);
    Tensor& t = store.add(name, shape);
    for (double& v : t.mutable_data()) v = take<double>(in);
  }
  return store;
}

std::string ParamStore::manifest_json() const {
  nlohmann::json doc = nlohmann::json::object();
  std::size_t offset = 0;
  for (const auto& [name, t] : params_) {
    doc[name] = {{"shape", t.shape()}, {"offset", offset}, {"dtype", "float64-le"}};
    offset += t.numel();
  }
  return doc.dump(2);
}

}  // namespace igcl
