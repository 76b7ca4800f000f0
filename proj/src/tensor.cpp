// SPDX-FileCopyrightText: © 2026 igcl contributors
//
// SPDX-License-Identifier: Apache-2.0

#include "igcl/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace igcl {

std::string shape_str(const Shape& s) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) os << "x";
    os << s[i];
  }
  os << ']';
  return os.str();
}

namespace {

std::size_t product(const Shape& s) {
  return std::accumulate(s.begin(), s.end(), std::size_t{1}, std::multiplies<>());
}

void check_shape(const Shape& s) {
  for (auto d : s) {
    if (d == 0) throw DimensionError("zero-sized dimension in shape " + shape_str(s));
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Tensor

Tensor Tensor::zeros(Shape shape, bool requires_grad) { return full(std::move(shape), 0.0, requires_grad); }

Tensor Tensor::full(Shape shape, double value, bool requires_grad) {
  check_shape(shape);
  Tensor t;
  t.impl_ = std::make_shared<Impl>();
  t.impl_->data.assign(product(shape), value);
  t.impl_->shape = std::move(shape);
  t.impl_->requires_grad = requires_grad;
  return t;
}

Tensor Tensor::from(Shape shape, std::vector<double> values, bool requires_grad) {
  check_shape(shape);
  if (product(shape) != values.size()) {
    throw DimensionError("shape " + shape_str(shape) + " does not match " +
                         std::to_string(values.size()) + " values");
  }
  Tensor t;
  t.impl_ = std::make_shared<Impl>();
  t.impl_->shape = std::move(shape);
  t.impl_->data = std::move(values);
  t.impl_->requires_grad = requires_grad;
  return t;
}

Tensor Tensor::scalar(double value, bool requires_grad) { return from({}, {value}, requires_grad); }

Tensor Tensor::eye(std::size_t n) {
  Tensor t = zeros({n, n});
  for (std::size_t i = 0; i < n; ++i) t.impl_->data[i * n + i] = 1.0;
  return t;
}

const Shape& Tensor::shape() const { return impl_->shape; }
std::size_t Tensor::numel() const { return impl_->data.size(); }

std::size_t Tensor::rows() const {
  const auto& s = impl_->shape;
  return s.size() == 2 ? s[0] : 1;
}

std::size_t Tensor::cols() const {
  const auto& s = impl_->shape;
  if (s.empty()) return 1;
  return s.back();
}

std::span<const double> Tensor::data() const { return impl_->data; }
std::span<double> Tensor::mutable_data() { return impl_->data; }

double Tensor::item() const {
  if (numel() != 1) throw DimensionError("item() on tensor of shape " + shape_str(shape()));
  return impl_->data[0];
}

double Tensor::at(std::size_t i, std::size_t j) const { return impl_->data[i * cols() + j]; }

bool Tensor::requires_grad() const { return impl_ && impl_->requires_grad; }
void Tensor::set_requires_grad(bool flag) { impl_->requires_grad = flag; }

bool Tensor::has_grad() const { return impl_ && !impl_->grad.empty(); }
std::span<const double> Tensor::grad() const { return impl_->grad; }

std::vector<double>& Tensor::grad_buffer() const {
  if (impl_->grad.empty()) impl_->grad.assign(impl_->data.size(), 0.0);
  return impl_->grad;
}

void Tensor::zero_grad() {
  if (!impl_->grad.empty()) std::fill(impl_->grad.begin(), impl_->grad.end(), 0.0);
}

Tensor Tensor::clone() const {
  Tensor t = from(impl_->shape, impl_->data, impl_->requires_grad);
  return t;
}

// ---------------------------------------------------------------------------
// Tape

bool Tape::tracks(std::initializer_list<const Tensor*> inputs) const {
  if (!recording_) return false;
  return std::any_of(inputs.begin(), inputs.end(), [](const Tensor* t) { return t->requires_grad(); });
}

void Tape::record(Tensor output, std::function<void()> backward) {
  if (consumed_) throw TapeError("recording on a tape that already ran backward; call reset()");
  output.set_requires_grad(true);
  records_.push_back({std::move(output), std::move(backward)});
}

void Tape::backward(const Tensor& loss) {
  if (consumed_) throw TapeError("backward called twice without reset");
  if (loss.numel() != 1) throw TapeError("backward needs a scalar loss, got shape " + shape_str(loss.shape()));
  if (!loss.requires_grad()) throw TapeError("loss was not produced by recorded operations");
  consumed_ = true;
  Tensor seed = loss;
  seed.grad_buffer()[0] += 1.0;
  for (auto it = records_.rbegin(); it != records_.rend(); ++it) {
    if (!it->output.has_grad()) continue;  // not on a path to the loss
    it->backward();
  }
}

void Tape::reset() {
  records_.clear();
  consumed_ = false;
}

// ---------------------------------------------------------------------------
// Primitives

namespace {

Tensor make_like(const Shape& shape) { return Tensor::zeros(shape); }

void require_rank2(const Tensor& t, const char* op) {
  if (t.rank() != 2) throw DimensionError(std::string(op) + " expects a matrix, got " + shape_str(t.shape()));
}

enum class Broadcast { kEqual, kLeftScalar, kRightScalar };

Broadcast broadcast_kind(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() == b.shape()) return Broadcast::kEqual;
  // A [1 x 1] matrix keeps its shape against a rank-0 scalar.
  if (a.numel() == 1 && b.numel() == 1) return a.rank() >= b.rank() ? Broadcast::kRightScalar : Broadcast::kLeftScalar;
  if (a.numel() == 1) return Broadcast::kLeftScalar;
  if (b.numel() == 1) return Broadcast::kRightScalar;
  throw DimensionError(std::string(op) + ": incompatible shapes " + shape_str(a.shape()) + " and " +
                       shape_str(b.shape()));
}

template <class Fwd>
Tensor unary(Tape& tape, const Tensor& x, Fwd fwd, std::function<void(const Tensor&, const Tensor&)> bwd) {
  Tensor out = make_like(x.shape());
  auto xd = x.data();
  auto od = out.mutable_data();
  for (std::size_t i = 0; i < xd.size(); ++i) od[i] = fwd(xd[i]);
  if (tape.tracks({&x})) {
    tape.record(out, [x, out, bwd]() mutable { bwd(x, out); });
  }
  return out;
}

}  // namespace

Tensor matmul(Tape& tape, const Tensor& a, const Tensor& b) {
  require_rank2(a, "matmul");
  require_rank2(b, "matmul");
  const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
  if (b.rows() != k) {
    throw DimensionError("matmul: inner dimensions differ for " + shape_str(a.shape()) + " and " +
                         shape_str(b.shape()));
  }
  Tensor c = Tensor::zeros({m, n});
  auto ad = a.data();
  auto bd = b.data();
  auto cd = c.mutable_data();
  for (std::size_t i = 0; i < m; ++i) {
    double* crow = cd.data() + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const double av = ad[i * k + p];
      if (av == 0.0) continue;
      const double* brow = bd.data() + p * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
  if (tape.tracks({&a, &b})) {
    tape.record(c, [a, b, c, m, k, n]() mutable {
      const auto& gc = c.grad();
      if (a.requires_grad()) {
        auto& ga = a.grad_buffer();
        auto bd = b.data();
        for (std::size_t i = 0; i < m; ++i) {
          for (std::size_t p = 0; p < k; ++p) {
            double acc = 0.0;
            for (std::size_t j = 0; j < n; ++j) acc += gc[i * n + j] * bd[p * n + j];
            ga[i * k + p] += acc;
          }
        }
      }
      if (b.requires_grad()) {
        auto& gb = b.grad_buffer();
        auto ad = a.data();
        for (std::size_t i = 0; i < m; ++i) {
          for (std::size_t p = 0; p < k; ++p) {
            const double av = ad[i * k + p];
            if (av == 0.0) continue;
            for (std::size_t j = 0; j < n; ++j) gb[p * n + j] += av * gc[i * n + j];
          }
        }
      }
    });
  }
  return c;
}

Tensor transpose(Tape& tape, const Tensor& a) {
  require_rank2(a, "transpose");
  const std::size_t m = a.rows(), n = a.cols();
  Tensor t = Tensor::zeros({n, m});
  auto ad = a.data();
  auto td = t.mutable_data();
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) td[j * m + i] = ad[i * n + j];
  if (tape.tracks({&a})) {
    tape.record(t, [a, t, m, n]() mutable {
      auto& ga = a.grad_buffer();
      const auto& gt = t.grad();
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) ga[i * n + j] += gt[j * m + i];
    });
  }
  return t;
}

namespace {

// Shared body for add/sub: out = a + sign * b.
Tensor add_signed(Tape& tape, const Tensor& a, const Tensor& b, double sign, const char* op) {
  const Broadcast bc = broadcast_kind(a, b, op);
  const Shape& shape = bc == Broadcast::kLeftScalar ? b.shape() : a.shape();
  Tensor out = make_like(shape);
  auto ad = a.data();
  auto bd = b.data();
  auto od = out.mutable_data();
  for (std::size_t i = 0; i < od.size(); ++i) {
    const double av = bc == Broadcast::kLeftScalar ? ad[0] : ad[i];
    const double bv = bc == Broadcast::kRightScalar ? bd[0] : bd[i];
    od[i] = av + sign * bv;
  }
  if (tape.tracks({&a, &b})) {
    tape.record(out, [a, b, out, bc, sign]() mutable {
      const auto& go = out.grad();
      if (a.requires_grad()) {
        auto& ga = a.grad_buffer();
        for (std::size_t i = 0; i < go.size(); ++i) ga[bc == Broadcast::kLeftScalar ? 0 : i] += go[i];
      }
      if (b.requires_grad()) {
        auto& gb = b.grad_buffer();
        for (std::size_t i = 0; i < go.size(); ++i) gb[bc == Broadcast::kRightScalar ? 0 : i] += sign * go[i];
      }
    });
  }
  return out;
}

}  // namespace

Tensor add(Tape& tape, const Tensor& a, const Tensor& b) { return add_signed(tape, a, b, 1.0, "add"); }
Tensor sub(Tape& tape, const Tensor& a, const Tensor& b) { return add_signed(tape, a, b, -1.0, "sub"); }

Tensor mul(Tape& tape, const Tensor& a, const Tensor& b) {
  const Broadcast bc = broadcast_kind(a, b, "mul");
  const Shape& shape = bc == Broadcast::kLeftScalar ? b.shape() : a.shape();
  Tensor out = make_like(shape);
  auto ad = a.data();
  auto bd = b.data();
  auto od = out.mutable_data();
  auto ai = [bc](std::size_t i) { return bc == Broadcast::kLeftScalar ? std::size_t{0} : i; };
  auto bi = [bc](std::size_t i) { return bc == Broadcast::kRightScalar ? std::size_t{0} : i; };
  for (std::size_t i = 0; i < od.size(); ++i) od[i] = ad[ai(i)] * bd[bi(i)];
  if (tape.tracks({&a, &b})) {
    tape.record(out, [a, b, out, ai, bi]() mutable {
      const auto& go = out.grad();
      auto ad = a.data();
      auto bd = b.data();
      if (a.requires_grad()) {
        auto& ga = a.grad_buffer();
        for (std::size_t i = 0; i < go.size(); ++i) ga[ai(i)] += go[i] * bd[bi(i)];
      }
      if (b.requires_grad()) {
        auto& gb = b.grad_buffer();
        for (std::size_t i = 0; i < go.size(); ++i) gb[bi(i)] += go[i] * ad[ai(i)];
      }
    });
  }
  return out;
}

Tensor add_row(Tape& tape, const Tensor& x, const Tensor& bias) {
  require_rank2(x, "add_row");
  const std::size_t m = x.rows(), n = x.cols();
  if (bias.numel() != n) {
    throw DimensionError("add_row: bias " + shape_str(bias.shape()) + " does not fit rows of " +
                         shape_str(x.shape()));
  }
  Tensor out = make_like(x.shape());
  auto xd = x.data();
  auto bd = bias.data();
  auto od = out.mutable_data();
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) od[i * n + j] = xd[i * n + j] + bd[j];
  if (tape.tracks({&x, &bias})) {
    tape.record(out, [x, bias, out, m, n]() mutable {
      const auto& go = out.grad();
      if (x.requires_grad()) {
        auto& gx = x.grad_buffer();
        for (std::size_t i = 0; i < go.size(); ++i) gx[i] += go[i];
      }
      if (bias.requires_grad()) {
        auto& gb = bias.grad_buffer();
        for (std::size_t i = 0; i < m; ++i)
          for (std::size_t j = 0; j < n; ++j) gb[j] += go[i * n + j];
      }
    });
  }
  return out;
}

Tensor scale(Tape& tape, const Tensor& x, double factor) {
  return unary(tape, x, [factor](double v) { return v * factor; },
               [factor](const Tensor& in, const Tensor& out) {
                 auto& g = in.grad_buffer();
                 const auto& go = out.grad();
                 for (std::size_t i = 0; i < g.size(); ++i) g[i] += factor * go[i];
               });
}

Tensor neg(Tape& tape, const Tensor& x) { return scale(tape, x, -1.0); }

Tensor relu(Tape& tape, const Tensor& x) {
  return unary(tape, x, [](double v) { return v > 0.0 ? v : 0.0; },
               [](const Tensor& in, const Tensor& out) {
                 auto& g = in.grad_buffer();
                 auto xd = in.data();
                 const auto& go = out.grad();
                 for (std::size_t i = 0; i < g.size(); ++i)
                   if (xd[i] > 0.0) g[i] += go[i];
               });
}

Tensor exp(Tape& tape, const Tensor& x) {
  return unary(tape, x, [](double v) { return std::exp(v); },
               [](const Tensor& in, const Tensor& out) {
                 auto& g = in.grad_buffer();
                 auto od = out.data();
                 const auto& go = out.grad();
                 for (std::size_t i = 0; i < g.size(); ++i) g[i] += go[i] * od[i];
               });
}

Tensor log(Tape& tape, const Tensor& x) {
  for (double v : x.data()) {
    if (!(v > 0.0)) throw DomainError("log of nonpositive value " + std::to_string(v));
  }
  return unary(tape, x, [](double v) { return std::log(v); },
               [](const Tensor& in, const Tensor& out) {
                 auto& g = in.grad_buffer();
                 auto xd = in.data();
                 const auto& go = out.grad();
                 for (std::size_t i = 0; i < g.size(); ++i) g[i] += go[i] / xd[i];
               });
}

Tensor softmax_rows(Tape& tape, const Tensor& x) {
  const std::size_t m = x.rows(), n = x.cols();
  Tensor out = make_like(x.shape());
  auto xd = x.data();
  auto od = out.mutable_data();
  for (std::size_t i = 0; i < m; ++i) {
    const double* row = xd.data() + i * n;
    double* orow = od.data() + i * n;
    const double mx = *std::max_element(row, row + n);
    double total = 0.0;
    for (std::size_t j = 0; j < n; ++j) total += (orow[j] = std::exp(row[j] - mx));
    for (std::size_t j = 0; j < n; ++j) orow[j] /= total;
  }
  if (tape.tracks({&x})) {
    tape.record(out, [x, out, m, n]() mutable {
      auto& gx = x.grad_buffer();
      auto od = out.data();
      const auto& go = out.grad();
      for (std::size_t i = 0; i < m; ++i) {
        double dot = 0.0;
        for (std::size_t j = 0; j < n; ++j) dot += go[i * n + j] * od[i * n + j];
        for (std::size_t j = 0; j < n; ++j) gx[i * n + j] += od[i * n + j] * (go[i * n + j] - dot);
      }
    });
  }
  return out;
}

Tensor log_softmax_rows(Tape& tape, const Tensor& x) {
  const std::size_t m = x.rows(), n = x.cols();
  Tensor out = make_like(x.shape());
  auto xd = x.data();
  auto od = out.mutable_data();
  for (std::size_t i = 0; i < m; ++i) {
    const double* row = xd.data() + i * n;
    const double mx = *std::max_element(row, row + n);
    double total = 0.0;
    for (std::size_t j = 0; j < n; ++j) total += std::exp(row[j] - mx);
    const double lse = mx + std::log(total);
    for (std::size_t j = 0; j < n; ++j) od[i * n + j] = row[j] - lse;
  }
  if (tape.tracks({&x})) {
    tape.record(out, [x, out, m, n]() mutable {
      auto& gx = x.grad_buffer();
      auto od = out.data();
      const auto& go = out.grad();
      for (std::size_t i = 0; i < m; ++i) {
        double total = 0.0;
        for (std::size_t j = 0; j < n; ++j) total += go[i * n + j];
        for (std::size_t j = 0; j < n; ++j) gx[i * n + j] += go[i * n + j] - std::exp(od[i * n + j]) * total;
      }
    });
  }
  return out;
}

Tensor reduce(Tape& tape, const Tensor& x, std::optional<std::size_t> axis, ReduceKind kind) {
  if (axis && x.rank() != 2) throw DimensionError("reduce along an axis expects a matrix, got " + shape_str(x.shape()));
  if (axis && *axis > 1) throw DimensionError("reduce: axis " + std::to_string(*axis) + " out of range");
  // View x as outer × len × inner, reducing the middle extent.
  const std::size_t m = x.rows(), n = x.cols();
  std::size_t outer = 1, len = x.numel(), inner = 1;
  Shape out_shape{};
  if (axis && *axis == 0) {
    outer = 1, len = m, inner = n;
    out_shape = {1, n};
  } else if (axis && *axis == 1) {
    outer = m, len = n, inner = 1;
    out_shape = {m, 1};
  }
  if (len == 0) throw DimensionError("reduce over an empty axis");
  Tensor out = Tensor::zeros(out_shape);
  std::vector<std::size_t> arg(outer * inner, 0);
  auto xd = x.data();
  auto od = out.mutable_data();
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t in = 0; in < inner; ++in) {
      const std::size_t base = o * len * inner + in;
      double acc = xd[base];
      std::size_t best = 0;
      for (std::size_t t = 1; t < len; ++t) {
        const double v = xd[base + t * inner];
        switch (kind) {
          case ReduceKind::kSum:
          case ReduceKind::kMean:
            acc += v;
            break;
          case ReduceKind::kMax:
            if (v > acc) acc = v, best = t;
            break;
          case ReduceKind::kMin:
            if (v < acc) acc = v, best = t;
            break;
        }
      }
      if (kind == ReduceKind::kMean) acc /= static_cast<double>(len);
      od[o * inner + in] = acc;
      arg[o * inner + in] = best;
    }
  }
  if (tape.tracks({&x})) {
    tape.record(out, [x, out, arg = std::move(arg), outer, len, inner, kind]() mutable {
      auto& gx = x.grad_buffer();
      const auto& go = out.grad();
      for (std::size_t o = 0; o < outer; ++o) {
        for (std::size_t in = 0; in < inner; ++in) {
          const std::size_t base = o * len * inner + in;
          const double g = go[o * inner + in];
          if (kind == ReduceKind::kMax || kind == ReduceKind::kMin) {
            gx[base + arg[o * inner + in] * inner] += g;
          } else {
            const double share = kind == ReduceKind::kMean ? g / static_cast<double>(len) : g;
            for (std::size_t t = 0; t < len; ++t) gx[base + t * inner] += share;
          }
        }
      }
    });
  }
  return out;
}

Tensor concat_rows(Tape& tape, std::span<const Tensor> parts) {
  if (parts.empty()) throw DimensionError("concat_rows of nothing");
  const std::size_t n = parts[0].cols();
  std::size_t m = 0;
  for (const auto& p : parts) {
    require_rank2(p, "concat_rows");
    if (p.cols() != n) throw DimensionError("concat_rows: column mismatch " + shape_str(p.shape()));
    m += p.rows();
  }
  Tensor out = Tensor::zeros({m, n});
  auto od = out.mutable_data();
  std::size_t offset = 0;
  bool track = false;
  for (const auto& p : parts) {
    std::copy(p.data().begin(), p.data().end(), od.begin() + static_cast<std::ptrdiff_t>(offset));
    offset += p.numel();
    track = track || tape.tracks({&p});
  }
  if (track) {
    std::vector<Tensor> inputs(parts.begin(), parts.end());
    tape.record(out, [inputs, out]() mutable {
      const auto& go = out.grad();
      std::size_t offset = 0;
      for (auto& p : inputs) {
        if (p.requires_grad()) {
          auto& gp = p.grad_buffer();
          for (std::size_t i = 0; i < gp.size(); ++i) gp[i] += go[offset + i];
        }
        offset += p.numel();
      }
    });
  }
  return out;
}

Tensor concat_cols(Tape& tape, std::span<const Tensor> parts) {
  if (parts.empty()) throw DimensionError("concat_cols of nothing");
  const std::size_t m = parts[0].rows();
  std::size_t n = 0;
  for (const auto& p : parts) {
    require_rank2(p, "concat_cols");
    if (p.rows() != m) throw DimensionError("concat_cols: row mismatch " + shape_str(p.shape()));
    n += p.cols();
  }
  Tensor out = Tensor::zeros({m, n});
  auto od = out.mutable_data();
  std::size_t col = 0;
  bool track = false;
  for (const auto& p : parts) {
    const std::size_t w = p.cols();
    auto pd = p.data();
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < w; ++j) od[i * n + col + j] = pd[i * w + j];
    col += w;
    track = track || tape.tracks({&p});
  }
  if (track) {
    std::vector<Tensor> inputs(parts.begin(), parts.end());
    tape.record(out, [inputs, out, m, n]() mutable {
      const auto& go = out.grad();
      std::size_t col = 0;
      for (auto& p : inputs) {
        const std::size_t w = p.cols();
        if (p.requires_grad()) {
          auto& gp = p.grad_buffer();
          for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < w; ++j) gp[i * w + j] += go[i * n + col + j];
        }
        col += w;
      }
    });
  }
  return out;
}

Tensor slice_rows(Tape& tape, const Tensor& x, std::size_t begin, std::size_t end) {
  require_rank2(x, "slice_rows");
  if (begin >= end || end > x.rows()) {
    throw DimensionError("slice_rows [" + std::to_string(begin) + "," + std::to_string(end) + ") of " +
                         shape_str(x.shape()));
  }
  const std::size_t n = x.cols();
  auto xd = x.data();
  std::vector<double> vals(xd.begin() + static_cast<std::ptrdiff_t>(begin * n),
                           xd.begin() + static_cast<std::ptrdiff_t>(end * n));
  Tensor out = Tensor::from({end - begin, n}, std::move(vals));
  if (tape.tracks({&x})) {
    tape.record(out, [x, out, begin, n]() mutable {
      auto& gx = x.grad_buffer();
      const auto& go = out.grad();
      for (std::size_t i = 0; i < go.size(); ++i) gx[begin * n + i] += go[i];
    });
  }
  return out;
}

Tensor slice_cols(Tape& tape, const Tensor& x, std::size_t begin, std::size_t end) {
  require_rank2(x, "slice_cols");
  if (begin >= end || end > x.cols()) {
    throw DimensionError("slice_cols [" + std::to_string(begin) + "," + std::to_string(end) + ") of " +
                         shape_str(x.shape()));
  }
  const std::size_t m = x.rows(), n = x.cols(), w = end - begin;
  Tensor out = Tensor::zeros({m, w});
  auto xd = x.data();
  auto od = out.mutable_data();
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < w; ++j) od[i * w + j] = xd[i * n + begin + j];
  if (tape.tracks({&x})) {
    tape.record(out, [x, out, m, n, w, begin]() mutable {
      auto& gx = x.grad_buffer();
      const auto& go = out.grad();
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < w; ++j) gx[i * n + begin + j] += go[i * w + j];
    });
  }
  return out;
}

Tensor gather_rows(Tape& tape, const Tensor& table, std::span<const std::size_t> index) {
  require_rank2(table, "gather_rows");
  if (index.empty()) throw DimensionError("gather_rows with no indices");
  const std::size_t n = table.cols();
  Tensor out = Tensor::zeros({index.size(), n});
  auto td = table.data();
  auto od = out.mutable_data();
  for (std::size_t r = 0; r < index.size(); ++r) {
    if (index[r] >= table.rows()) {
      throw DimensionError("gather_rows: index " + std::to_string(index[r]) + " outside table " +
                           shape_str(table.shape()));
    }
    std::copy_n(td.begin() + static_cast<std::ptrdiff_t>(index[r] * n), n,
                od.begin() + static_cast<std::ptrdiff_t>(r * n));
  }
  if (tape.tracks({&table})) {
    std::vector<std::size_t> idx(index.begin(), index.end());
    tape.record(out, [table, out, idx = std::move(idx), n]() mutable {
      auto& gt = table.grad_buffer();
      const auto& go = out.grad();
      for (std::size_t r = 0; r < idx.size(); ++r)
        for (std::size_t j = 0; j < n; ++j) gt[idx[r] * n + j] += go[r * n + j];
    });
  }
  return out;
}

Tensor layer_norm_rows(Tape& tape, const Tensor& x, const Tensor& gamma, const Tensor& beta, double eps) {
  require_rank2(x, "layer_norm_rows");
  const std::size_t m = x.rows(), n = x.cols();
  if (gamma.numel() != n || beta.numel() != n) {
    throw DimensionError("layer_norm_rows: affine parameters do not match " + shape_str(x.shape()));
  }
  Tensor out = make_like(x.shape());
  std::vector<double> xhat(m * n), inv_std(m);
  auto xd = x.data();
  auto gd = gamma.data();
  auto bd = beta.data();
  auto od = out.mutable_data();
  for (std::size_t i = 0; i < m; ++i) {
    double mu = 0.0;
    for (std::size_t j = 0; j < n; ++j) mu += xd[i * n + j];
    mu /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t j = 0; j < n; ++j) var += (xd[i * n + j] - mu) * (xd[i * n + j] - mu);
    var /= static_cast<double>(n);
    inv_std[i] = 1.0 / std::sqrt(var + eps);
    for (std::size_t j = 0; j < n; ++j) {
      xhat[i * n + j] = (xd[i * n + j] - mu) * inv_std[i];
      od[i * n + j] = xhat[i * n + j] * gd[j] + bd[j];
    }
  }
  if (tape.tracks({&x, &gamma, &beta})) {
    tape.record(out, [x, gamma, beta, out, xhat = std::move(xhat), inv_std = std::move(inv_std), m, n]() mutable {
      const auto& go = out.grad();
      auto gd = gamma.data();
      if (gamma.requires_grad()) {
        auto& gg = gamma.grad_buffer();
        for (std::size_t i = 0; i < m; ++i)
          for (std::size_t j = 0; j < n; ++j) gg[j] += go[i * n + j] * xhat[i * n + j];
      }
      if (beta.requires_grad()) {
        auto& gb = beta.grad_buffer();
        for (std::size_t i = 0; i < m; ++i)
          for (std::size_t j = 0; j < n; ++j) gb[j] += go[i * n + j];
      }
      if (x.requires_grad()) {
        auto& gx = x.grad_buffer();
        const double inv_n = 1.0 / static_cast<double>(n);
        for (std::size_t i = 0; i < m; ++i) {
          double s1 = 0.0, s2 = 0.0;
          for (std::size_t j = 0; j < n; ++j) {
            const double gh = go[i * n + j] * gd[j];
            s1 += gh;
            s2 += gh * xhat[i * n + j];
          }
          for (std::size_t j = 0; j < n; ++j) {
            const double gh = go[i * n + j] * gd[j];
            gx[i * n + j] += inv_std[i] * (gh - inv_n * s1 - xhat[i * n + j] * inv_n * s2);
          }
        }
      }
    });
  }
  return out;
}

Tensor normalize_rows(Tape& tape, const Tensor& x) {
  require_rank2(x, "normalize_rows");
  const std::size_t m = x.rows(), n = x.cols();
  Tensor out = make_like(x.shape());
  std::vector<double> norms(m);
  auto xd = x.data();
  auto od = out.mutable_data();
  for (std::size_t i = 0; i < m; ++i) {
    double ss = 0.0;
    for (std::size_t j = 0; j < n; ++j) ss += xd[i * n + j] * xd[i * n + j];
    norms[i] = std::sqrt(ss);
    if (!(norms[i] > 0.0)) throw DegenerateEmbeddingError("embedding row " + std::to_string(i) + " has zero norm");
    for (std::size_t j = 0; j < n; ++j) od[i * n + j] = xd[i * n + j] / norms[i];
  }
  if (tape.tracks({&x})) {
    tape.record(out, [x, out, norms = std::move(norms), m, n]() mutable {
      auto& gx = x.grad_buffer();
      auto od = out.data();
      const auto& go = out.grad();
      for (std::size_t i = 0; i < m; ++i) {
        double dot = 0.0;
        for (std::size_t j = 0; j < n; ++j) dot += go[i * n + j] * od[i * n + j];
        for (std::size_t j = 0; j < n; ++j) gx[i * n + j] += (go[i * n + j] - od[i * n + j] * dot) / norms[i];
      }
    });
  }
  return out;
}

}  // namespace igcl
