// SPDX-FileCopyrightText: © 2026 igcl contributors
//
// SPDX-License-Identifier: Apache-2.0

#include "igcl/train.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <random>
#include <sstream>

#include "igcl/contrastive.hpp"
#include "igcl/errors.hpp"

namespace igcl {

namespace {

constexpr const char* kLogTau = "contrastive.log_tau";

std::vector<std::size_t> draw_batch(std::span<const std::size_t> ids, std::size_t m, std::uint64_t seed,
                                    std::uint64_t step) {
  std::vector<std::size_t> pool(ids.begin(), ids.end());
  std::mt19937_64 rng(mix_seed(seed, 0x5EED0000ull + step));
  const std::size_t take = std::min(m, pool.size());
  for (std::size_t i = 0; i < take; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
    std::swap(pool[i], pool[pick(rng)]);
  }
  pool.resize(take);
  return pool;
}

}  // namespace

double Model::tau() const { return std::exp(params.get(kLogTau).item()); }

Model init_model(const TrainConfig& cfg) {
  cfg.validate();
  Model m;
  m.graph_cfg = cfg.graph_encoder();
  m.image_cfg = cfg.image_encoder();
  m.variant = cfg.variant;
  m.ablation = cfg.ablation;
  std::mt19937_64 graph_rng(mix_seed(cfg.seed, 0x6A11ull));
  std::mt19937_64 image_rng(mix_seed(cfg.seed, 0x1A6Eull));
  init_graph_encoder(m.params, m.graph_cfg, graph_rng);
  init_image_encoder(m.params, m.image_cfg, image_rng);
  m.params.add_full(kLogTau, {}, std::log(cfg.tau_init));
  return m;
}

PreparedGraph prepare_graph(const ReportGraph& g, GraphVariant variant, std::optional<AblationMode> ablation) {
  PreparedGraph out;
  switch (variant) {
    case GraphVariant::kDummy: out.graph = augment(g, AugmentStrategy::kDummy); break;
    case GraphVariant::kMeta: out.graph = augment(g, AugmentStrategy::kMeta); break;
    case GraphVariant::kPrimary: out.graph = augment(g, AugmentStrategy::kPrimary); break;
    case GraphVariant::kAttention:
    case GraphVariant::kNone: out.graph = g; break;
  }
  if (ablation) out.ablated = ablate(out.graph, *ablation);
  return out;
}

std::vector<PreparedGraph> prepare_graphs(const std::vector<PairedExample>& data, const Model& model) {
  std::vector<PreparedGraph> out;
  out.reserve(data.size());
  for (const auto& ex : data) out.push_back(prepare_graph(ex.graph, model.variant, model.ablation));
  return out;
}

Tensor encode_prepared(Tape& tape, const PreparedGraph& g, const Model& model) {
  if (g.ablated) return encode_ablation(tape, *g.ablated, model.params, model.graph_cfg);
  return encode_graph(tape, g.graph, model.params, model.graph_cfg);
}

Tensor batch_loss(Tape& tape, const Model& model, const std::vector<PairedExample>& data,
                  const std::vector<PreparedGraph>& graphs, std::span<const std::size_t> ids) {
  if (ids.empty()) throw DataError("empty batch");
  std::vector<Tensor> zi, zg;
  zi.reserve(ids.size());
  zg.reserve(ids.size());
  for (std::size_t id : ids) {
    zi.push_back(encode_image(tape, data.at(id).image, model.params, model.image_cfg));
    zg.push_back(encode_prepared(tape, graphs.at(id), model));
  }
  const Tensor tau = exp(tape, model.params.get(kLogTau));
  return total_loss(tape, make_pair_batch(tape, concat_rows(tape, zi), concat_rows(tape, zg), tau));
}

void OptimizerState::step(ParamStore& params) {
  ++t_;
  const double lr = cfg_.learning_rate;
  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  for (auto& [name, p] : params) {
    if (!p.has_grad()) continue;
    if (name == kLogTau && !cfg_.learn_tau) continue;
    const auto g = p.grad();
    auto w = p.mutable_data();
    switch (cfg_.optimizer) {
      case Optimizer::kSgd:
        for (std::size_t i = 0; i < w.size(); ++i) w[i] -= lr * g[i];
        break;
      case Optimizer::kMomentum: {
        auto& m = m_[name];
        m.resize(w.size(), 0.0);
        for (std::size_t i = 0; i < w.size(); ++i) {
          m[i] = cfg_.momentum * m[i] + g[i];
          w[i] -= lr * m[i];
        }
        break;
      }
      case Optimizer::kAdam: {
        auto& m = m_[name];
        auto& v = v_[name];
        m.resize(w.size(), 0.0);
        v.resize(w.size(), 0.0);
        for (std::size_t i = 0; i < w.size(); ++i) {
          m[i] = cfg_.beta1 * m[i] + (1.0 - cfg_.beta1) * g[i];
          v[i] = cfg_.beta2 * v[i] + (1.0 - cfg_.beta2) * g[i] * g[i];
          w[i] -= lr * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + 1e-8);
        }
        break;
      }
    }
  }
}

TrainResult pretrain(const TrainConfig& cfg, const std::vector<PairedExample>& data,
                     std::span<const std::size_t> ids) {
  if (ids.empty()) throw DataError("pretraining set is empty");
  TrainResult result{init_model(cfg), {}, 0.0, 0.0};
  Model& model = result.model;
  const auto graphs = prepare_graphs(data, model);
  const auto reference = draw_batch(ids, cfg.batch_size, cfg.seed, 0);

  auto eval_reference = [&] {
    Tape tape(false);
    return batch_loss(tape, model, data, graphs, reference).item();
  };
  result.initial_reference_loss = eval_reference();

  OptimizerState opt(cfg);
  result.loss_curve.reserve(cfg.steps);
  for (std::size_t step = 0; step < cfg.steps; ++step) {
    const auto batch = draw_batch(ids, cfg.batch_size, cfg.seed, step);
    model.params.zero_grad();
    Tape tape;
    const Tensor loss = batch_loss(tape, model, data, graphs, batch);
    const double value = loss.item();
    if (!std::isfinite(value)) {
      std::ostringstream os;
      os << "loss became " << value << " at step " << step << " (tau " << model.tau() << ")";
      throw DivergenceError(os.str());
    }
    result.loss_curve.push_back(value);
    tape.backward(loss);
    opt.step(model.params);
    if (!model.params.all_finite()) {
      throw DivergenceError("non-finite parameter after step " + std::to_string(step));
    }
  }
  result.final_reference_loss = cfg.steps ? eval_reference() : result.initial_reference_loss;
  return result;
}

FeatureMatrix image_embeddings(const Model& model, const std::vector<PairedExample>& data,
                               std::span<const std::size_t> ids, ProbeFeatures which) {
  FeatureMatrix fm;
  fm.rows = ids.size();
  fm.cols = which == ProbeFeatures::kProjection ? model.image_cfg.proj_dim : model.image_cfg.dim;
  fm.values.reserve(fm.rows * fm.cols);
  for (std::size_t id : ids) {
    Tape tape(false);
    const Image& img = data.at(id).image;
    const Tensor z = which == ProbeFeatures::kProjection ? encode_image(tape, img, model.params, model.image_cfg)
                                                         : image_features(tape, img, model.params, model.image_cfg);
    const auto v = z.data();
    fm.values.insert(fm.values.end(), v.begin(), v.end());
  }
  return fm;
}

std::vector<Labels> labels_of(const std::vector<PairedExample>& data, std::span<const std::size_t> ids) {
  std::vector<Labels> out;
  out.reserve(ids.size());
  for (std::size_t id : ids) out.push_back(data.at(id).labels);
  return out;
}

void save_checkpoint(const std::filesystem::path& path, const Model& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  model.params.save(out);
}

void write_loss_curve(const std::filesystem::path& path, const std::vector<double>& curve) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << std::setprecision(12) << "step,loss\n";
  for (std::size_t i = 0; i < curve.size(); ++i) out << i << ',' << curve[i] << '\n';
}

}  // namespace igcl
