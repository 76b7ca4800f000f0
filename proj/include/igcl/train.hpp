// SPDX-FileCopyrightText: © 2026 igcl contributors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "igcl/config.hpp"
#include "igcl/params.hpp"
#include "igcl/probe.hpp"
#include "igcl/synth.hpp"

namespace igcl {

/// Both encoders plus the learnable temperature "contrastive.log_tau".
struct Model {
  ParamStore params;
  GraphEncoderConfig graph_cfg;
  ImageEncoderConfig image_cfg;
  GraphVariant variant = GraphVariant::kAttention;
  std::optional<AblationMode> ablation;

  double tau() const;
};

Model init_model(const TrainConfig& cfg);

/// A graph after the configured augmentation or ablation.
struct PreparedGraph {
  ReportGraph graph;
  std::optional<AblatedGraph> ablated;
};

PreparedGraph prepare_graph(const ReportGraph& g, GraphVariant variant, std::optional<AblationMode> ablation);
std::vector<PreparedGraph> prepare_graphs(const std::vector<PairedExample>& data, const Model& model);

Tensor encode_prepared(Tape& tape, const PreparedGraph& g, const Model& model);

/// Contrastive loss of the pairs `ids` (indices into `data` / `graphs`).
Tensor batch_loss(Tape& tape, const Model& model, const std::vector<PairedExample>& data,
                  const std::vector<PreparedGraph>& graphs, std::span<const std::size_t> ids);

/// Per-parameter optimiser state. Adam uses both moments, momentum only the
/// first, plain SGD neither.
class OptimizerState {
 public:
  explicit OptimizerState(const TrainConfig& cfg) : cfg_(cfg) {}
  void step(ParamStore& params);
  std::size_t steps_taken() const { return t_; }

 private:
  const TrainConfig& cfg_;
  std::map<std::string, std::vector<double>> m_, v_;
  std::size_t t_ = 0;
};

struct TrainResult {
  Model model;
  std::vector<double> loss_curve;  // batch loss before each update
  /// Loss on the first batch before training and after the last update.
  double initial_reference_loss = 0.0;
  double final_reference_loss = 0.0;
};

/// Contrastive pretraining on the examples `ids`. Batches are drawn without
/// replacement from a generator keyed on (seed, step). Throws DivergenceError
/// on a non-finite loss or parameter.
TrainResult pretrain(const TrainConfig& cfg, const std::vector<PairedExample>& data, std::span<const std::size_t> ids);

/// Frozen image features for the probe, one row per id.
FeatureMatrix image_embeddings(const Model& model, const std::vector<PairedExample>& data,
                               std::span<const std::size_t> ids, ProbeFeatures which);

std::vector<Labels> labels_of(const std::vector<PairedExample>& data, std::span<const std::size_t> ids);

void save_checkpoint(const std::filesystem::path& path, const Model& model);
void write_loss_curve(const std::filesystem::path& path, const std::vector<double>& curve);

}  // namespace igcl
