// SPDX-FileCopyrightText: © 2026 igcl contributors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "igcl/encoders.hpp"
#include "igcl/graph.hpp"
#include "igcl/synth.hpp"

namespace igcl {

/// How the graph encoder handles disconnected components.
enum class GraphVariant { kAttention, kDummy, kMeta, kPrimary, kNone };
std::string_view to_string(GraphVariant v);
GraphVariant parse_graph_variant(std::string_view s);

enum class Optimizer { kAdam, kSgd, kMomentum };

enum class ProbeFeatures { kProjection, kPooled };

struct TrainConfig {
  std::uint64_t seed = 0;
  std::uint64_t data_seed = 1;

  // Optimisation
  std::size_t batch_size = 16;
  std::size_t steps = 200;
  double learning_rate = 3e-4;
  Optimizer optimizer = Optimizer::kAdam;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double momentum = 0.9;  // kMomentum only
  double tau_init = 0.07;
  bool learn_tau = true;

  // Architecture
  std::size_t dim = 64;
  std::size_t proj_dim = 32;
  std::size_t rgcn_layers = 2;
  std::size_t attention_blocks = 1;
  std::size_t heads = 4;
  std::size_t image_dim = 64;
  std::size_t image_blocks = 1;
  std::size_t image_heads = 4;
  ReadoutKind readout = ReadoutKind::kMax;
  GraphVariant variant = GraphVariant::kAttention;
  std::optional<AblationMode> ablation;
  double aug_link_scale = 1.0;

  // Data
  DataMode data_mode = DataMode::kStandard;
  std::size_t dataset_size = 2000;
  SplitConfig split;
  SynthConfig synth;

  // Evaluation
  ProbeFeatures probe_features = ProbeFeatures::kProjection;
  double probe_l2 = 1e-2;
  std::size_t bootstrap = 1000;
  std::size_t seeds = 5;             // comparison drivers
  std::size_t ensemble_members = 10;
  std::size_t repetitions = 10;      // ensemble repetitions

  std::string out_dir = "out";

  void validate() const;
  GraphEncoderConfig graph_encoder() const;
  ImageEncoderConfig image_encoder() const;
  SynthConfig synth_config() const;
};

/// Reads a JSON object; keys omitted keep their defaults, unknown keys throw.
TrainConfig config_from_json(const std::string& text);
std::string config_to_json(const TrainConfig& cfg);

}  // namespace igcl
