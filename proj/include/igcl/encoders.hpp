// SPDX-FileCopyrightText: © 2026 igcl contributors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "igcl/graph.hpp"
#include "igcl/params.hpp"
#include "igcl/tensor.hpp"

namespace igcl {

enum class ReadoutKind { kMean, kMin, kMax, kGlobalAttention };

std::string_view to_string(ReadoutKind k);
ReadoutKind parse_readout(std::string_view s);

struct GraphEncoderConfig {
  std::size_t dim = 64;
  std::size_t proj_dim = 32;
  std::size_t layers = 2;            // RGCN layers
  std::size_t attention_blocks = 1;  // used only when attention is on
  std::size_t heads = 4;
  std::size_t ff_mult = 2;
  bool attention = true;
  ReadoutKind readout = ReadoutKind::kMax;
  /// AUG_LINK messages pass neighbour states through `aug_link_scale * I`.
  /// There is no learned relation transform for them.
  double aug_link_scale = 1.0;
  /// Adds the translational relation table used by the triplet ablation.
  bool triplet_table = false;
};

struct ImageEncoderConfig {
  std::size_t image_size = 32;
  std::size_t patch = 4;
  std::size_t dim = 64;
  std::size_t proj_dim = 32;
  std::size_t blocks = 1;
  std::size_t heads = 4;
  std::size_t ff_mult = 2;

  std::size_t patches_per_side() const { return image_size / patch; }
  std::size_t patch_count() const { return patches_per_side() * patches_per_side(); }
  std::size_t patch_pixels() const { return patch * patch; }
};

/// Grayscale image, row-major pixels in [0, 1].
struct Image {
  std::size_t size = 32;
  std::vector<double> pixels;
};

// ---------------------------------------------------------------------------
// Parameter registration. Names are prefixed with "graph." / "image.".

void init_graph_encoder(ParamStore& store, const GraphEncoderConfig& cfg, std::mt19937_64& rng);
void init_image_encoder(ParamStore& store, const ImageEncoderConfig& cfg, std::mt19937_64& rng);

/// Number of learned RGCN transforms per layer: self + forward + inverse.
inline constexpr std::size_t kRgcnWeightSets = 2 * kLearnedRelationCount + 1;

// ---------------------------------------------------------------------------
// Graph encoder stages

/// H0[v] = text_embedding[token(v)] + type_embedding[type(v)].
Tensor embed_nodes(Tape& tape, const ReportGraph& g, const ParamStore& p);

/// Mean-normalised relational convolution over forward and inverse
/// relations. GENERIC edges use the first relation's weights; AUG_LINK edges
/// use the fixed scaled identity.
Tensor rgcn_layer(Tape& tape, const Tensor& h, const ReportGraph& g, const ParamStore& p, std::size_t layer,
                  double aug_link_scale);

/// Pre-norm transformer encoder block over the node set, no positional
/// encoding. `prefix` selects the block's parameters.
Tensor transformer_block(Tape& tape, const Tensor& x, const ParamStore& p, const std::string& prefix,
                         std::size_t heads);

Tensor component_attention(Tape& tape, const Tensor& h, const ParamStore& p, std::size_t block, std::size_t heads);

/// Graph-level vector [1 x d].
Tensor readout(Tape& tape, const Tensor& h, ReadoutKind kind, const ParamStore& p);

/// Node states after the RGCN stack and optional attention, [n x d].
Tensor graph_node_states(Tape& tape, const ReportGraph& g, const ParamStore& p, const GraphEncoderConfig& cfg);

/// Z_G, [1 x proj_dim], not normalised.
Tensor encode_graph(Tape& tape, const ReportGraph& g, const ParamStore& p, const GraphEncoderConfig& cfg);

/// Encodes a graph prepared by ablate(). Text/type/relation ablations run the
/// single-relation GCN; DROP_STRUCTURE averages node embeddings;
/// TRIPLETS_ONLY averages e_src + r_rel - e_dst over triples.
Tensor encode_ablation(Tape& tape, const AblatedGraph& ablated, const ParamStore& p, const GraphEncoderConfig& cfg);

/// All relations mapped to GENERIC, parallel edges merged.
ReportGraph as_single_relation(const ReportGraph& g);

// ---------------------------------------------------------------------------
// Image encoder

/// [patch_count x patch_pixels] matrix of flattened patches.
Tensor extract_patches(const Image& img, const ImageEncoderConfig& cfg);

/// Token matrix entering the first transformer block, [(patches+1) x d].
Tensor image_tokens(Tape& tape, const Image& img, const ParamStore& p, const ImageEncoderConfig& cfg);

/// Final class-slot state after the last block and layer norm, [1 x d].
Tensor image_features(Tape& tape, const Image& img, const ParamStore& p, const ImageEncoderConfig& cfg);

/// Z_I, [1 x proj_dim], not normalised.
Tensor encode_image(Tape& tape, const Image& img, const ParamStore& p, const ImageEncoderConfig& cfg);

}  // namespace igcl
