// SPDX-FileCopyrightText: © 2026 igcl contributors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "igcl/tensor.hpp"

namespace igcl {

/// Cosine similarity S[i][k] between image row i and graph row k, [M x M].
/// Throws DegenerateEmbeddingError on a zero row.
Tensor similarity_matrix(Tape& tape, const Tensor& z_image, const Tensor& z_graph);

/// Per-pair image-to-graph InfoNCE: -log softmax(S[i,:] / tau)[i], [M x 1].
/// `tau` is a single-element tensor (possibly learnable).
Tensor loss_image_to_graph(Tape& tape, const Tensor& sim, const Tensor& tau);
/// Column-wise counterpart: InfoNCE over S[:, i].
Tensor loss_graph_to_image(Tape& tape, const Tensor& sim, const Tensor& tau);

/// Aligned embeddings of one batch and their similarity matrix.
struct PairBatch {
  Tensor z_image;  // [M x d_proj]
  Tensor z_graph;  // [M x d_proj]
  Tensor sim;      // [M x M]
  Tensor tau;      // scalar

  std::size_t size() const { return sim.rows(); }
};

PairBatch make_pair_batch(Tape& tape, const Tensor& z_image, const Tensor& z_graph, const Tensor& tau);

/// (1 / 2M) * sum_i (l_i^{image->graph} + l_i^{graph->image}).
Tensor total_loss(Tape& tape, const PairBatch& batch);
/// Same objective for a precomputed similarity matrix.
Tensor total_loss_from_similarity(Tape& tape, const Tensor& sim, const Tensor& tau);

}  // namespace igcl
