// SPDX-FileCopyrightText: © 2026 igcl contributors
//
// SPDX-License-Identifier: Apache-2.0

#include "igcl/contrastive.hpp"

namespace igcl {

Tensor similarity_matrix(Tape& tape, const Tensor& z_image, const Tensor& z_graph) {
  if (z_image.rank() != 2 || z_graph.rank() != 2 || z_image.shape() != z_graph.shape()) {
    throw DimensionError("similarity_matrix: embeddings " + shape_str(z_image.shape()) + " and " +
                         shape_str(z_graph.shape()) + " must be equal-shape matrices");
  }
  return matmul(tape, normalize_rows(tape, z_image), transpose(tape, normalize_rows(tape, z_graph)));
}

namespace {

Tensor diagonal_nll(Tape& tape, const Tensor& logits) {
  if (logits.rank() != 2 || logits.rows() != logits.cols()) {
    throw DimensionError("contrastive loss needs a square similarity matrix, got " + shape_str(logits.shape()));
  }
  const Tensor picked = mul(tape, log_softmax_rows(tape, logits), Tensor::eye(logits.rows()));
  return neg(tape, reduce(tape, picked, 1, ReduceKind::kSum));
}

Tensor scaled(Tape& tape, const Tensor& sim, const Tensor& tau) {
  if (tau.numel() != 1 || !(tau.item() > 0.0)) throw DomainError("temperature must be a positive scalar");
  return mul(tape, sim, exp(tape, neg(tape, log(tape, tau))));
}

}  // namespace

Tensor loss_image_to_graph(Tape& tape, const Tensor& sim, const Tensor& tau) {
  return diagonal_nll(tape, scaled(tape, sim, tau));
}

Tensor loss_graph_to_image(Tape& tape, const Tensor& sim, const Tensor& tau) {
  return diagonal_nll(tape, scaled(tape, transpose(tape, sim), tau));
}

PairBatch make_pair_batch(Tape& tape, const Tensor& z_image, const Tensor& z_graph, const Tensor& tau) {
  return {z_image, z_graph, similarity_matrix(tape, z_image, z_graph), tau};
}

Tensor total_loss_from_similarity(Tape& tape, const Tensor& sim, const Tensor& tau) {
  const double m = static_cast<double>(sim.rows());
  const Tensor both = add(tape, sum(tape, loss_image_to_graph(tape, sim, tau)),
                          sum(tape, loss_graph_to_image(tape, sim, tau)));
  return scale(tape, both, 1.0 / (2.0 * m));
}

Tensor total_loss(Tape& tape, const PairBatch& batch) { return total_loss_from_similarity(tape, batch.sim, batch.tau); }

}  // namespace igcl
