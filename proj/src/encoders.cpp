// SPDX-FileCopyrightText: © 2026 igcl contributors
//
// SPDX-License-Identifier: Apache-2.0

#include "igcl/encoders.hpp"

#include <array>
#include <cmath>
#include <set>

namespace igcl {

std::string_view to_string(ReadoutKind k) {
  switch (k) {
    case ReadoutKind::kMean: return "MEAN";
    case ReadoutKind::kMin: return "MIN";
    case ReadoutKind::kMax: return "MAX";
    case ReadoutKind::kGlobalAttention: return "GLOBAL_ATTENTION";
  }
  return "?";
}

ReadoutKind parse_readout(std::string_view s) {
  for (auto k : {ReadoutKind::kMean, ReadoutKind::kMin, ReadoutKind::kMax, ReadoutKind::kGlobalAttention})
    if (to_string(k) == s) return k;
  throw ConfigError("unknown readout '" + std::string(s) + "'");
}

namespace {

std::string rgcn_name(std::size_t layer, std::size_t slot) {
  return "graph.rgcn." + std::to_string(layer) + ".w" + std::to_string(slot);
}

void init_block(ParamStore& store, const std::string& prefix, std::size_t dim, std::size_t ff, std::mt19937_64& rng) {
  const double s = 1.0 / std::sqrt(static_cast<double>(dim));
  store.add_full(prefix + ".ln1.g", {dim}, 1.0);
  store.add(prefix + ".ln1.b", {dim});
  store.add_normal(prefix + ".wq", {dim, dim}, s, rng);
  store.add_normal(prefix + ".wk", {dim, dim}, s, rng);
  store.add_normal(prefix + ".wv", {dim, dim}, s, rng);
  store.add_normal(prefix + ".wo", {dim, dim}, s, rng);
  store.add(prefix + ".bo", {dim});
  store.add_full(prefix + ".ln2.g", {dim}, 1.0);
  store.add(prefix + ".ln2.b", {dim});
  store.add_normal(prefix + ".ff1.w", {dim, ff}, s, rng);
  store.add(prefix + ".ff1.b", {ff});
  store.add_normal(prefix + ".ff2.w", {ff, dim}, 1.0 / std::sqrt(static_cast<double>(ff)), rng);
  store.add(prefix + ".ff2.b", {dim});
}

void check_heads(std::size_t dim, std::size_t heads) {
  if (heads == 0 || dim % heads != 0) {
    throw ConfigError("head count " + std::to_string(heads) + " must divide model dimension " + std::to_string(dim));
  }
}

Tensor linear(Tape& tape, const Tensor& x, const Tensor& w, const Tensor& b) {
  return add_row(tape, matmul(tape, x, w), b);
}

}  // namespace

void init_graph_encoder(ParamStore& store, const GraphEncoderConfig& cfg, std::mt19937_64& rng) {
  const std::size_t d = cfg.dim;
  if (cfg.attention) check_heads(d, cfg.heads);
  const double s = 1.0 / std::sqrt(static_cast<double>(d));
  store.add_normal("graph.text_embedding", {kVocabSize, d}, 1.0, rng);
  store.add_normal("graph.type_embedding", {kNodeTypeCount, d}, 1.0, rng);
  for (std::size_t l = 0; l < cfg.layers; ++l)
    for (std::size_t slot = 0; slot < kRgcnWeightSets; ++slot) store.add_normal(rgcn_name(l, slot), {d, d}, s, rng);
  if (cfg.attention) {
    for (std::size_t b = 0; b < cfg.attention_blocks; ++b)
      init_block(store, "graph.attn." + std::to_string(b), d, cfg.ff_mult * d, rng);
  }
  if (cfg.readout == ReadoutKind::kGlobalAttention) store.add_normal("graph.readout.gate", {d, 1}, s, rng);
  if (cfg.triplet_table) store.add_normal("graph.triplet.relation", {kLearnedRelationCount, d}, 1.0, rng);
  store.add_normal("graph.proj.w", {d, cfg.proj_dim}, s, rng);
  store.add("graph.proj.b", {cfg.proj_dim});
}

void init_image_encoder(ParamStore& store, const ImageEncoderConfig& cfg, std::mt19937_64& rng) {
  const std::size_t d = cfg.dim;
  check_heads(d, cfg.heads);
  if (cfg.patch == 0 || cfg.image_size % cfg.patch != 0) throw ConfigError("patch size must divide image size");
  store.add_normal("image.patch.w", {cfg.patch_pixels(), d}, 1.0 / std::sqrt(static_cast<double>(cfg.patch_pixels())),
                   rng);
  store.add("image.patch.b", {d});
  store.add_normal("image.cls", {1, d}, 0.1, rng);
  store.add_normal("image.pos", {cfg.patch_count() + 1, d}, 0.1, rng);
  for (std::size_t b = 0; b < cfg.blocks; ++b) init_block(store, "image.block." + std::to_string(b), d, cfg.ff_mult * d, rng);
  store.add_full("image.ln_final.g", {d}, 1.0);
  store.add("image.ln_final.b", {d});
  store.add_normal("image.proj.w", {d, cfg.proj_dim}, 1.0 / std::sqrt(static_cast<double>(d)), rng);
  store.add("image.proj.b", {cfg.proj_dim});
}

// ---------------------------------------------------------------------------
// Graph encoder

Tensor embed_nodes(Tape& tape, const ReportGraph& g, const ParamStore& p) {
  std::vector<std::size_t> tokens, types;
  tokens.reserve(g.nodes.size());
  types.reserve(g.nodes.size());
  for (const auto& n : g.nodes) {
    if (n.token >= kVocabSize) throw DimensionError("token " + std::to_string(n.token) + " outside vocabulary");
    tokens.push_back(n.token);
    types.push_back(static_cast<std::size_t>(n.type));
  }
  return add(tape, gather_rows(tape, p.get("graph.text_embedding"), tokens),
             gather_rows(tape, p.get("graph.type_embedding"), types));
}

Tensor rgcn_layer(Tape& tape, const Tensor& h, const ReportGraph& g, const ParamStore& p, std::size_t layer,
                  double aug_link_scale) {
  const std::size_t n = g.nodes.size();
  if (h.rows() != n) throw DimensionError("node state rows do not match node count");

  // Adjacency per message slot: learned forward/inverse slots 1..6, then the
  // two AUG_LINK directions.
  constexpr std::size_t kAugForward = kRgcnWeightSets, kAugInverse = kRgcnWeightSets + 1;
  std::array<std::vector<std::vector<std::size_t>>, kRgcnWeightSets + 2> incoming;
  for (auto& slot : incoming) slot.assign(n, {});
  for (const auto& e : g.edges) {
    std::size_t fwd = 0, inv = 0;
    if (e.relation == Relation::kAugLink) {
      fwd = kAugForward;
      inv = kAugInverse;
    } else {
      const std::size_t r = e.relation == Relation::kGeneric ? 0 : static_cast<std::size_t>(e.relation);
      fwd = 1 + r;
      inv = 1 + kLearnedRelationCount + r;
    }
    incoming[fwd][e.dst].push_back(e.src);
    incoming[inv][e.src].push_back(e.dst);
  }

  auto mean_adjacency = [n](const std::vector<std::vector<std::size_t>>& in) {
    Tensor a = Tensor::zeros({n, n});
    auto ad = a.mutable_data();
    for (std::size_t v = 0; v < n; ++v) {
      const double w = in[v].empty() ? 0.0 : 1.0 / static_cast<double>(in[v].size());
      for (std::size_t u : in[v]) ad[v * n + u] += w;
    }
    return a;
  };
  auto has_edges = [](const std::vector<std::vector<std::size_t>>& in) {
    for (const auto& v : in)
      if (!v.empty()) return true;
    return false;
  };

  Tensor pre = matmul(tape, h, p.get(rgcn_name(layer, 0)));
  for (std::size_t slot = 1; slot < kRgcnWeightSets; ++slot) {
    if (!has_edges(incoming[slot])) continue;
    const Tensor msg = matmul(tape, mean_adjacency(incoming[slot]), matmul(tape, h, p.get(rgcn_name(layer, slot))));
    pre = add(tape, pre, msg);
  }
  if (aug_link_scale != 0.0) {
    for (std::size_t slot : {kAugForward, kAugInverse}) {
      if (!has_edges(incoming[slot])) continue;
      pre = add(tape, pre, scale(tape, matmul(tape, mean_adjacency(incoming[slot]), h), aug_link_scale));
    }
  }
  return relu(tape, pre);
}

Tensor transformer_block(Tape& tape, const Tensor& x, const ParamStore& p, const std::string& prefix,
                         std::size_t heads) {
  const std::size_t d = x.cols();
  check_heads(d, heads);
  const std::size_t dh = d / heads;
  const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(dh));

  const Tensor xn = layer_norm_rows(tape, x, p.get(prefix + ".ln1.g"), p.get(prefix + ".ln1.b"));
  const Tensor q = matmul(tape, xn, p.get(prefix + ".wq"));
  const Tensor k = matmul(tape, xn, p.get(prefix + ".wk"));
  const Tensor v = matmul(tape, xn, p.get(prefix + ".wv"));
  std::vector<Tensor> head_out;
  head_out.reserve(heads);
  for (std::size_t hi = 0; hi < heads; ++hi) {
    const Tensor qh = slice_cols(tape, q, hi * dh, (hi + 1) * dh);
    const Tensor kh = slice_cols(tape, k, hi * dh, (hi + 1) * dh);
    const Tensor vh = slice_cols(tape, v, hi * dh, (hi + 1) * dh);
    const Tensor weights = softmax_rows(tape, scale(tape, matmul(tape, qh, transpose(tape, kh)), inv_sqrt));
    head_out.push_back(matmul(tape, weights, vh));
  }
  const Tensor attended = linear(tape, concat_cols(tape, head_out), p.get(prefix + ".wo"), p.get(prefix + ".bo"));
  const Tensor x1 = add(tape, x, attended);

  const Tensor x1n = layer_norm_rows(tape, x1, p.get(prefix + ".ln2.g"), p.get(prefix + ".ln2.b"));
  const Tensor hidden = relu(tape, linear(tape, x1n, p.get(prefix + ".ff1.w"), p.get(prefix + ".ff1.b")));
  return add(tape, x1, linear(tape, hidden, p.get(prefix + ".ff2.w"), p.get(prefix + ".ff2.b")));
}

Tensor component_attention(Tape& tape, const Tensor& h, const ParamStore& p, std::size_t block, std::size_t heads) {
  return transformer_block(tape, h, p, "graph.attn." + std::to_string(block), heads);
}

Tensor readout(Tape& tape, const Tensor& h, ReadoutKind kind, const ParamStore& p) {
  if (h.rank() != 2 || h.rows() == 0) throw DimensionError("readout over an empty graph");
  switch (kind) {
    case ReadoutKind::kMean: return reduce(tape, h, 0, ReduceKind::kMean);
    case ReadoutKind::kMin: return reduce(tape, h, 0, ReduceKind::kMin);
    case ReadoutKind::kMax: return reduce(tape, h, 0, ReduceKind::kMax);
    case ReadoutKind::kGlobalAttention: {
      const Tensor scores = transpose(tape, matmul(tape, h, p.get("graph.readout.gate")));
      return matmul(tape, softmax_rows(tape, scores), h);
    }
  }
  throw ConfigError("bad readout kind");
}

Tensor graph_node_states(Tape& tape, const ReportGraph& g, const ParamStore& p, const GraphEncoderConfig& cfg) {
  Tensor h = embed_nodes(tape, g, p);
  for (std::size_t l = 0; l < cfg.layers; ++l) h = rgcn_layer(tape, h, g, p, l, cfg.aug_link_scale);
  if (cfg.attention) {
    for (std::size_t b = 0; b < cfg.attention_blocks; ++b) h = component_attention(tape, h, p, b, cfg.heads);
  }
  return h;
}

namespace {

Tensor graph_projection(Tape& tape, const Tensor& pooled, const ParamStore& p) {
  return linear(tape, pooled, p.get("graph.proj.w"), p.get("graph.proj.b"));
}

}  // namespace

Tensor encode_graph(Tape& tape, const ReportGraph& g, const ParamStore& p, const GraphEncoderConfig& cfg) {
  if (g.nodes.empty()) throw DataError("cannot encode a graph without nodes");
  const Tensor h = graph_node_states(tape, g, p, cfg);
  return graph_projection(tape, readout(tape, h, cfg.readout, p), p);
}

ReportGraph as_single_relation(const ReportGraph& g) {
  ReportGraph out = g;
  out.edges.clear();
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (const auto& e : g.edges) {
    if (e.relation == Relation::kAugLink) {
      out.edges.push_back(e);
    } else if (seen.emplace(e.src, e.dst).second) {
      out.edges.push_back({e.src, e.dst, Relation::kGeneric});
    }
  }
  return out;
}

Tensor encode_ablation(Tape& tape, const AblatedGraph& ablated, const ParamStore& p, const GraphEncoderConfig& cfg) {
  switch (ablated.mode) {
    case AblationMode::kDropNodeText:
    case AblationMode::kDropNodeType:
    case AblationMode::kDropRelationTypes:
      return encode_graph(tape, as_single_relation(ablated.graph), p, cfg);
    case AblationMode::kDropStructure: {
      if (!ablated.graph.edges.empty()) throw DataError("DROP_STRUCTURE input still has edges");
      const Tensor pooled = reduce(tape, embed_nodes(tape, ablated.graph, p), 0, ReduceKind::kMean);
      return graph_projection(tape, pooled, p);
    }
    case AblationMode::kTripletsOnly: {
      if (ablated.triples.empty()) throw DataError("graph '" + ablated.graph.graph_id + "' has no triples to encode");
      std::vector<std::size_t> src, dst, rel;
      for (const auto& t : ablated.triples) {
        if (t.relation == Relation::kAugLink) throw DataError("augmentation edges have no triplet embedding");
        src.push_back(t.src_token);
        dst.push_back(t.dst_token);
        rel.push_back(t.relation == Relation::kGeneric ? 0 : static_cast<std::size_t>(t.relation));
      }
      const Tensor& text = p.get("graph.text_embedding");
      const Tensor composed = sub(tape, add(tape, gather_rows(tape, text, src),
                                            gather_rows(tape, p.get("graph.triplet.relation"), rel)),
                                  gather_rows(tape, text, dst));
      return graph_projection(tape, reduce(tape, composed, 0, ReduceKind::kMean), p);
    }
  }
  throw ConfigError("bad ablation mode");
}

// ---------------------------------------------------------------------------
// Image encoder

Tensor extract_patches(const Image& img, const ImageEncoderConfig& cfg) {
  if (img.size != cfg.image_size || img.pixels.size() != cfg.image_size * cfg.image_size) {
    throw DimensionError("image must be " + std::to_string(cfg.image_size) + "x" + std::to_string(cfg.image_size) +
                         ", got " + std::to_string(img.pixels.size()) + " pixels");
  }
  const std::size_t side = cfg.patches_per_side(), ps = cfg.patch, n = cfg.image_size;
  Tensor patches = Tensor::zeros({cfg.patch_count(), cfg.patch_pixels()});
  auto out = patches.mutable_data();
  for (std::size_t pr = 0; pr < side; ++pr)
    for (std::size_t pc = 0; pc < side; ++pc)
      for (std::size_t i = 0; i < ps; ++i)
        for (std::size_t j = 0; j < ps; ++j)
          out[(pr * side + pc) * ps * ps + i * ps + j] = img.pixels[(pr * ps + i) * n + pc * ps + j];
  return patches;
}

Tensor image_tokens(Tape& tape, const Image& img, const ParamStore& p, const ImageEncoderConfig& cfg) {
  const Tensor patches = extract_patches(img, cfg);
  const Tensor& pos = p.get("image.pos");
  const Tensor tokens =
      add(tape, linear(tape, patches, p.get("image.patch.w"), p.get("image.patch.b")),
          slice_rows(tape, pos, 1, cfg.patch_count() + 1));
  const Tensor cls = add(tape, p.get("image.cls"), slice_rows(tape, pos, 0, 1));
  const std::array<Tensor, 2> parts{cls, tokens};
  return concat_rows(tape, parts);
}

Tensor image_features(Tape& tape, const Image& img, const ParamStore& p, const ImageEncoderConfig& cfg) {
  Tensor x = image_tokens(tape, img, p, cfg);
  for (std::size_t b = 0; b < cfg.blocks; ++b) x = transformer_block(tape, x, p, "image.block." + std::to_string(b), cfg.heads);
  return layer_norm_rows(tape, slice_rows(tape, x, 0, 1), p.get("image.ln_final.g"), p.get("image.ln_final.b"));
}

Tensor encode_image(Tape& tape, const Image& img, const ParamStore& p, const ImageEncoderConfig& cfg) {
  return linear(tape, image_features(tape, img, p, cfg), p.get("image.proj.w"), p.get("image.proj.b"));
}

}  // namespace igcl
