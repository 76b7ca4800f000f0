// SPDX-FileCopyrightText: © 2026 igcl contributors
//
// SPDX-License-Identifier: Apache-2.0

#include "igcl/config.hpp"

#include <set>

#include "json.hpp"

namespace igcl {

using json = nlohmann::json;

std::string_view to_string(GraphVariant v) {
  switch (v) {
    case GraphVariant::kAttention: return "ATTENTION";
    case GraphVariant::kDummy: return "DUMMY";
    case GraphVariant::kMeta: return "META";
    case GraphVariant::kPrimary: return "PRIMARY";
    case GraphVariant::kNone: return "NONE";
  }
  return "?";
}

GraphVariant parse_graph_variant(std::string_view s) {
  for (auto v : {GraphVariant::kAttention, GraphVariant::kDummy, GraphVariant::kMeta, GraphVariant::kPrimary,
                 GraphVariant::kNone})
    if (to_string(v) == s) return v;
  throw ConfigError("unknown graph variant '" + std::string(s) + "'");
}

namespace {

std::string_view optimizer_name(Optimizer o) {
  switch (o) {
    case Optimizer::kAdam: return "adam";
    case Optimizer::kSgd: return "sgd";
    case Optimizer::kMomentum: return "momentum";
  }
  return "?";
}

Optimizer parse_optimizer(std::string_view s) {
  for (auto o : {Optimizer::kAdam, Optimizer::kSgd, Optimizer::kMomentum})
    if (optimizer_name(o) == s) return o;
  throw ConfigError("unknown optimizer '" + std::string(s) + "'");
}

std::string_view features_name(ProbeFeatures f) { return f == ProbeFeatures::kProjection ? "projection" : "pooled"; }

ProbeFeatures parse_features(std::string_view s) {
  if (s == "projection") return ProbeFeatures::kProjection;
  if (s == "pooled") return ProbeFeatures::kPooled;
  throw ConfigError("unknown probe features '" + std::string(s) + "'");
}

}  // namespace

void TrainConfig::validate() const {
  auto positive = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(std::string(what) + " must be positive");
  };
  positive(batch_size >= 1, "batch_size");
  positive(learning_rate > 0, "learning_rate");
  positive(tau_init > 0, "tau_init");
  positive(dim > 0 && proj_dim > 0 && image_dim > 0, "encoder dimensions");
  positive(heads > 0 && image_heads > 0, "head counts");
  positive(dataset_size > 0, "dataset_size");
  positive(bootstrap > 0, "bootstrap");
  positive(seeds > 0, "seeds");
  if (variant == GraphVariant::kAttention && dim % heads != 0) throw ConfigError("heads must divide dim");
  if (image_dim % image_heads != 0) throw ConfigError("image_heads must divide image_dim");
  if (beta1 < 0 || beta1 >= 1 || beta2 < 0 || beta2 >= 1) throw ConfigError("Adam betas must lie in [0, 1)");
  if (ensemble_members < 2) throw ConfigError("ensemble_members must be at least 2");
}

GraphEncoderConfig TrainConfig::graph_encoder() const {
  GraphEncoderConfig g;
  g.dim = dim;
  g.proj_dim = proj_dim;
  g.layers = rgcn_layers;
  g.attention_blocks = attention_blocks;
  g.heads = heads;
  g.attention = variant == GraphVariant::kAttention;
  g.readout = readout;
  g.aug_link_scale = aug_link_scale;
  g.triplet_table = ablation == AblationMode::kTripletsOnly;
  return g;
}

ImageEncoderConfig TrainConfig::image_encoder() const {
  ImageEncoderConfig c;
  c.dim = image_dim;
  c.proj_dim = proj_dim;
  c.blocks = image_blocks;
  c.heads = image_heads;
  return c;
}

SynthConfig TrainConfig::synth_config() const {
  SynthConfig s = synth;
  s.mode = data_mode;
  return s;
}

TrainConfig config_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  TrainConfig c;
  std::set<std::string> used;
  auto opt = [&](const char* key, auto& target) {
    auto it = doc.find(key);
    if (it == doc.end()) return;
    used.insert(key);
    try {
      it->get_to(target);
    } catch (const json::exception& e) {
      throw ConfigError(std::string("config key '") + key + "': " + e.what());
    }
  };
  auto opt_str = [&](const char* key, auto parse, auto& target) {
    std::string s;
    if (!doc.contains(key)) return;
    opt(key, s);
    target = parse(s);
  };

  opt("seed", c.seed);
  opt("data_seed", c.data_seed);
  opt("batch_size", c.batch_size);
  opt("steps", c.steps);
  opt("learning_rate", c.learning_rate);
  opt_str("optimizer", parse_optimizer, c.optimizer);
  opt("beta1", c.beta1);
  opt("beta2", c.beta2);
  opt("momentum", c.momentum);
  opt("tau_init", c.tau_init);
  opt("learn_tau", c.learn_tau);
  opt("dim", c.dim);
  opt("proj_dim", c.proj_dim);
  opt("rgcn_layers", c.rgcn_layers);
  opt("attention_blocks", c.attention_blocks);
  opt("heads", c.heads);
  opt("image_dim", c.image_dim);
  opt("image_blocks", c.image_blocks);
  opt("image_heads", c.image_heads);
  opt_str("readout", parse_readout, c.readout);
  opt_str("variant", parse_graph_variant, c.variant);
  if (doc.contains("ablation")) {
    std::string s;
    opt("ablation", s);
    if (s == "NONE") c.ablation.reset();
    else c.ablation = parse_ablation_mode(s);
  }
  opt("aug_link_scale", c.aug_link_scale);
  opt_str("data_mode", parse_data_mode, c.data_mode);
  opt("dataset_size", c.dataset_size);
  opt("pretrain_fraction", c.split.pretrain_fraction);
  opt("test_fraction", c.split.test_fraction);
  opt("probe_fraction", c.split.probe_fraction);
  opt("label_rates", c.synth.rates);
  opt("background_noise", c.synth.background_noise);
  opt("jitter", c.synth.jitter);
  opt("blob_radius", c.synth.blob_radius);
  opt("negation_rate", c.synth.negation_rate);
  opt("suggestion_rate", c.synth.suggestion_rate);
  opt_str("probe_features", parse_features, c.probe_features);
  opt("probe_l2", c.probe_l2);
  opt("bootstrap", c.bootstrap);
  opt("seeds", c.seeds);
  opt("ensemble_members", c.ensemble_members);
  opt("repetitions", c.repetitions);
  opt("out_dir", c.out_dir);

  for (const auto& [key, _] : doc.items()) {
    if (!used.count(key)) throw ConfigError("unknown config key '" + key + "'");
  }
  c.validate();
  return c;
}

std::string config_to_json(const TrainConfig& c) {
  json doc;
  doc["seed"] = c.seed;
  doc["data_seed"] = c.data_seed;
  doc["batch_size"] = c.batch_size;
  doc["steps"] = c.steps;
  doc["learning_rate"] = c.learning_rate;
  doc["optimizer"] = std::string(optimizer_name(c.optimizer));
  doc["beta1"] = c.beta1;
  doc["beta2"] = c.beta2;
  doc["momentum"] = c.momentum;
  doc["tau_init"] = c.tau_init;
  doc["learn_tau"] = c.learn_tau;
  doc["dim"] = c.dim;
  doc["proj_dim"] = c.proj_dim;
  doc["rgcn_layers"] = c.rgcn_layers;
  doc["attention_blocks"] = c.attention_blocks;
  doc["heads"] = c.heads;
  doc["image_dim"] = c.image_dim;
  doc["image_blocks"] = c.image_blocks;
  doc["image_heads"] = c.image_heads;
  doc["readout"] = std::string(to_string(c.readout));
  doc["variant"] = std::string(to_string(c.variant));
  doc["ablation"] = c.ablation ? std::string(to_string(*c.ablation)) : std::string("NONE");
  doc["aug_link_scale"] = c.aug_link_scale;
  doc["data_mode"] = std::string(to_string(c.data_mode));
  doc["dataset_size"] = c.dataset_size;
  doc["pretrain_fraction"] = c.split.pretrain_fraction;
  doc["test_fraction"] = c.split.test_fraction;
  doc["probe_fraction"] = c.split.probe_fraction;
  doc["label_rates"] = c.synth.rates;
  doc["background_noise"] = c.synth.background_noise;
  doc["jitter"] = c.synth.jitter;
  doc["blob_radius"] = c.synth.blob_radius;
  doc["negation_rate"] = c.synth.negation_rate;
  doc["suggestion_rate"] = c.synth.suggestion_rate;
  doc["probe_features"] = std::string(features_name(c.probe_features));
  doc["probe_l2"] = c.probe_l2;
  doc["bootstrap"] = c.bootstrap;
  doc["seeds"] = c.seeds;
  doc["ensemble_members"] = c.ensemble_members;
  doc["repetitions"] = c.repetitions;
  doc["out_dir"] = c.out_dir;
  return doc.dump(2);
}

}  // namespace igcl
