// SPDX-FileCopyrightText: © 2026 igcl contributors
//
// SPDX-License-Identifier: Apache-2.0

#include "igcl/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <sstream>

#include "igcl/errors.hpp"

namespace igcl {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

LogisticOptions probe_options(const TrainConfig& cfg) {
  LogisticOptions o;
  o.l2 = cfg.probe_l2;
  return o;
}

FeatureMatrix all_features(const Model& model, const TrainConfig& cfg, const std::vector<PairedExample>& data) {
  std::vector<std::size_t> ids(data.size());
  std::iota(ids.begin(), ids.end(), std::size_t{0});
  return image_embeddings(model, data, ids, cfg.probe_features);
}

FeatureMatrix subset(const FeatureMatrix& all, std::span<const std::size_t> ids) {
  FeatureMatrix out;
  out.rows = ids.size();
  out.cols = all.cols;
  out.values.reserve(out.rows * out.cols);
  for (std::size_t id : ids) out.values.insert(out.values.end(), all.row(id), all.row(id) + all.cols);
  return out;
}

EvalReport quick_eval(const ProbeOutput& out, const std::vector<Labels>& test_y) {
  EvalOptions o;
  o.bootstrap = 0;
  return evaluate(out, test_y, o);
}

VariantRun summarize(const std::string& name, std::uint64_t seed, const EvalReport& r) {
  VariantRun run{name, seed, {}, r.mean_auroc};
  for (std::size_t l = 0; l < kLabelCount; ++l) run.auroc[l] = r.labels[l].skipped ? kNaN : r.labels[l].auroc;
  return run;
}

Partitions base_partitions(const TrainConfig& cfg, const std::vector<PairedExample>& data) {
  return split(data, SplitScheme::kProbe1Pct, cfg.data_seed, cfg.split);
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

}  // namespace

std::vector<PairedExample> generate_for(const TrainConfig& cfg) {
  return generate(cfg.data_seed, cfg.dataset_size, cfg.synth_config());
}

ProbeOutput probe_model(const Model& model, const TrainConfig& cfg, const std::vector<PairedExample>& data,
                        std::span<const std::size_t> train_ids, std::span<const std::size_t> test_ids) {
  return fit_probe(image_embeddings(model, data, train_ids, cfg.probe_features), labels_of(data, train_ids),
                   image_embeddings(model, data, test_ids, cfg.probe_features), probe_options(cfg));
}

ProbeRun pretrain_and_probe(const TrainConfig& cfg, const std::vector<PairedExample>& data, const Partitions& parts) {
  ProbeRun run{pretrain(cfg, data, parts.pretrain), parts, {}};
  const ProbeOutput out = probe_model(run.train.model, cfg, data, parts.probe_train, parts.test);
  EvalOptions eo;
  eo.bootstrap = cfg.bootstrap;
  eo.seed = cfg.seed;
  run.report = evaluate(out, labels_of(data, parts.test), eo);
  return run;
}

// ---------------------------------------------------------------------------
// Comparison tables

std::vector<double> ComparisonTable::values_of(const std::string& variant, int label) const {
  std::vector<double> v;
  for (const auto& r : runs) {
    if (r.variant != variant) continue;
    const double x = label < 0 ? r.mean_auroc : r.auroc[static_cast<std::size_t>(label)];
    if (!std::isnan(x)) v.push_back(x);
  }
  return v;
}

double ComparisonTable::mean_of(const std::string& variant, int label) const {
  const auto v = values_of(variant, label);
  if (v.empty()) return kNaN;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

std::string ComparisonTable::runs_csv() const {
  std::ostringstream os;
  os << std::setprecision(10) << "variant,seed";
  for (std::size_t l = 0; l < kLabelCount; ++l) os << ",auroc_" << l;
  os << ",mean_auroc\n";
  for (const auto& r : runs) {
    os << r.variant << ',' << r.seed;
    for (double a : r.auroc) {
      os << ',';
      if (!std::isnan(a)) os << a;
    }
    os << ',' << r.mean_auroc << '\n';
  }
  return os.str();
}

std::string ComparisonTable::summary_csv(std::size_t resamples, std::uint64_t seed) const {
  std::ostringstream os;
  os << std::setprecision(10) << "variant,metric,mean,ci_lo,ci_hi,seeds\n";
  for (std::size_t vi = 0; vi < variants.size(); ++vi) {
    for (int label = -1; label < static_cast<int>(kLabelCount); ++label) {
      const auto v = values_of(variants[vi], label);
      if (v.empty()) continue;
      const double m = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
      const Interval ci = bootstrap_mean_ci(v, resamples, mix_seed(seed, vi * 16 + static_cast<std::size_t>(label + 1)));
      os << variants[vi] << ',' << (label < 0 ? std::string("mean_auroc") : "auroc_" + std::to_string(label)) << ','
         << m << ',' << std::min(ci.lo, m) << ',' << std::max(ci.hi, m) << ',' << v.size() << '\n';
    }
  }
  return os.str();
}

ComparisonTable compare_augmentations(const TrainConfig& base, const std::vector<PairedExample>& data,
                                      const Progress& progress) {
  const Partitions parts = base_partitions(base, data);
  const auto test_y = labels_of(data, parts.test);
  ComparisonTable table;
  const GraphVariant order[] = {GraphVariant::kAttention, GraphVariant::kDummy, GraphVariant::kMeta,
                                GraphVariant::kPrimary, GraphVariant::kNone};
  for (auto v : order) table.variants.emplace_back(to_string(v));
  for (std::size_t s = 0; s < base.seeds; ++s) {
    for (auto v : order) {
      TrainConfig cfg = base;
      cfg.seed = base.seed + s;
      cfg.variant = v;
      cfg.ablation.reset();
      const TrainResult tr = pretrain(cfg, data, parts.pretrain);
      const auto out = probe_model(tr.model, cfg, data, parts.probe_train, parts.test);
      table.runs.push_back(summarize(std::string(to_string(v)), cfg.seed, quick_eval(out, test_y)));
      if (progress) {
        std::ostringstream os;
        os << to_string(v) << " seed " << cfg.seed << " mean " << table.runs.back().mean_auroc;
        progress(os.str());
      }
    }
  }
  return table;
}

ComparisonTable run_ablations(const TrainConfig& base, const std::vector<PairedExample>& data,
                              const Progress& progress) {
  const Partitions parts = base_partitions(base, data);
  const auto test_y = labels_of(data, parts.test);
  const std::optional<AblationMode> order[] = {std::nullopt,
                                               AblationMode::kDropNodeText,
                                               AblationMode::kDropNodeType,
                                               AblationMode::kDropRelationTypes,
                                               AblationMode::kDropStructure,
                                               AblationMode::kTripletsOnly};
  ComparisonTable table;
  for (const auto& a : order) table.variants.emplace_back(a ? std::string(to_string(*a)) : std::string("FULL"));
  for (std::size_t s = 0; s < base.seeds; ++s) {
    for (std::size_t i = 0; i < std::size(order); ++i) {
      TrainConfig cfg = base;
      cfg.seed = base.seed + s;
      cfg.ablation = order[i];
      const TrainResult tr = pretrain(cfg, data, parts.pretrain);
      const auto out = probe_model(tr.model, cfg, data, parts.probe_train, parts.test);
      table.runs.push_back(summarize(table.variants[i], cfg.seed, quick_eval(out, test_y)));
      if (progress) {
        std::ostringstream os;
        os << table.variants[i] << " seed " << cfg.seed << " mean " << table.runs.back().mean_auroc;
        progress(os.str());
      }
    }
  }
  return table;
}

// ---------------------------------------------------------------------------
// Few-shot and ensembles

std::string FewShotTable::csv() const {
  std::ostringstream os;
  os << std::setprecision(10) << "shots,repetition,mean_auroc\n";
  for (std::size_t k = 0; k < shots.size(); ++k)
    for (std::size_t r = 0; r < mean_auroc[k].size(); ++r) os << shots[k] << ',' << r << ',' << mean_auroc[k][r] << '\n';
  return os.str();
}

std::string FewShotTable::summary_csv(std::size_t resamples, std::uint64_t seed) const {
  std::ostringstream os;
  os << std::setprecision(10) << "shots,mean,ci_lo,ci_hi\n";
  for (std::size_t k = 0; k < shots.size(); ++k) {
    const auto& v = mean_auroc[k];
    const double m = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    const Interval ci = bootstrap_mean_ci(v, resamples, mix_seed(seed, shots[k]));
    os << shots[k] << ',' << m << ',' << std::min(ci.lo, m) << ',' << std::max(ci.hi, m) << '\n';
  }
  return os.str();
}

FewShotTable fewshot_curve(const TrainConfig& cfg, const std::vector<PairedExample>& data,
                           const std::vector<std::size_t>& shots, std::size_t repetitions,
                           const Progress& progress) {
  if (shots.empty() || repetitions == 0) throw ConfigError("few-shot study needs shot counts and repetitions");
  const Partitions parts = base_partitions(cfg, data);
  const auto test_y = labels_of(data, parts.test);
  FewShotTable table{shots, std::vector<std::vector<double>>(shots.size())};
  for (std::size_t r = 0; r < repetitions; ++r) {
    TrainConfig rc = cfg;
    rc.seed = cfg.seed + r;
    const TrainResult tr = pretrain(rc, data, parts.pretrain);
    const FeatureMatrix feats = all_features(tr.model, rc, data);
    const FeatureMatrix test_x = subset(feats, parts.test);
    for (std::size_t k = 0; k < shots.size(); ++k) {
      const Partitions p = split(data, SplitScheme::kFewShot, cfg.data_seed, cfg.split, shots[k], r);
      const auto out = fit_probe(subset(feats, p.probe_train), labels_of(data, p.probe_train), test_x,
                                 probe_options(rc));
      table.mean_auroc[k].push_back(quick_eval(out, test_y).mean_auroc);
      if (progress) {
        std::ostringstream os;
        os << shots[k] << "-shot repetition " << r << " mean " << table.mean_auroc[k].back();
        progress(os.str());
      }
    }
  }
  return table;
}

std::size_t EnsembleTable::wins() const {
  return static_cast<std::size_t>(std::count_if(repetitions.begin(), repetitions.end(), [](const auto& r) {
    return r.ensemble_mean_auroc >= r.median_member;
  }));
}

std::string EnsembleTable::csv() const {
  std::ostringstream os;
  os << std::setprecision(10) << "repetition,ensemble_mean_auroc,median_member_mean_auroc";
  const std::size_t members = repetitions.empty() ? 0 : repetitions.front().member_mean_auroc.size();
  for (std::size_t j = 0; j < members; ++j) os << ",member_" << j;
  os << '\n';
  for (std::size_t r = 0; r < repetitions.size(); ++r) {
    const auto& rep = repetitions[r];
    os << r << ',' << rep.ensemble_mean_auroc << ',' << rep.median_member;
    for (double m : rep.member_mean_auroc) os << ',' << m;
    os << '\n';
  }
  return os.str();
}

EnsembleTable ensemble_study(const TrainConfig& cfg, const std::vector<PairedExample>& data, std::size_t shots,
                             const Progress& progress) {
  const Partitions parts = base_partitions(cfg, data);
  const auto test_y = labels_of(data, parts.test);
  const std::size_t members = cfg.ensemble_members;

  std::vector<FeatureMatrix> feats;
  for (std::size_t j = 0; j < members; ++j) {
    TrainConfig mc = cfg;
    mc.seed = cfg.seed + j;
    feats.push_back(all_features(pretrain(mc, data, parts.pretrain).model, mc, data));
    if (progress) progress("pretrained ensemble member " + std::to_string(j));
  }

  EnsembleTable table;
  for (std::size_t r = 0; r < cfg.repetitions; ++r) {
    EnsembleRepetition rep;
    std::vector<ProbeOutput> outs;
    for (std::size_t j = 0; j < members; ++j) {
      const Partitions p = split(data, SplitScheme::kFewShot, cfg.data_seed, cfg.split, shots, r * members + j);
      outs.push_back(fit_probe(subset(feats[j], p.probe_train), labels_of(data, p.probe_train),
                               subset(feats[j], parts.test), probe_options(cfg)));
      rep.member_mean_auroc.push_back(quick_eval(outs.back(), test_y).mean_auroc);
    }
    rep.median_member = median(rep.member_mean_auroc);
    rep.ensemble_mean_auroc = quick_eval(median_consensus(outs), test_y).mean_auroc;
    if (progress) {
      std::ostringstream os;
      os << "repetition " << r << " ensemble " << rep.ensemble_mean_auroc << " median member " << rep.median_member;
      progress(os.str());
    }
    table.repetitions.push_back(std::move(rep));
  }
  return table;
}

}  // namespace igcl
