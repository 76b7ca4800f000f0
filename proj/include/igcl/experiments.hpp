// SPDX-FileCopyrightText: © 2026 igcl contributors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <string>
#include <vector>

#include "igcl/config.hpp"
#include "igcl/probe.hpp"
#include "igcl/train.hpp"

namespace igcl {

using Progress = std::function<void(const std::string&)>;

std::vector<PairedExample> generate_for(const TrainConfig& cfg);

struct ProbeRun {
  TrainResult train;
  Partitions parts;
  EvalReport report;
};

/// Pretrain on the pretrain partition, then probe on probe-train, report on
/// test.
ProbeRun pretrain_and_probe(const TrainConfig& cfg, const std::vector<PairedExample>& data, const Partitions& parts);

/// Probe a frozen model on a given probe-train/test pair.
ProbeOutput probe_model(const Model& model, const TrainConfig& cfg, const std::vector<PairedExample>& data,
                        std::span<const std::size_t> train_ids, std::span<const std::size_t> test_ids);

struct VariantRun {
  std::string variant;
  std::uint64_t seed = 0;
  std::array<double, kLabelCount> auroc{};  // NaN for skipped labels
  double mean_auroc = 0.0;
};

/// Per-seed runs of several model variants with matched budgets.
struct ComparisonTable {
  std::vector<std::string> variants;
  std::vector<VariantRun> runs;

  /// Mean over seeds of one label's AUROC, or of the mean AUROC for label -1.
  double mean_of(const std::string& variant, int label = -1) const;
  std::vector<double> values_of(const std::string& variant, int label = -1) const;
  std::string runs_csv() const;
  /// variant,metric,mean,ci_lo,ci_hi,seeds; bootstrap over seeds.
  std::string summary_csv(std::size_t resamples, std::uint64_t seed) const;
};

/// ATTENTION, DUMMY, META, PRIMARY and NONE over cfg.seeds seeds.
ComparisonTable compare_augmentations(const TrainConfig& base, const std::vector<PairedExample>& data,
                                      const Progress& progress = {});

/// Full model and the five ablations over cfg.seeds seeds.
ComparisonTable run_ablations(const TrainConfig& base, const std::vector<PairedExample>& data,
                              const Progress& progress = {});

/// Mean AUROC per shot count and repetition, one pretrained encoder per
/// repetition seed.
struct FewShotTable {
  std::vector<std::size_t> shots;
  std::vector<std::vector<double>> mean_auroc;  // [shot][repetition]

  std::string csv() const;
  /// shots,mean,ci_lo,ci_hi; bootstrap over repetitions.
  std::string summary_csv(std::size_t resamples, std::uint64_t seed) const;
};

FewShotTable fewshot_curve(const TrainConfig& cfg, const std::vector<PairedExample>& data,
                           const std::vector<std::size_t>& shots, std::size_t repetitions,
                           const Progress& progress = {});

struct EnsembleRepetition {
  std::vector<double> member_mean_auroc;
  double median_member = 0.0;
  double ensemble_mean_auroc = 0.0;
};

struct EnsembleTable {
  std::vector<EnsembleRepetition> repetitions;
  std::size_t wins() const;  // repetitions with ensemble >= median member
  std::string csv() const;
};

/// cfg.repetitions repetitions of a cfg.ensemble_members-member k-shot
/// ensemble. Member j of every repetition uses encoder seed cfg.seed + j and
/// its own few-shot draw.
EnsembleTable ensemble_study(const TrainConfig& cfg, const std::vector<PairedExample>& data, std::size_t shots,
                             const Progress& progress = {});

}  // namespace igcl
