// SPDX-FileCopyrightText: © 2026 igcl contributors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "igcl/metrics.hpp"
#include "igcl/synth.hpp"

namespace igcl {

/// Row-major feature matrix.
struct FeatureMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  const double* row(std::size_t i) const { return values.data() + i * cols; }
};

struct LogisticOptions {
  double l2 = 1e-2;        // on standardised features, bias unpenalised
  double tolerance = 1e-6;  // max-abs gradient at convergence
  std::size_t max_iter = 20000;
};

/// Binary logistic regression fitted by full-batch gradient descent on
/// standardised features.
class LogisticRegression {
 public:
  void fit(const FeatureMatrix& x, std::span<const int> y, const LogisticOptions& opt = {});
  double predict_proba(const double* row) const;
  std::vector<double> predict_proba(const FeatureMatrix& x) const;

  bool converged() const { return converged_; }
  std::size_t iterations() const { return iterations_; }
  const std::vector<double>& weights() const { return w_; }
  double bias() const { return b_; }

 private:
  std::vector<double> mean_, scale_, w_;
  double b_ = 0.0;
  bool converged_ = false;
  std::size_t iterations_ = 0;
};

struct LabelMetrics {
  bool skipped = false;  // single-class probe-train or test labels
  double auroc = 0.0;
  Interval auroc_ci;
  double mcc = 0.0;
  Interval mcc_ci;
  std::vector<RocPoint> roc;
};

struct EvalReport {
  std::array<LabelMetrics, kLabelCount> labels{};
  double mean_auroc = 0.0;  // over evaluated labels
  std::map<std::string, std::string> meta;
  std::vector<std::string> warnings;

  std::string metrics_csv() const;
  std::string roc_csv() const;
};

/// Per-example, per-label probabilities, row-major [n x kLabelCount]. NaN
/// marks a label the probe skipped.
struct ProbeOutput {
  std::size_t rows = 0;
  std::vector<double> probs;
  std::array<bool, kLabelCount> skipped{};
  std::vector<std::string> warnings;

  double at(std::size_t i, std::size_t label) const { return probs[i * kLabelCount + label]; }
};

/// One-vs-rest logistic probes trained on frozen features.
ProbeOutput fit_probe(const FeatureMatrix& train_x, const std::vector<Labels>& train_y, const FeatureMatrix& test_x,
                      const LogisticOptions& opt = {});

struct EvalOptions {
  std::size_t bootstrap = 1000;
  std::uint64_t seed = 0;
  double threshold = 0.5;
};

/// AUROC with percentile bootstrap CI, MCC at the probability threshold, ROC
/// points.
EvalReport evaluate(const ProbeOutput& out, const std::vector<Labels>& test_y, const EvalOptions& opt = {});

EvalReport linear_probe(const FeatureMatrix& train_x, const std::vector<Labels>& train_y, const FeatureMatrix& test_x,
                        const std::vector<Labels>& test_y, const LogisticOptions& lopt = {},
                        const EvalOptions& eopt = {});

/// Per-example, per-label median across members. Throws DataError when
/// members disagree on size or skipped labels.
ProbeOutput median_consensus(const std::vector<ProbeOutput>& members);

EvalReport ensemble(const std::vector<ProbeOutput>& members, const std::vector<Labels>& test_y,
                    const EvalOptions& opt = {});

}  // namespace igcl
