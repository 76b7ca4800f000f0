// SPDX-FileCopyrightText: © 2026 igcl contributors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace igcl {

/// Area under the ROC curve via the Mann-Whitney statistic with midranks for
/// tied scores. Labels are 0/1. Throws DataError when only one class occurs.
double auroc(std::span<const double> scores, std::span<const int> labels);

struct RocPoint {
  double threshold;
  double fpr;
  double tpr;
};

/// ROC curve from (0,0) to (1,1), one point per distinct score, thresholds
/// descending. Predict positive when score >= threshold.
std::vector<RocPoint> roc_points(std::span<const double> scores, std::span<const int> labels);

struct Confusion {
  std::int64_t tp = 0, tn = 0, fp = 0, fn = 0;
};
Confusion confusion(std::span<const int> predictions, std::span<const int> labels);

/// Matthews correlation; 0 when any marginal of the confusion matrix is 0.
double mcc(std::span<const int> predictions, std::span<const int> labels);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

using BinaryMetric = std::function<double(std::span<const double>, std::span<const int>)>;

/// Percentile bootstrap over examples. Resamples containing a single class
/// are redrawn.
Interval bootstrap_ci(std::span<const double> scores, std::span<const int> labels, const BinaryMetric& metric,
                      std::size_t resamples, std::uint64_t seed, double level = 0.95);

/// Percentile bootstrap of the mean of `values`.
Interval bootstrap_mean_ci(std::span<const double> values, std::size_t resamples, std::uint64_t seed,
                           double level = 0.95);

}  // namespace igcl
