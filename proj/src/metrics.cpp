// SPDX-FileCopyrightText: © 2026 igcl contributors
//
// SPDX-License-Identifier: Apache-2.0

#include "igcl/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "igcl/errors.hpp"
#include "igcl/params.hpp"

namespace igcl {

namespace {

void check_sizes(std::size_t a, std::size_t b) {
  if (a != b) throw DimensionError("scores and labels differ in length");
  if (a == 0) throw DataError("metric over an empty set");
}

double percentile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace

double auroc(std::span<const double> scores, std::span<const int> labels) {
  check_sizes(scores.size(), labels.size());
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  double pos_rank_sum = 0.0;
  std::size_t n_pos = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double midrank = 0.5 * static_cast<double>(i + 1 + j);  // mean of ranks i+1..j
    for (std::size_t t = i; t < j; ++t) {
      if (labels[order[t]]) {
        pos_rank_sum += midrank;
        ++n_pos;
      }
    }
    i = j;
  }
  const std::size_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0) throw DataError("auroc needs both classes");
  const double u = pos_rank_sum - 0.5 * static_cast<double>(n_pos) * static_cast<double>(n_pos + 1);
  return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

std::vector<RocPoint> roc_points(std::span<const double> scores, std::span<const int> labels) {
  check_sizes(scores.size(), labels.size());
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  const auto n_pos = static_cast<double>(std::count_if(labels.begin(), labels.end(), [](int v) { return v != 0; }));
  const double n_neg = static_cast<double>(n) - n_pos;
  if (n_pos == 0 || n_neg == 0) throw DataError("roc_points needs both classes");

  std::vector<RocPoint> out{{std::numeric_limits<double>::infinity(), 0.0, 0.0}};
  double tp = 0, fp = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) {
      (labels[order[j]] ? tp : fp) += 1.0;
      ++j;
    }
    out.push_back({scores[order[i]], fp / n_neg, tp / n_pos});
    i = j;
  }
  return out;
}

Confusion confusion(std::span<const int> predictions, std::span<const int> labels) {
  if (predictions.size() != labels.size()) throw DimensionError("predictions and labels differ in length");
  Confusion c;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const bool p = predictions[i] != 0, y = labels[i] != 0;
    if (p && y) ++c.tp;
    else if (!p && !y) ++c.tn;
    else if (p) ++c.fp;
    else ++c.fn;
  }
  return c;
}

double mcc(std::span<const int> predictions, std::span<const int> labels) {
  const Confusion c = confusion(predictions, labels);
  const double tp = static_cast<double>(c.tp), tn = static_cast<double>(c.tn);
  const double fp = static_cast<double>(c.fp), fn = static_cast<double>(c.fn);
  const double denom = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn);
  if (denom == 0.0) return 0.0;
  return (tp * tn - fp * fn) / std::sqrt(denom);
}

Interval bootstrap_ci(std::span<const double> scores, std::span<const int> labels, const BinaryMetric& metric,
                      std::size_t resamples, std::uint64_t seed, double level) {
  check_sizes(scores.size(), labels.size());
  const std::size_t n = scores.size();
  std::mt19937_64 rng(mix_seed(seed, 0xB007ull));
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::vector<double> stats;
  stats.reserve(resamples);
  std::vector<double> s(n);
  std::vector<int> y(n);
  std::size_t attempts = 0;
  while (stats.size() < resamples) {
    if (++attempts > 20 * resamples + 100) throw DataError("bootstrap could not draw two-class resamples");
    int positives = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t k = pick(rng);
      s[i] = scores[k];
      y[i] = labels[k];
      positives += y[i] != 0;
    }
    if (positives == 0 || positives == static_cast<int>(n)) continue;
    stats.push_back(metric(s, y));
  }
  const double alpha = (1.0 - level) / 2.0;
  return {percentile(stats, alpha), percentile(stats, 1.0 - alpha)};
}

Interval bootstrap_mean_ci(std::span<const double> values, std::size_t resamples, std::uint64_t seed, double level) {
  if (values.empty()) throw DataError("bootstrap of an empty sample");
  const std::size_t n = values.size();
  std::mt19937_64 rng(mix_seed(seed, 0xB00Eull));
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::vector<double> stats(resamples);
  for (auto& st : stats) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += values[pick(rng)];
    st = acc / static_cast<double>(n);
  }
  const double alpha = (1.0 - level) / 2.0;
  return {percentile(stats, alpha), percentile(stats, 1.0 - alpha)};
}

}  // namespace igcl
