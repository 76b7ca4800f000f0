// SPDX-FileCopyrightText: © 2026 igcl contributors
//
// SPDX-License-Identifier: Apache-2.0

#include "igcl/probe.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include "igcl/errors.hpp"

namespace igcl {

namespace {

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

void LogisticRegression::fit(const FeatureMatrix& x, std::span<const int> y, const LogisticOptions& opt) {
  const std::size_t n = x.rows, f = x.cols;
  if (n == 0 || y.size() != n) throw DimensionError("logistic regression: features and labels disagree");

  mean_.assign(f, 0.0);
  scale_.assign(f, 1.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < f; ++j) mean_[j] += x.row(i)[j];
  for (auto& m : mean_) m /= static_cast<double>(n);
  for (std::size_t j = 0; j < f; ++j) {
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i) var += (x.row(i)[j] - mean_[j]) * (x.row(i)[j] - mean_[j]);
    var /= static_cast<double>(n);
    scale_[j] = var > 1e-12 ? std::sqrt(var) : 1.0;
  }
  std::vector<double> z(n * f);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < f; ++j) z[i * f + j] = (x.row(i)[j] - mean_[j]) / scale_[j];

  // Step 1/L with L bounding the Hessian: 0.25 * ||Z||_F^2 / n (+1 for the
  // bias column) + l2.
  double frob = static_cast<double>(n);
  for (double v : z) frob += v * v;
  const double lipschitz = 0.25 * frob / static_cast<double>(n) + opt.l2;
  const double step = 1.0 / lipschitz;

  w_.assign(f, 0.0);
  b_ = 0.0;
  converged_ = false;
  std::vector<double> gw(f);
  for (iterations_ = 0; iterations_ < opt.max_iter; ++iterations_) {
    std::fill(gw.begin(), gw.end(), 0.0);
    double gb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double s = b_;
      for (std::size_t j = 0; j < f; ++j) s += w_[j] * z[i * f + j];
      const double r = sigmoid(s) - (y[i] ? 1.0 : 0.0);
      gb += r;
      for (std::size_t j = 0; j < f; ++j) gw[j] += r * z[i * f + j];
    }
    double gmax = std::abs(gb / static_cast<double>(n));
    for (std::size_t j = 0; j < f; ++j) {
      gw[j] = gw[j] / static_cast<double>(n) + opt.l2 * w_[j];
      gmax = std::max(gmax, std::abs(gw[j]));
    }
    if (gmax < opt.tolerance) {
      converged_ = true;
      break;
    }
    b_ -= step * gb / static_cast<double>(n);
    for (std::size_t j = 0; j < f; ++j) w_[j] -= step * gw[j];
  }
}

double LogisticRegression::predict_proba(const double* row) const {
  double s = b_;
  for (std::size_t j = 0; j < w_.size(); ++j) s += w_[j] * (row[j] - mean_[j]) / scale_[j];
  return sigmoid(s);
}

std::vector<double> LogisticRegression::predict_proba(const FeatureMatrix& x) const {
  std::vector<double> out(x.rows);
  for (std::size_t i = 0; i < x.rows; ++i) out[i] = predict_proba(x.row(i));
  return out;
}

ProbeOutput fit_probe(const FeatureMatrix& train_x, const std::vector<Labels>& train_y, const FeatureMatrix& test_x,
                      const LogisticOptions& opt) {
  if (train_x.rows != train_y.size()) throw DimensionError("probe-train features and labels disagree");
  if (train_x.cols != test_x.cols) throw DimensionError("probe-train and test feature widths differ");
  ProbeOutput out;
  out.rows = test_x.rows;
  out.probs.assign(test_x.rows * kLabelCount, std::numeric_limits<double>::quiet_NaN());
  for (std::size_t l = 0; l < kLabelCount; ++l) {
    std::vector<int> y(train_y.size());
    int positives = 0;
    for (std::size_t i = 0; i < y.size(); ++i) positives += (y[i] = train_y[i][l]);
    if (positives == 0 || positives == static_cast<int>(y.size())) {
      out.skipped[l] = true;
      out.warnings.push_back("label " + std::to_string(l) + " has a single class in probe-train; skipped");
      continue;
    }
    LogisticRegression lr;
    lr.fit(train_x, y, opt);
    if (!lr.converged()) {
      out.warnings.push_back("label " + std::to_string(l) + " probe stopped at the iteration cap");
    }
    for (std::size_t i = 0; i < test_x.rows; ++i) out.probs[i * kLabelCount + l] = lr.predict_proba(test_x.row(i));
  }
  return out;
}

EvalReport evaluate(const ProbeOutput& out, const std::vector<Labels>& test_y, const EvalOptions& opt) {
  if (out.rows != test_y.size()) throw DimensionError("probe output and test labels disagree");
  EvalReport report;
  report.warnings = out.warnings;
  double total = 0.0;
  std::size_t evaluated = 0;
  for (std::size_t l = 0; l < kLabelCount; ++l) {
    auto& m = report.labels[l];
    std::vector<double> scores(out.rows);
    std::vector<int> y(out.rows), pred(out.rows);
    int positives = 0;
    for (std::size_t i = 0; i < out.rows; ++i) {
      scores[i] = out.at(i, l);
      y[i] = test_y[i][l];
      positives += y[i];
      pred[i] = scores[i] >= opt.threshold ? 1 : 0;
    }
    if (out.skipped[l] || positives == 0 || positives == static_cast<int>(out.rows)) {
      m.skipped = true;
      if (!out.skipped[l]) report.warnings.push_back("label " + std::to_string(l) + " has a single class in test");
      continue;
    }
    m.auroc = auroc(scores, y);
    m.mcc = mcc(pred, y);
    m.roc = roc_points(scores, y);
    if (opt.bootstrap > 0) {
      const std::uint64_t seed = opt.seed * 31 + l;
      m.auroc_ci = bootstrap_ci(scores, y, [](auto s, auto t) { return auroc(s, t); }, opt.bootstrap, seed);
      const double threshold = opt.threshold;
      m.mcc_ci = bootstrap_ci(
          scores, y,
          [threshold](std::span<const double> s, std::span<const int> t) {
            std::vector<int> p(s.size());
            for (std::size_t i = 0; i < s.size(); ++i) p[i] = s[i] >= threshold ? 1 : 0;
            return mcc(p, t);
          },
          opt.bootstrap, seed + 7);
    } else {
      m.auroc_ci = {m.auroc, m.auroc};
      m.mcc_ci = {m.mcc, m.mcc};
    }
    // Percentile intervals can exclude the point estimate on skewed samples.
    m.auroc_ci = {std::min(m.auroc_ci.lo, m.auroc), std::max(m.auroc_ci.hi, m.auroc)};
    m.mcc_ci = {std::min(m.mcc_ci.lo, m.mcc), std::max(m.mcc_ci.hi, m.mcc)};
    total += m.auroc;
    ++evaluated;
  }
  report.mean_auroc = evaluated ? total / static_cast<double>(evaluated) : std::numeric_limits<double>::quiet_NaN();
  return report;
}

EvalReport linear_probe(const FeatureMatrix& train_x, const std::vector<Labels>& train_y, const FeatureMatrix& test_x,
                        const std::vector<Labels>& test_y, const LogisticOptions& lopt, const EvalOptions& eopt) {
  return evaluate(fit_probe(train_x, train_y, test_x, lopt), test_y, eopt);
}

ProbeOutput median_consensus(const std::vector<ProbeOutput>& members) {
  if (members.size() < 2) throw DataError("an ensemble needs at least two members");
  ProbeOutput out;
  out.rows = members.front().rows;
  out.skipped = members.front().skipped;
  for (const auto& m : members) {
    if (m.rows != out.rows || m.probs.size() != members.front().probs.size()) {
      throw DataError("ensemble members disagree on the test set");
    }
    if (m.skipped != out.skipped) throw DataError("ensemble members disagree on the label space");
  }
  out.probs.resize(members.front().probs.size());
  std::vector<double> column(members.size());
  for (std::size_t k = 0; k < out.probs.size(); ++k) {
    for (std::size_t m = 0; m < members.size(); ++m) column[m] = members[m].probs[k];
    std::sort(column.begin(), column.end());
    const std::size_t h = column.size() / 2;
    out.probs[k] = column.size() % 2 ? column[h] : 0.5 * (column[h - 1] + column[h]);
  }
  return out;
}

EvalReport ensemble(const std::vector<ProbeOutput>& members, const std::vector<Labels>& test_y,
                    const EvalOptions& opt) {
  return evaluate(median_consensus(members), test_y, opt);
}

std::string EvalReport::metrics_csv() const {
  std::ostringstream os;
  os << std::setprecision(10);
  os << "label,evaluated,auroc,auroc_lo,auroc_hi,mcc,mcc_lo,mcc_hi\n";
  for (std::size_t l = 0; l < kLabelCount; ++l) {
    const auto& m = labels[l];
    if (m.skipped) {
      os << l << ",0,,,,,,\n";
      continue;
    }
    os << l << ",1," << m.auroc << ',' << m.auroc_ci.lo << ',' << m.auroc_ci.hi << ',' << m.mcc << ','
       << m.mcc_ci.lo << ',' << m.mcc_ci.hi << '\n';
  }
  os << "mean,," << mean_auroc << ",,,,,\n";
  return os.str();
}

std::string EvalReport::roc_csv() const {
  std::ostringstream os;
  os << std::setprecision(10);
  os << "label,threshold,fpr,tpr\n";
  for (std::size_t l = 0; l < kLabelCount; ++l)
    for (const auto& p : labels[l].roc) os << l << ',' << p.threshold << ',' << p.fpr << ',' << p.tpr << '\n';
  return os.str();
}

}  // namespace igcl
