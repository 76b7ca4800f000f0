// SPDX-FileCopyrightText: © 2026 igcl contributors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "igcl/encoders.hpp"
#include "igcl/graph.hpp"

namespace igcl {

inline constexpr std::size_t kLabelCount = 5;
using Labels = std::array<int, kLabelCount>;

enum class DataMode { kStandard, kCrossComponent };
std::string_view to_string(DataMode m);
DataMode parse_data_mode(std::string_view s);

enum class Severity : std::uint8_t { kNone, kMild, kSevere };

struct SynthConfig {
  DataMode mode = DataMode::kStandard;
  /// Bernoulli rate per label. In cross-component mode labels 0 and 1 are
  /// forced to 0.5 and label 4 is their XOR.
  std::array<double, kLabelCount> rates{0.3, 0.3, 0.3, 0.3, 0.3};
  double background_noise = 0.25;
  double jitter = 2.0;      // max blob offset in pixels
  double blob_radius = 2.5;
  /// Chance that an inactive finding is mentioned as negated in the base
  /// component (standard mode only).
  double negation_rate = 0.5;
  /// Chance that an active finding is linked to an uncertain mention of an
  /// inactive one via suggestive_of (standard mode only).
  double suggestion_rate = 0.3;
};

struct FindingLatent {
  double dx = 0.0, dy = 0.0;  // position jitter
  double intensity = 0.0;
  Severity severity = Severity::kNone;
  bool bilateral = false;
  bool negated = false;          // mentioned as absent
  int suggests = -1;             // label suggested as uncertain, -1 if none
};

struct LatentState {
  std::uint64_t seed = 0;
  std::size_t index = 0;
  Labels y{};
  std::array<FindingLatent, kLabelCount> findings{};
};

struct PairedExample {
  std::size_t id = 0;
  LatentState latent;
  Image image;
  ReportGraph graph;
  Labels labels{};
};

/// Pure function of (seed, index, config).
LatentState sample_latent(std::uint64_t seed, std::size_t index, const SynthConfig& cfg);
Image render_image(const LatentState& latent, const SynthConfig& cfg);
ReportGraph build_graph(const LatentState& latent, const SynthConfig& cfg);
PairedExample make_example(std::uint64_t seed, std::size_t index, const SynthConfig& cfg);

std::vector<PairedExample> generate(std::uint64_t seed, std::size_t n, const SynthConfig& cfg);

/// Image region centre (row, col) for a label.
std::array<double, 2> region_center(std::size_t label);

// ---------------------------------------------------------------------------
// Splits

enum class SplitScheme { kPretrain, kProbe1Pct, kFewShot };

struct SplitConfig {
  double pretrain_fraction = 0.5;
  double test_fraction = 0.25;  // remainder is the probe pool
  double probe_fraction = 0.01;
};

struct Partitions {
  std::vector<std::size_t> pretrain;
  std::vector<std::size_t> probe_pool;
  std::vector<std::size_t> probe_train;
  std::vector<std::size_t> test;
};

/// Deterministic per seed. kPretrain leaves probe_train empty; kProbe1Pct
/// draws probe_fraction of the pool; kFewShot draws exactly `shots` positives
/// per label plus `shots` all-negative examples. Throws DataError when the
/// pool cannot supply them. `draw` selects an independent probe draw over
/// the same pretrain/test/pool assignment.
Partitions split(const std::vector<PairedExample>& data, SplitScheme scheme, std::uint64_t seed,
                 const SplitConfig& cfg = {}, std::size_t shots = 0, std::uint64_t draw = 0);

// ---------------------------------------------------------------------------
// Files

/// Writes graphs.jsonl, images.npy (float64, N x size x size) and labels.csv
/// into `dir`.
void write_dataset(const std::filesystem::path& dir, const std::vector<PairedExample>& data);

/// NPY v1.0 writer for a C-order float64 array.
void write_npy(const std::filesystem::path& path, const std::vector<std::size_t>& shape,
               const std::vector<double>& values);

}  // namespace igcl
