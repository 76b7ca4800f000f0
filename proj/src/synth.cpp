// SPDX-FileCopyrightText: © 2026 igcl contributors
//
// SPDX-License-Identifier: Apache-2.0

#include "igcl/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "igcl/params.hpp"

namespace igcl {

std::string_view to_string(DataMode m) { return m == DataMode::kStandard ? "STANDARD" : "CROSS_COMPONENT"; }

DataMode parse_data_mode(std::string_view s) {
  if (s == "STANDARD") return DataMode::kStandard;
  if (s == "CROSS_COMPONENT") return DataMode::kCrossComponent;
  throw ConfigError("unknown data mode '" + std::string(s) + "'");
}

std::array<double, 2> region_center(std::size_t label) {
  static constexpr std::array<std::array<double, 2>, kLabelCount> kCenters{
      {{7.5, 7.5}, {7.5, 23.5}, {23.5, 7.5}, {23.5, 23.5}, {15.5, 15.5}}};
  return kCenters.at(label);
}

namespace {

std::string finding_text(std::size_t k) { return "finding_" + std::to_string(k); }
std::string region_text(std::size_t k) { return "region_" + std::to_string(k); }

bool rendered_in_graph(std::size_t k, DataMode mode) { return mode == DataMode::kStandard || k < kLabelCount - 1; }

}  // namespace

LatentState sample_latent(std::uint64_t seed, std::size_t index, const SynthConfig& cfg) {
  std::mt19937_64 rng(mix_seed(seed, index));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  LatentState s;
  s.seed = seed;
  s.index = index;
  const bool cross = cfg.mode == DataMode::kCrossComponent;
  for (std::size_t k = 0; k < kLabelCount; ++k) {
    const double rate = cross && k < 2 ? 0.5 : cfg.rates[k];
    s.y[k] = unit(rng) < rate ? 1 : 0;
  }
  if (cross) s.y[4] = s.y[0] ^ s.y[1];

  // Fixed number of draws per finding keeps every field a function of
  // (seed, index) regardless of which labels are active.
  for (std::size_t k = 0; k < kLabelCount; ++k) {
    auto& f = s.findings[k];
    f.dx = (2.0 * unit(rng) - 1.0) * cfg.jitter;
    f.dy = (2.0 * unit(rng) - 1.0) * cfg.jitter;
    const double sev = unit(rng);
    f.severity = sev < 0.25 ? Severity::kMild : (sev < 0.5 ? Severity::kSevere : Severity::kNone);
    const double base = f.severity == Severity::kMild ? 0.5 : (f.severity == Severity::kSevere ? 0.9 : 0.7);
    f.intensity = base + (unit(rng) - 0.5) * 0.1;
    f.bilateral = unit(rng) < 0.2;
    const double neg = unit(rng);
    const double sug = unit(rng);
    const double pick = unit(rng);
    if (!cross) {
      f.negated = s.y[k] == 0 && neg < cfg.negation_rate;
      if (s.y[k] == 1 && sug < cfg.suggestion_rate) {
        std::vector<int> inactive;
        for (std::size_t j = 0; j < kLabelCount; ++j)
          if (s.y[j] == 0) inactive.push_back(static_cast<int>(j));
        if (!inactive.empty()) {
          f.suggests = inactive[std::min(inactive.size() - 1, static_cast<std::size_t>(pick * inactive.size()))];
        }
      }
    }
  }
  return s;
}

Image render_image(const LatentState& latent, const SynthConfig& cfg) {
  constexpr std::size_t kSize = 32;
  Image img;
  img.size = kSize;
  img.pixels.assign(kSize * kSize, 0.0);
  std::mt19937_64 rng(mix_seed(latent.seed ^ 0xA5A5A5A5ull, latent.index));
  std::uniform_real_distribution<double> noise(0.0, cfg.background_noise);
  for (double& p : img.pixels) p = noise(rng);

  for (std::size_t k = 0; k < kLabelCount; ++k) {
    if (!latent.y[k] || !rendered_in_graph(k, cfg.mode)) continue;
    const auto& f = latent.findings[k];
    const auto c = region_center(k);
    const double cy = c[0] + f.dy, cx = c[1] + f.dx;
    const double sigma = cfg.blob_radius * (f.bilateral ? 1.4 : 1.0);
    for (std::size_t r = 0; r < kSize; ++r) {
      for (std::size_t col = 0; col < kSize; ++col) {
        const double d2 = (r - cy) * (r - cy) + (col - cx) * (col - cx);
        img.pixels[r * kSize + col] += f.intensity * std::exp(-d2 / (2.0 * sigma * sigma));
      }
    }
  }
  for (double& p : img.pixels) p = std::clamp(p, 0.0, 1.0);
  return img;
}

ReportGraph build_graph(const LatentState& latent, const SynthConfig& cfg) {
  ReportGraph g;
  g.graph_id = "s" + std::to_string(latent.seed) + "-" + std::to_string(latent.index);

  // Base component, always present.
  const std::size_t chest = g.add_node("chest", NodeType::kAnatomy);
  const std::size_t clear = g.add_node("clear", NodeType::kObsPresent);
  g.add_edge(clear, chest, Relation::kLocatedAt);
  for (std::size_t k = 0; k < kLabelCount; ++k) {
    if (!latent.findings[k].negated) continue;
    const std::size_t f = g.add_node(finding_text(k), NodeType::kObsAbsent);
    const std::size_t r = g.add_node(region_text(k), NodeType::kAnatomy);
    g.add_edge(f, r, Relation::kLocatedAt);
    g.add_edge(r, chest, Relation::kModify);
  }

  // One component per active finding.
  for (std::size_t k = 0; k < kLabelCount; ++k) {
    if (!latent.y[k] || !rendered_in_graph(k, cfg.mode)) continue;
    const auto& lat = latent.findings[k];
    const std::size_t f = g.add_node(finding_text(k), NodeType::kObsPresent);
    const std::size_t r = g.add_node(region_text(k), NodeType::kAnatomy);
    g.add_edge(f, r, Relation::kLocatedAt);
    // Mirrors the negated pattern so that only the node type separates them.
    g.add_edge(r, g.add_node("chest", NodeType::kAnatomy), Relation::kModify);
    if (lat.severity != Severity::kNone) {
      const std::size_t m = g.add_node(lat.severity == Severity::kMild ? "mild" : "severe", NodeType::kObsPresent);
      g.add_edge(m, f, Relation::kModify);
    }
    if (lat.bilateral) {
      const std::size_t m = g.add_node("bilateral", NodeType::kObsPresent);
      g.add_edge(m, f, Relation::kModify);
    }
    if (lat.suggests >= 0) {
      const std::size_t s = g.add_node(finding_text(static_cast<std::size_t>(lat.suggests)), NodeType::kObsUncertain);
      g.add_edge(f, s, Relation::kSuggestiveOf);
    }
  }
  return g;
}

PairedExample make_example(std::uint64_t seed, std::size_t index, const SynthConfig& cfg) {
  PairedExample ex;
  ex.id = index;
  ex.latent = sample_latent(seed, index, cfg);
  ex.image = render_image(ex.latent, cfg);
  ex.graph = build_graph(ex.latent, cfg);
  ex.labels = ex.latent.y;
  return ex;
}

std::vector<PairedExample> generate(std::uint64_t seed, std::size_t n, const SynthConfig& cfg) {
  if (n == 0) throw DataError("generate needs n >= 1");
  std::vector<PairedExample> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(make_example(seed, i, cfg));
  return out;
}

// ---------------------------------------------------------------------------
// Splits

Partitions split(const std::vector<PairedExample>& data, SplitScheme scheme, std::uint64_t seed,
                 const SplitConfig& cfg, std::size_t shots, std::uint64_t draw_stream) {
  const std::size_t n = data.size();
  if (cfg.pretrain_fraction < 0 || cfg.test_fraction <= 0 || cfg.pretrain_fraction + cfg.test_fraction >= 1.0) {
    throw ConfigError("split fractions must leave a nonempty probe pool and test set");
  }
  // Pretrain/test/pool assignment depends on the data seed only; the probe
  // draw below uses its own stream so different draws share a test set.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(mix_seed(seed, 0x5EED5EEDull));
  std::shuffle(order.begin(), order.end(), rng);

  const auto n_pre = static_cast<std::size_t>(std::floor(cfg.pretrain_fraction * static_cast<double>(n)));
  const auto n_test = static_cast<std::size_t>(std::floor(cfg.test_fraction * static_cast<double>(n)));
  if (n_test == 0 || n_pre + n_test >= n) throw DataError("dataset of " + std::to_string(n) + " too small to split");

  Partitions p;
  p.pretrain.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_pre));
  p.test.assign(order.begin() + static_cast<std::ptrdiff_t>(n_pre),
                order.begin() + static_cast<std::ptrdiff_t>(n_pre + n_test));
  p.probe_pool.assign(order.begin() + static_cast<std::ptrdiff_t>(n_pre + n_test), order.end());
  for (auto* part : {&p.pretrain, &p.test, &p.probe_pool}) std::sort(part->begin(), part->end());

  if (scheme == SplitScheme::kPretrain) return p;

  std::vector<std::size_t> pool = p.probe_pool;
  std::mt19937_64 draw(mix_seed(mix_seed(seed, 0xD4A3ull + shots), draw_stream));
  std::shuffle(pool.begin(), pool.end(), draw);

  if (scheme == SplitScheme::kProbe1Pct) {
    const auto count = static_cast<std::size_t>(std::llround(cfg.probe_fraction * static_cast<double>(pool.size())));
    if (count == 0) throw DataError("probe pool too small for the requested fraction");
    p.probe_train.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(count));
  } else {
    if (shots == 0) throw ConfigError("few-shot split needs shots >= 1");
    std::array<std::size_t, kLabelCount> have{};
    std::size_t negatives = 0;
    for (std::size_t id : pool) {
      const Labels& y = data[id].labels;
      const bool any = std::any_of(y.begin(), y.end(), [](int v) { return v != 0; });
      if (!any) {
        if (negatives < shots) {
          p.probe_train.push_back(id);
          ++negatives;
        }
        continue;
      }
      bool fits = true;
      for (std::size_t l = 0; l < kLabelCount; ++l)
        if (y[l] && have[l] >= shots) fits = false;
      if (!fits) continue;
      p.probe_train.push_back(id);
      for (std::size_t l = 0; l < kLabelCount; ++l) have[l] += static_cast<std::size_t>(y[l] != 0);
    }
    for (std::size_t l = 0; l < kLabelCount; ++l) {
      if (have[l] < shots) {
        throw DataError("insufficient positives for " + std::to_string(shots) + "-shot on label " + std::to_string(l) +
                        " (found " + std::to_string(have[l]) + ")");
      }
    }
  }
  std::sort(p.probe_train.begin(), p.probe_train.end());
  return p;
}

// ---------------------------------------------------------------------------
// Files

void write_npy(const std::filesystem::path& path, const std::vector<std::size_t>& shape,
               const std::vector<double>& values) {
  std::ostringstream dict;
  dict << "{'descr': '<f8', 'fortran_order': False, 'shape': (";
  for (std::size_t i = 0; i < shape.size(); ++i) dict << shape[i] << (shape.size() == 1 || i + 1 < shape.size() ? ", " : "");
  dict << "), }";
  std::string header = dict.str();
  const std::size_t unpadded = 10 + header.size() + 1;
  header.append((64 - unpadded % 64) % 64, ' ');
  header.push_back('\n');

  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out.write("\x93NUMPY\x01\x00", 8);
  const auto len = static_cast<std::uint16_t>(header.size());
  const char len_bytes[2] = {static_cast<char>(len & 0xFF), static_cast<char>(len >> 8)};
  out.write(len_bytes, 2);
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  out.write(reinterpret_cast<const char*>(values.data()), static_cast<std::streamsize>(values.size() * sizeof(double)));
}

void write_dataset(const std::filesystem::path& dir, const std::vector<PairedExample>& data) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "graphs.jsonl");
    for (const auto& ex : data) out << serialize_graph(ex.graph) << '\n';
  }
  {
    std::ofstream out(dir / "labels.csv");
    out << "id";
    for (std::size_t l = 0; l < kLabelCount; ++l) out << ",y" << l;
    out << '\n';
    for (const auto& ex : data) {
      out << ex.id;
      for (int v : ex.labels) out << ',' << v;
      out << '\n';
    }
  }
  std::vector<double> pixels;
  const std::size_t side = data.empty() ? 32 : data.front().image.size;
  pixels.reserve(data.size() * side * side);
  for (const auto& ex : data) pixels.insert(pixels.end(), ex.image.pixels.begin(), ex.image.pixels.end());
  write_npy(dir / "images.npy", {data.size(), side, side}, pixels);
}

}  // namespace igcl
