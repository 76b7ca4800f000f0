// SPDX-FileCopyrightText: © 2026 igcl contributors
//
// SPDX-License-Identifier: Apache-2.0

// Acceptance suite: one PASS/FAIL line per criterion. Pass criterion numbers
// as arguments to run a subset.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "igcl/contrastive.hpp"
#include "igcl/errors.hpp"
#include "igcl/experiments.hpp"
#include "igcl/grad_check.hpp"
#include "igcl/metrics.hpp"

namespace fs = std::filesystem;
using namespace igcl;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v, int precision = 4) {
  std::ostringstream os;
  os << std::setprecision(precision) << v;
  return os.str();
}

TrainConfig load(const std::string& name) {
  std::ifstream in(fs::path(IGCL_CONFIG_DIR) / name);
  if (!in) throw ConfigError("missing config " + name);
  std::stringstream ss;
  ss << in.rdbuf();
  return config_from_json(ss.str());
}

fs::path out_dir(const std::string& name) {
  const fs::path p = fs::path("acceptance_out") / name;
  fs::create_directories(p);
  return p;
}

void write_file(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

void log(const std::string& s) { std::cerr << "  " << s << '\n'; }

ReportGraph random_graph(std::mt19937_64& rng, std::size_t n) {
  ReportGraph g;
  const NodeType types[] = {NodeType::kAnatomy, NodeType::kObsPresent, NodeType::kObsUncertain, NodeType::kObsAbsent};
  const Relation rels[] = {Relation::kModify, Relation::kLocatedAt, Relation::kSuggestiveOf};
  for (std::size_t i = 0; i < n; ++i) g.add_node("tok" + std::to_string(rng() % 40), types[rng() % 4]);
  for (std::size_t i = 1; i < n; ++i)
    if (rng() % 3 != 0) g.add_edge(i, rng() % i, rels[rng() % 3]);
  return g;
}

// ---------------------------------------------------------------------------

Outcome gradient_correctness() {
  const auto t0 = Clock::now();
  TrainConfig cfg;
  cfg.dim = 8;
  cfg.proj_dim = 4;
  cfg.heads = 2;
  cfg.image_dim = 8;
  cfg.image_heads = 2;
  cfg.dataset_size = 4;
  auto data = generate(7, 4, SynthConfig{});
  std::mt19937_64 rng(11);
  for (auto& ex : data) ex.graph = random_graph(rng, 6);
  Model model = init_model(cfg);
  std::normal_distribution<double> nd(0.0, 0.1);
  for (auto& [name, t] : model.params)
    if (name.ends_with(".b") || name.ends_with(".bo")) for (double& v : t.mutable_data()) v = nd(rng);
  const auto graphs = prepare_graphs(data, model);
  const std::vector<std::size_t> ids{0, 1, 2, 3};
  const ScalarFn f = [&](Tape& t, const Tensor&) { return batch_loss(t, model, data, graphs, ids); };

  double worst = 0.0;
  std::string worst_name;
  std::size_t checked = 0;
  for (auto& [name, t] : model.params) {
    std::vector<std::size_t> coords;
    if (name == "graph.text_embedding" || name == "graph.type_embedding") {
      // Only rows referenced by the batch; the rest have zero gradient on both sides.
      std::set<std::size_t> rows;
      for (const auto& g : graphs)
        for (const auto& n : g.graph.nodes) rows.insert(name == "graph.text_embedding" ? n.token : static_cast<std::size_t>(n.type));
      for (std::size_t r : rows)
        for (std::size_t j = 0; j < cfg.dim; ++j) coords.push_back(r * cfg.dim + j);
    }
    const auto r = grad_check_detailed(f, t, 1e-6, coords);
    checked += r.checked;
    if (r.max_rel_error > worst) {
      worst = r.max_rel_error;
      worst_name = name;
    }
  }
  const double secs = seconds_since(t0);
  return {worst < 1e-4 && secs < 60.0, "max rel error " + fmt(worst) + " (" + worst_name + ") over " +
                                           std::to_string(checked) + " coordinates in " + fmt(secs, 3) + " s"};
}

Outcome loss_oracles() {
  Tape tape(false);
  const double e = std::exp(1.0);
  const double identity = total_loss_from_similarity(tape, Tensor::eye(2), Tensor::scalar(1.0)).item();
  double worst = std::abs(identity + std::log(e / (e + 1.0)));
  for (std::size_t m : {2u, 5u, 16u, 64u}) {
    const double uniform = total_loss_from_similarity(tape, Tensor::full({m, m}, 0.42), Tensor::scalar(0.07)).item();
    worst = std::max(worst, std::abs(uniform - std::log(static_cast<double>(m))));
  }
  const Tensor z1 = Tensor::from({1, 3}, {0.3, -1.0, 2.0}), z2 = Tensor::from({1, 3}, {1.0, 0.5, 0.1});
  worst = std::max(worst, std::abs(total_loss(tape, make_pair_batch(tape, z1, z2, Tensor::scalar(0.07))).item()));
  return {worst < 1e-10, "max deviation from closed forms " + fmt(worst)};
}

Outcome cosine_scale_invariance() {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd(0.0, 1.0);
  std::uniform_real_distribution<double> log_c(-8.0, 8.0);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t m = 2 + rng() % 15, d = 2 + rng() % 31;
    Tensor zi = Tensor::zeros({m, d}), zg = Tensor::zeros({m, d});
    for (double& v : zi.mutable_data()) v = nd(rng);
    for (double& v : zg.mutable_data()) v = nd(rng);
    Tape tape(false);
    const Tensor tau = Tensor::scalar(0.07);
    const double base = total_loss(tape, make_pair_batch(tape, zi, zg, tau)).item();
    Tensor& target = trial % 2 ? zi : zg;
    const std::size_t row = rng() % m;
    const double c = std::exp(log_c(rng));
    for (std::size_t j = 0; j < d; ++j) target.mutable_data()[row * d + j] *= c;
    worst = std::max(worst, std::abs(total_loss(tape, make_pair_batch(tape, zi, zg, tau)).item() - base));
  }
  return {worst < 1e-10, "max loss change " + fmt(worst) + " over 200 rescalings"};
}

Outcome permutation_invariance() {
  std::mt19937_64 rng(4);
  double worst = 0.0;
  const ReadoutKind readouts[] = {ReadoutKind::kMean, ReadoutKind::kMin, ReadoutKind::kMax,
                                  ReadoutKind::kGlobalAttention};
  for (int trial = 0; trial < 100; ++trial) {
    GraphEncoderConfig cfg;
    cfg.readout = readouts[trial % 4];
    cfg.attention = trial % 2 == 0;
    ParamStore p;
    init_graph_encoder(p, cfg, rng);
    ReportGraph g = random_graph(rng, 2 + rng() % 15);
    if (trial % 5 == 0) g = augment(g, AugmentStrategy::kPrimary);
    std::vector<std::size_t> perm(g.nodes.size());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    ReportGraph h;
    h.nodes.resize(g.nodes.size());
    for (std::size_t i = 0; i < perm.size(); ++i) h.nodes[perm[i]] = g.nodes[i];
    for (auto it = g.edges.rbegin(); it != g.edges.rend(); ++it) h.add_edge(perm[it->src], perm[it->dst], it->relation);
    Tape tape(false);
    const Tensor a = encode_graph(tape, g, p, cfg), b = encode_graph(tape, h, p, cfg);
    for (std::size_t i = 0; i < a.numel(); ++i) worst = std::max(worst, std::abs(a.data()[i] - b.data()[i]));
  }
  return {worst < 1e-9, "max deviation " + fmt(worst) + " over 100 graphs"};
}

Outcome flow_dichotomy() {
  // Components A = {0, 1, 2} and B = {3, 4, 5}.
  ReportGraph g;
  g.add_node("opacity", NodeType::kObsPresent);
  g.add_node("lung", NodeType::kAnatomy);
  g.add_node("mild", NodeType::kObsPresent);
  g.add_node("effusion", NodeType::kObsUncertain);
  g.add_node("base", NodeType::kAnatomy);
  g.add_node("edema", NodeType::kObsAbsent);
  g.add_edge(0, 1, Relation::kLocatedAt);
  g.add_edge(2, 0, Relation::kModify);
  g.add_edge(3, 5, Relation::kSuggestiveOf);
  g.add_edge(5, 4, Relation::kLocatedAt);
  ReportGraph perturbed = g;
  perturbed.nodes[0] = GraphNode{"nodule", hash_token("nodule"), NodeType::kObsAbsent};

  double off_max = 0.0;
  std::size_t on_changed = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    for (bool attention : {false, true}) {
      GraphEncoderConfig cfg;
      cfg.attention = attention;
      ParamStore p;
      std::mt19937_64 rng(mix_seed(seed, 0xF10));
      init_graph_encoder(p, cfg, rng);
      Tape tape(false);
      const Tensor a = graph_node_states(tape, g, p, cfg), b = graph_node_states(tape, perturbed, p, cfg);
      double change = 0.0;
      for (std::size_t v = 3; v < 6; ++v)
        for (std::size_t j = 0; j < cfg.dim; ++j) change = std::max(change, std::abs(a.at(v, j) - b.at(v, j)));
      if (attention) on_changed += change > 0.0;
      else off_max = std::max(off_max, change);
    }
  }
  return {off_max == 0.0 && on_changed >= 99,
          "attention off: max B change " + fmt(off_max) + "; attention on: changed in " +
              std::to_string(on_changed) + "/100"};
}

Outcome augmentation_direction() {
  const auto t0 = Clock::now();
  const TrainConfig cfg = load("augmentations.json");
  const auto data = generate_for(cfg);
  const ComparisonTable t = compare_augmentations(cfg, data, log);
  const auto dir = out_dir("augmentations");
  write_file(dir / "runs.csv", t.runs_csv());
  write_file(dir / "metrics.csv", t.summary_csv(cfg.bootstrap, cfg.seed));
  const double att = t.mean_of("ATTENTION", 4), none = t.mean_of("NONE", 4);
  const double dummy = t.mean_of("DUMMY", 4), meta = t.mean_of("META", 4), primary = t.mean_of("PRIMARY", 4);
  const double aug_hi = std::max({dummy, meta, primary}), aug_lo = std::min({dummy, meta, primary});
  const double secs = seconds_since(t0);
  const bool pass = att > aug_hi && aug_lo > none && none >= 0.45 && none <= 0.55 && secs < 1800.0;
  return {pass, "bit-4 AUROC ATTENTION " + fmt(att) + ", DUMMY " + fmt(dummy) + ", META " + fmt(meta) + ", PRIMARY " +
                    fmt(primary) + ", NONE " + fmt(none) + " over " + std::to_string(cfg.seeds) + " seeds in " +
                    fmt(secs, 3) + " s"};
}

Outcome ablation_direction() {
  const TrainConfig cfg = load("ablations.json");
  const auto data = generate_for(cfg);
  const ComparisonTable t = run_ablations(cfg, data, log);
  const auto dir = out_dir("ablations");
  write_file(dir / "runs.csv", t.runs_csv());
  write_file(dir / "metrics.csv", t.summary_csv(cfg.bootstrap, cfg.seed));
  const double full = t.mean_of("FULL");
  bool pass = true;
  std::string detail = "FULL " + fmt(full);
  for (std::size_t i = 1; i < t.variants.size(); ++i) {
    const double m = t.mean_of(t.variants[i]);
    pass = pass && full > m;
    detail += ", " + t.variants[i] + " " + fmt(m);
  }
  return {pass, detail + " over " + std::to_string(cfg.seeds) + " seeds"};
}

Outcome fewshot_monotone() {
  const TrainConfig cfg = load("fewshot.json");
  const auto data = generate_for(cfg);
  const std::vector<std::size_t> shots{5, 10, 20, 50};
  const FewShotTable t = fewshot_curve(cfg, data, shots, cfg.repetitions, log);
  const auto dir = out_dir("fewshot");
  write_file(dir / "runs.csv", t.csv());
  write_file(dir / "metrics.csv", t.summary_csv(cfg.bootstrap, cfg.seed));
  // A step passes when the next mean is not below the lower CI bound of the
  // previous shot count.
  bool pass = true;
  std::string detail;
  double prev_lo = -1.0;
  for (std::size_t k = 0; k < shots.size(); ++k) {
    const auto& v = t.mean_auroc[k];
    const double m = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    const Interval ci = bootstrap_mean_ci(v, cfg.bootstrap, mix_seed(cfg.seed, shots[k]));
    if (k > 0) pass = pass && m >= prev_lo;
    prev_lo = std::min(ci.lo, m);
    detail += (k ? ", " : "") + std::to_string(shots[k]) + "-shot " + fmt(m) + " [" + fmt(ci.lo) + ", " + fmt(ci.hi) + "]";
  }
  return {pass, detail + " over " + std::to_string(cfg.repetitions) + " seeds"};
}

Outcome ensemble_wins() {
  const TrainConfig cfg = load("ensemble.json");
  const auto data = generate_for(cfg);
  const EnsembleTable t = ensemble_study(cfg, data, 5, log);
  write_file(out_dir("ensemble") / "runs.csv", t.csv());
  double ens = 0.0, med = 0.0;
  for (const auto& r : t.repetitions) {
    ens += r.ensemble_mean_auroc / static_cast<double>(t.repetitions.size());
    med += r.median_member / static_cast<double>(t.repetitions.size());
  }
  return {t.wins() >= 9 && t.repetitions.size() == 10,
          "ensemble >= median member in " + std::to_string(t.wins()) + "/" + std::to_string(t.repetitions.size()) +
              " repetitions (mean ensemble " + fmt(ens) + ", mean median member " + fmt(med) + ")"};
}

Outcome metric_oracles() {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng() % 80;
    std::vector<double> s(n);
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = static_cast<int>(rng() % 2);
      s[i] = trial % 2 ? std::round(u(rng) * 5.0) / 5.0 : u(rng) + 0.2 * y[i];
    }
    y[0] = 0;
    y[1] = 1;
    double wins = 0.0, pairs = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (y[i] && !y[j]) {
          pairs += 1.0;
          wins += s[i] > s[j] ? 1.0 : (s[i] == s[j] ? 0.5 : 0.0);
        }
    worst = std::max(worst, std::abs(auroc(s, y) - wins / pairs));
  }
  bool mcc_exact = true;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng() % 50;
    std::vector<int> p(n), y(n);
    double tp = 0, tn = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < n; ++i) {
      p[i] = static_cast<int>(rng() % 2);
      y[i] = static_cast<int>(rng() % 2);
      tp += p[i] && y[i];
      tn += !p[i] && !y[i];
      fp += p[i] && !y[i];
      fn += !p[i] && y[i];
    }
    const double denom = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn);
    mcc_exact = mcc_exact && mcc(p, y) == (denom == 0.0 ? 0.0 : (tp * tn - fp * fn) / std::sqrt(denom));
  }
  const bool zero_denominator = mcc(std::vector<int>{1, 1, 1}, std::vector<int>{0, 1, 1}) == 0.0 &&
                                mcc(std::vector<int>{0, 0}, std::vector<int>{0, 0}) == 0.0;
  return {worst < 1e-12 && mcc_exact && zero_denominator,
          "auroc max deviation " + fmt(worst) + "; mcc exact " + (mcc_exact ? "yes" : "no") +
              "; zero-denominator convention " + (zero_denominator ? "yes" : "no")};
}

Outcome structural_transforms() {
  const auto standard = generate(21, 500, SynthConfig{});
  SynthConfig cross;
  cross.mode = DataMode::kCrossComponent;
  const auto crossed = generate(22, 500, cross);
  std::size_t failures = 0, graphs = 0;
  for (const auto* set : {&standard, &crossed}) {
    for (const auto& ex : *set) {
      ++graphs;
      const auto& g = ex.graph;
      bool ok = serialize_graph(parse_graph(serialize_graph(g))) == serialize_graph(g);
      for (auto s : {AugmentStrategy::kDummy, AugmentStrategy::kMeta, AugmentStrategy::kPrimary}) {
        const auto a = augment(g, s);
        ok = ok && connected_components(a).count == 1 && a.nodes.size() >= g.nodes.size() &&
             std::equal(g.nodes.begin(), g.nodes.end(), a.nodes.begin()) &&
             std::equal(g.edges.begin(), g.edges.end(), a.edges.begin());
      }
      failures += !ok;
    }
  }
  return {failures == 0, std::to_string(graphs - failures) + "/" + std::to_string(graphs) +
                             " graphs connected by all strategies with originals kept and round-trip identity"};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome cli_determinism() {
  const auto dir = out_dir("determinism");
  const fs::path cfg = dir / "config.json";
  write_file(cfg, R"({"dim": 16, "proj_dim": 8, "heads": 2, "image_dim": 16, "image_heads": 2, "steps": 20,
  "dataset_size": 600, "probe_fraction": 0.2, "bootstrap": 200, "seeds": 2, "ensemble_members": 2,
  "learning_rate": 0.001})");
  const std::vector<std::string> commands{"probe", "fewshot --k 5", "ablate", "compare-aug", "ensemble --k 5"};
  std::size_t identical = 0;
  std::string detail;
  for (const auto& c : commands) {
    std::string bodies[2];
    for (int run = 0; run < 2; ++run) {
      const fs::path out = dir / (c.substr(0, c.find(' ')) + "_" + std::to_string(run));
      fs::remove_all(out);
      const std::string cmd = std::string(IGCL_CLI_PATH) + " --config " + cfg.string() + " --seed 5 --out " +
                              out.string() + " " + c + " 2> /dev/null";
      const int status = std::system(cmd.c_str());
      if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) bodies[run] = "exit " + std::to_string(status);
      else bodies[run] = slurp(out / "metrics.csv");
    }
    const bool same = !bodies[0].empty() && bodies[0].rfind("exit", 0) != 0 && bodies[0] == bodies[1];
    identical += same;
    detail += (detail.empty() ? "" : ", ") + c.substr(0, c.find(' ')) + (same ? " identical" : " DIFFERS");
  }
  return {identical == commands.size(), "metrics.csv reruns: " + detail};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {1, "gradient correctness", gradient_correctness},
      {2, "loss closed forms", loss_oracles},
      {3, "cosine scale invariance", cosine_scale_invariance},
      {4, "permutation invariance", permutation_invariance},
      {5, "cross-component flow dichotomy", flow_dichotomy},
      {6, "augmentation ordering on cross-component data", augmentation_direction},
      {7, "full model beats every ablation", ablation_direction},
      {8, "few-shot AUROC non-decreasing", fewshot_monotone},
      {9, "median ensemble beats median member", ensemble_wins},
      {10, "metric oracles", metric_oracles},
      {11, "structural transforms", structural_transforms},
      {12, "CLI determinism", cli_determinism},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failed = 0;
  for (const auto& c : all) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << c.id << " (" << c.name << "): " << o.detail
              << std::endl;
  }
  std::cout << (failed ? std::to_string(failed) + " criteria failed" : std::string("all criteria passed"))
            << std::endl;
  return failed ? 1 : 0;
}
