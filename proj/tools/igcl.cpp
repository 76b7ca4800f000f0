// SPDX-FileCopyrightText: © 2026 igcl contributors
//
// SPDX-License-Identifier: Apache-2.0

// Command-line front end: data generation, pretraining, probes and the
// comparison drivers. Every command writes into --out.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "igcl/errors.hpp"
#include "igcl/experiments.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace igcl;

namespace {

struct Options {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::size_t k = 5;
  std::string checkpoint;
  std::string graphs;
};

TrainConfig load_config(const Options& o) {
  TrainConfig cfg;
  if (!o.config_path.empty()) {
    std::ifstream in(o.config_path);
    if (!in) throw ConfigError("cannot read config '" + o.config_path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    cfg = config_from_json(ss.str());
  }
  if (o.seed) cfg.seed = *o.seed;
  if (!o.out.empty()) cfg.out_dir = o.out;
  cfg.validate();
  return cfg;
}

fs::path out_dir(const TrainConfig& cfg) {
  fs::path dir(cfg.out_dir);
  fs::create_directories(dir);
  return dir;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
}

void write_meta(const fs::path& dir, const std::string& command, const TrainConfig& cfg, json extra = json::object()) {
  json meta;
  meta["command"] = command;
  meta["seed"] = cfg.seed;
  meta["config"] = json::parse(config_to_json(cfg));
  for (auto& [k, v] : extra.items()) meta[k] = v;
  write_text(dir / "run_meta.json", meta.dump(2) + "\n");
}

json report_meta(const EvalReport& r) {
  json j;
  j["mean_auroc"] = r.mean_auroc;
  j["warnings"] = r.warnings;
  return j;
}

void write_report(const fs::path& dir, const EvalReport& r) {
  write_text(dir / "metrics.csv", r.metrics_csv());
  write_text(dir / "roc_points.csv", r.roc_csv());
}

EvalOptions eval_options(const TrainConfig& cfg) {
  EvalOptions eo;
  eo.bootstrap = cfg.bootstrap;
  eo.seed = cfg.seed;
  return eo;
}

Model obtain_model(const Options& o, const TrainConfig& cfg, const std::vector<PairedExample>& data,
                   const Partitions& parts, const fs::path& dir) {
  if (!o.checkpoint.empty()) {
    std::ifstream in(o.checkpoint, std::ios::binary);
    if (!in) throw DataError("cannot read checkpoint '" + o.checkpoint + "'");
    Model m = init_model(cfg);
    m.params.assign_values(ParamStore::load(in));
    return m;
  }
  TrainResult tr = pretrain(cfg, data, parts.pretrain);
  write_loss_curve(dir / "loss_curve.csv", tr.loss_curve);
  save_checkpoint(dir / "checkpoint.bin", tr.model);
  return std::move(tr.model);
}

void cmd_generate(const Options& o) {
  const TrainConfig cfg = load_config(o);
  const auto dir = out_dir(cfg);
  const auto data = generate_for(cfg);
  write_dataset(dir, data);
  std::vector<ReportGraph> graphs;
  for (const auto& ex : data) graphs.push_back(ex.graph);
  write_text(dir / "stats.csv", graph_stats(graphs).to_csv());
  write_meta(dir, "generate", cfg, {{"examples", data.size()}});
}

void cmd_stats(const Options& o) {
  const TrainConfig cfg = load_config(o);
  const auto dir = out_dir(cfg);
  std::vector<ReportGraph> graphs;
  if (!o.graphs.empty()) {
    std::ifstream in(o.graphs);
    if (!in) throw DataError("cannot read corpus '" + o.graphs + "'");
    graphs = read_corpus(in);
  } else {
    for (const auto& ex : generate_for(cfg)) graphs.push_back(ex.graph);
  }
  write_text(dir / "stats.csv", graph_stats(graphs).to_csv());
  write_meta(dir, "stats", cfg, {{"graphs", graphs.size()}});
}

void cmd_pretrain(const Options& o) {
  const TrainConfig cfg = load_config(o);
  const auto dir = out_dir(cfg);
  const auto data = generate_for(cfg);
  const auto parts = split(data, SplitScheme::kPretrain, cfg.data_seed, cfg.split);
  const TrainResult tr = pretrain(cfg, data, parts.pretrain);
  write_loss_curve(dir / "loss_curve.csv", tr.loss_curve);
  save_checkpoint(dir / "checkpoint.bin", tr.model);
  write_meta(dir, "pretrain", cfg,
             {{"initial_reference_loss", tr.initial_reference_loss},
              {"final_reference_loss", tr.final_reference_loss},
              {"tau", tr.model.tau()},
              {"parameters", tr.model.params.scalar_count()}});
}

void run_probe(const Options& o, const std::string& command, SplitScheme scheme, std::size_t shots) {
  const TrainConfig cfg = load_config(o);
  const auto dir = out_dir(cfg);
  const auto data = generate_for(cfg);
  const auto parts = split(data, scheme, cfg.data_seed, cfg.split, shots, cfg.seed);
  const Model model = obtain_model(o, cfg, data, parts, dir);
  const auto out = probe_model(model, cfg, data, parts.probe_train, parts.test);
  const EvalReport r = evaluate(out, labels_of(data, parts.test), eval_options(cfg));
  write_report(dir, r);
  json extra = report_meta(r);
  extra["probe_train"] = parts.probe_train.size();
  extra["test"] = parts.test.size();
  if (shots) extra["shots"] = shots;
  write_meta(dir, command, cfg, extra);
}

void run_comparison(const Options& o, const std::string& command, bool augmentations) {
  TrainConfig cfg = load_config(o);
  if (augmentations) cfg.data_mode = DataMode::kCrossComponent;
  const auto dir = out_dir(cfg);
  const auto data = generate_for(cfg);
  auto log = [](const std::string& s) { std::cerr << s << '\n'; };
  const ComparisonTable t = augmentations ? compare_augmentations(cfg, data, log) : run_ablations(cfg, data, log);
  write_text(dir / "metrics.csv", t.summary_csv(cfg.bootstrap, cfg.seed));
  write_text(dir / "runs.csv", t.runs_csv());
  json means;
  for (const auto& v : t.variants) means[v] = t.mean_of(v, augmentations ? 4 : -1);
  write_meta(dir, command, cfg, {{augmentations ? "bit4_mean_auroc" : "mean_auroc", means}});
}

void cmd_ensemble(const Options& o) {
  const TrainConfig cfg = load_config(o);
  const auto dir = out_dir(cfg);
  const auto data = generate_for(cfg);
  const auto base = split(data, SplitScheme::kPretrain, cfg.data_seed, cfg.split);
  const auto test_y = labels_of(data, base.test);
  std::vector<ProbeOutput> members;
  json member_auroc = json::array();
  for (std::size_t j = 0; j < cfg.ensemble_members; ++j) {
    TrainConfig mc = cfg;
    mc.seed = cfg.seed + j;
    const auto parts = split(data, SplitScheme::kFewShot, cfg.data_seed, cfg.split, o.k, j);
    const TrainResult tr = pretrain(mc, data, parts.pretrain);
    members.push_back(probe_model(tr.model, mc, data, parts.probe_train, parts.test));
    EvalOptions quick;
    quick.bootstrap = 0;
    member_auroc.push_back(evaluate(members.back(), test_y, quick).mean_auroc);
    std::cerr << "member " << j << " mean " << member_auroc.back() << '\n';
  }
  const EvalReport r = ensemble(members, test_y, eval_options(cfg));
  write_report(dir, r);
  json extra = report_meta(r);
  extra["member_mean_auroc"] = member_auroc;
  extra["shots"] = o.k;
  write_meta(dir, "ensemble", cfg, extra);
}

int fail(const std::string& kind, const std::string& message, int code) {
  json err;
  err["error"] = kind;
  err["message"] = message;
  std::cerr << err.dump() << std::endl;
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Image-graph contrastive learning on synthetic paired data"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--config", o.config_path, "JSON configuration file");
  app.add_option("--seed", o.seed, "Overrides the configured seed");
  app.add_option("--out", o.out, "Output directory (overrides out_dir)");

  auto* generate = app.add_subcommand("generate", "Write a synthetic corpus");
  auto* stats = app.add_subcommand("stats", "Corpus statistics");
  stats->add_option("--graphs", o.graphs, "JSON-lines corpus; defaults to a generated one");
  auto* pretrain_cmd = app.add_subcommand("pretrain", "Contrastive pretraining");
  auto* probe = app.add_subcommand("probe", "Pretrain (or load) and run the 1% linear probe");
  probe->add_option("--checkpoint", o.checkpoint, "Load encoder weights instead of pretraining");
  auto* fewshot = app.add_subcommand("fewshot", "k-shot linear probe");
  fewshot->add_option("--k", o.k, "Positives per label")->check(CLI::IsMember({5, 10, 20, 50}));
  fewshot->add_option("--checkpoint", o.checkpoint, "Load encoder weights instead of pretraining");
  auto* ablate = app.add_subcommand("ablate", "Full model against the five ablations");
  auto* compare = app.add_subcommand("compare-aug", "Augmentation strategies on cross-component data");
  auto* ens = app.add_subcommand("ensemble", "Median-consensus ensemble of k-shot models");
  ens->add_option("--k", o.k, "Positives per label")->check(CLI::IsMember({5, 10, 20, 50}));
  for (auto* sub : {generate, stats, pretrain_cmd, probe, fewshot, ablate, compare, ens}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", e.what(), 2);
  }

  try {
    if (*generate) cmd_generate(o);
    else if (*stats) cmd_stats(o);
    else if (*pretrain_cmd) cmd_pretrain(o);
    else if (*probe) run_probe(o, "probe", SplitScheme::kProbe1Pct, 0);
    else if (*fewshot) run_probe(o, "fewshot", SplitScheme::kFewShot, o.k);
    else if (*ablate) run_comparison(o, "ablate", false);
    else if (*compare) run_comparison(o, "compare-aug", true);
    else if (*ens) cmd_ensemble(o);
  } catch (const Error& e) {
    return fail(e.kind(), e.what(), 1);
  } catch (const std::exception& e) {
    return fail("internal", e.what(), 1);
  }
  return 0;
}
