// SPDX-FileCopyrightText: © 2026 igcl contributors
//
// SPDX-License-Identifier: Apache-2.0

#include "igcl/graph.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>
#include <tuple>

namespace igcl {

std::string_view to_string(NodeType t) {
  switch (t) {
    case NodeType::kAnatomy: return "ANAT";
    case NodeType::kObsPresent: return "OBS-DP";
    case NodeType::kObsUncertain: return "OBS-U";
    case NodeType::kObsAbsent: return "OBS-DA";
    case NodeType::kSyntheticAug: return "AUG";
    case NodeType::kNeutral: return "NEUTRAL";
  }
  return "?";
}

std::string_view to_string(Relation r) {
  switch (r) {
    case Relation::kModify: return "modify";
    case Relation::kLocatedAt: return "located_at";
    case Relation::kSuggestiveOf: return "suggestive_of";
    case Relation::kAugLink: return "aug_link";
    case Relation::kGeneric: return "generic";
  }
  return "?";
}

std::string_view to_string(AugmentStrategy s) {
  switch (s) {
    case AugmentStrategy::kDummy: return "DUMMY";
    case AugmentStrategy::kMeta: return "META";
    case AugmentStrategy::kPrimary: return "PRIMARY";
  }
  return "?";
}

std::string_view to_string(AblationMode m) {
  switch (m) {
    case AblationMode::kDropNodeText: return "DROP_NODE_TEXT";
    case AblationMode::kDropNodeType: return "DROP_NODE_TYPE";
    case AblationMode::kDropRelationTypes: return "DROP_RELATION_TYPES";
    case AblationMode::kDropStructure: return "DROP_STRUCTURE";
    case AblationMode::kTripletsOnly: return "TRIPLETS_ONLY";
  }
  return "?";
}

AugmentStrategy parse_augment_strategy(std::string_view s) {
  for (auto v : {AugmentStrategy::kDummy, AugmentStrategy::kMeta, AugmentStrategy::kPrimary})
    if (to_string(v) == s) return v;
  throw ConfigError("unknown augmentation strategy '" + std::string(s) + "'");
}

AblationMode parse_ablation_mode(std::string_view s) {
  for (auto v : {AblationMode::kDropNodeText, AblationMode::kDropNodeType, AblationMode::kDropRelationTypes,
                 AblationMode::kDropStructure, AblationMode::kTripletsOnly})
    if (to_string(v) == s) return v;
  throw ConfigError("unknown ablation mode '" + std::string(s) + "'");
}

std::uint32_t hash_token(std::string_view text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return static_cast<std::uint32_t>(1 + h % (kVocabSize - 1));
}

std::size_t ReportGraph::add_node(std::string text, NodeType type) {
  const auto token = hash_token(text);
  nodes.push_back({std::move(text), token, type});
  return nodes.size() - 1;
}

void validate(const ReportGraph& g) {
  if (g.nodes.empty()) throw DataError("graph '" + g.graph_id + "' has no nodes");
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    if (g.nodes[i].token >= kVocabSize) {
      throw DataError("node " + std::to_string(i) + " token " + std::to_string(g.nodes[i].token) +
                      " outside vocabulary");
    }
  }
  std::set<std::tuple<std::size_t, std::size_t, Relation>> seen;
  for (const auto& e : g.edges) {
    if (e.src >= g.nodes.size() || e.dst >= g.nodes.size()) {
      throw DataError("edge " + std::to_string(e.src) + "->" + std::to_string(e.dst) + " references a missing node");
    }
    if (e.src == e.dst) throw DataError("self-loop on node " + std::to_string(e.src));
    if (!seen.emplace(e.src, e.dst, e.relation).second) {
      throw DataError("duplicate edge " + std::to_string(e.src) + "->" + std::to_string(e.dst) + " (" +
                      std::string(to_string(e.relation)) + ")");
    }
  }
}

// ---------------------------------------------------------------------------
// Components

namespace {

class DisjointSet {
 public:
  explicit DisjointSet(std::size_t n) : parent_(n), rank_(n, 0) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> rank_;
};

}  // namespace

std::vector<std::vector<std::size_t>> ComponentLabeling::members() const {
  std::vector<std::vector<std::size_t>> out(count);
  for (std::size_t v = 0; v < component.size(); ++v) out[component[v]].push_back(v);
  return out;
}

ComponentLabeling connected_components(const ReportGraph& g) {
  const std::size_t n = g.nodes.size();
  DisjointSet ds(n);
  for (const auto& e : g.edges) ds.unite(e.src, e.dst);
  ComponentLabeling out;
  out.component.assign(n, 0);
  std::vector<std::size_t> id_of_root(n, n);
  for (std::size_t v = 0; v < n; ++v) {
    const std::size_t r = ds.find(v);
    if (id_of_root[r] == n) id_of_root[r] = out.count++;
    out.component[v] = id_of_root[r];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Augmentation

ReportGraph augment(const ReportGraph& g, AugmentStrategy strategy) {
  ReportGraph out = g;
  const std::size_t n = g.nodes.size();
  if (strategy == AugmentStrategy::kDummy) {
    const std::size_t dummy = out.add_node("[dummy]", NodeType::kSyntheticAug);
    for (std::size_t v = 0; v < n; ++v) out.add_edge(v, dummy, Relation::kAugLink);
    return out;
  }

  const auto labels = connected_components(g);
  std::vector<std::size_t> meta(labels.count);
  for (std::size_t c = 0; c < labels.count; ++c) meta[c] = out.add_node("[meta]", NodeType::kSyntheticAug);
  for (std::size_t v = 0; v < n; ++v) out.add_edge(v, meta[labels.component[v]], Relation::kAugLink);

  if (strategy == AugmentStrategy::kMeta) {
    for (std::size_t a = 0; a < labels.count; ++a)
      for (std::size_t b = a + 1; b < labels.count; ++b) out.add_edge(meta[a], meta[b], Relation::kAugLink);
  } else {
    const std::size_t primary = out.add_node("[primary]", NodeType::kSyntheticAug);
    for (std::size_t c = 0; c < labels.count; ++c) out.add_edge(meta[c], primary, Relation::kAugLink);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Ablation

AblatedGraph ablate(const ReportGraph& g, AblationMode mode) {
  AblatedGraph out;
  out.mode = mode;
  out.graph = g;
  switch (mode) {
    case AblationMode::kDropNodeText:
      for (auto& node : out.graph.nodes) {
        node.text = "[unk]";
        node.token = kUnkToken;
      }
      break;
    case AblationMode::kDropNodeType:
      for (auto& node : out.graph.nodes) node.type = NodeType::kNeutral;
      break;
    case AblationMode::kDropRelationTypes: {
      // Parallel edges that differed only in relation collapse into one.
      std::set<std::pair<std::size_t, std::size_t>> seen;
      std::vector<GraphEdge> edges;
      for (const auto& e : g.edges) {
        if (seen.emplace(e.src, e.dst).second) edges.push_back({e.src, e.dst, Relation::kGeneric});
      }
      out.graph.edges = std::move(edges);
      break;
    }
    case AblationMode::kDropStructure:
      out.graph.edges.clear();
      break;
    case AblationMode::kTripletsOnly: {
      std::vector<std::size_t> remap(g.nodes.size(), g.nodes.size());
      ReportGraph reduced;
      reduced.graph_id = g.graph_id;
      for (const auto& e : g.edges) {
        for (std::size_t v : {e.src, e.dst}) {
          if (remap[v] == g.nodes.size()) {
            remap[v] = reduced.nodes.size();
            reduced.nodes.push_back(g.nodes[v]);
          }
        }
        reduced.edges.push_back({remap[e.src], remap[e.dst], e.relation});
        out.triples.push_back({g.nodes[e.src].token, e.relation, g.nodes[e.dst].token});
      }
      out.graph = std::move(reduced);
      break;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Statistics

StatsTable graph_stats(const std::vector<ReportGraph>& corpus) {
  if (corpus.empty()) throw DataError("graph_stats needs a nonempty corpus");
  StatsTable t;
  t.graphs = corpus.size();
  for (auto r : {Relation::kModify, Relation::kLocatedAt, Relation::kSuggestiveOf})
    t.relation_freq[std::string(to_string(r))] = 0;
  for (const auto& g : corpus) {
    const std::size_t comps = connected_components(g).count;
    ++t.node_hist[g.nodes.size()];
    ++t.edge_hist[g.edges.size()];
    ++t.component_hist[comps];
    for (const auto& e : g.edges) ++t.relation_freq[std::string(to_string(e.relation))];
    t.mean_nodes += static_cast<double>(g.nodes.size());
    t.mean_edges += static_cast<double>(g.edges.size());
    t.mean_components += static_cast<double>(comps);
  }
  const auto n = static_cast<double>(corpus.size());
  t.mean_nodes /= n;
  t.mean_edges /= n;
  t.mean_components /= n;
  return t;
}

std::string StatsTable::to_csv() const {
  std::ostringstream os;
  os << "section,key,value\n";
  os << "summary,graphs," << graphs << '\n';
  os << "summary,mean_nodes," << mean_nodes << '\n';
  os << "summary,mean_edges," << mean_edges << '\n';
  os << "summary,mean_components," << mean_components << '\n';
  for (const auto& [k, v] : node_hist) os << "node_count," << k << ',' << v << '\n';
  for (const auto& [k, v] : edge_hist) os << "edge_count," << k << ',' << v << '\n';
  for (const auto& [k, v] : component_hist) os << "component_count," << k << ',' << v << '\n';
  for (const auto& [k, v] : relation_freq) os << "relation," << k << ',' << v << '\n';
  return os.str();
}

}  // namespace igcl
