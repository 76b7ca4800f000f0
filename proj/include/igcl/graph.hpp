// SPDX-FileCopyrightText: © 2026 igcl contributors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "igcl/errors.hpp"

namespace igcl {

inline constexpr std::size_t kVocabSize = 4096;
/// Reserved token for ablated node text; never produced by hashing.
inline constexpr std::uint32_t kUnkToken = 0;

enum class NodeType : std::uint8_t {
  kAnatomy,
  kObsPresent,
  kObsUncertain,
  kObsAbsent,
  kSyntheticAug,
  kNeutral,  // reserved, produced only by the node-type ablation
};
inline constexpr std::size_t kNodeTypeCount = 6;

enum class Relation : std::uint8_t {
  kModify,
  kLocatedAt,
  kSuggestiveOf,
  kAugLink,  // added by augmentation, carries no relation transform
  kGeneric,  // single relation left by the relation-type ablation
};
/// Relations that own learned weights (each also gets an inverse).
inline constexpr std::size_t kLearnedRelationCount = 3;

enum class AugmentStrategy { kDummy, kMeta, kPrimary };

enum class AblationMode { kDropNodeText, kDropNodeType, kDropRelationTypes, kDropStructure, kTripletsOnly };

std::string_view to_string(NodeType t);
std::string_view to_string(Relation r);
std::string_view to_string(AugmentStrategy s);
std::string_view to_string(AblationMode m);
AugmentStrategy parse_augment_strategy(std::string_view s);
AblationMode parse_ablation_mode(std::string_view s);

/// Stable FNV-1a hash of node text into [1, kVocabSize).
std::uint32_t hash_token(std::string_view text);

struct GraphNode {
  std::string text;
  std::uint32_t token = kUnkToken;
  NodeType type = NodeType::kAnatomy;

  bool operator==(const GraphNode&) const = default;
};

struct GraphEdge {
  std::size_t src = 0;
  std::size_t dst = 0;
  Relation relation = Relation::kModify;

  bool operator==(const GraphEdge&) const = default;
  auto operator<=>(const GraphEdge&) const = default;
};

struct ReportGraph {
  std::string graph_id;
  std::vector<GraphNode> nodes;
  std::vector<GraphEdge> edges;

  std::size_t node_count() const { return nodes.size(); }
  bool operator==(const ReportGraph&) const = default;

  /// Appends a node whose token is hashed from `text`.
  std::size_t add_node(std::string text, NodeType type);
  void add_edge(std::size_t src, std::size_t dst, Relation rel) { edges.push_back({src, dst, rel}); }
};

/// Throws DataError when a structural invariant does not hold.
void validate(const ReportGraph& g);

struct ComponentLabeling {
  std::vector<std::size_t> component;  // per node
  std::size_t count = 0;

  std::vector<std::vector<std::size_t>> members() const;
};

/// Undirected connectivity. Ids follow the smallest member node index.
ComponentLabeling connected_components(const ReportGraph& g);

/// Connects all components with SYNTHETIC_AUG nodes and AUG_LINK edges.
/// Original nodes keep their indices; original edges keep their order.
ReportGraph augment(const ReportGraph& g, AugmentStrategy strategy);

struct Triple {
  std::uint32_t src_token = 0;
  Relation relation = Relation::kModify;
  std::uint32_t dst_token = 0;

  bool operator==(const Triple&) const = default;
};

struct AblatedGraph {
  AblationMode mode = AblationMode::kDropNodeText;
  ReportGraph graph;            // the reduced graph (nodes only for DROP_STRUCTURE)
  std::vector<Triple> triples;  // populated for TRIPLETS_ONLY
};

AblatedGraph ablate(const ReportGraph& g, AblationMode mode);

// ---------------------------------------------------------------------------
// JSON ingestion

class GraphParseError : public DataError {
 public:
  enum class Code {
    kMalformedJson,
    kSchema,
    kUnknownType,
    kUnknownRelation,
    kDanglingEndpoint,
    kSelfLoop,
    kDuplicateTriple,
    kEmptyNodes,
  };
  GraphParseError(Code code, const std::string& what) : DataError(what), code_(code) {}
  Code code() const { return code_; }
  const char* kind() const noexcept override { return "graph_parse"; }

 private:
  Code code_;
};

ReportGraph parse_graph(std::string_view document);
/// Canonical single-line JSON: edges sorted by (src, dst, rel).
std::string serialize_graph(const ReportGraph& g);

std::vector<ReportGraph> read_corpus(std::istream& in);
void write_corpus(std::ostream& out, const std::vector<ReportGraph>& corpus);

// ---------------------------------------------------------------------------
// Corpus statistics

struct StatsTable {
  std::size_t graphs = 0;
  std::map<std::size_t, std::size_t> node_hist;
  std::map<std::size_t, std::size_t> edge_hist;
  std::map<std::size_t, std::size_t> component_hist;
  std::map<std::string, std::size_t> relation_freq;
  double mean_nodes = 0.0;
  double mean_edges = 0.0;
  double mean_components = 0.0;

  /// CSV with header `section,key,value`.
  std::string to_csv() const;
};

StatsTable graph_stats(const std::vector<ReportGraph>& corpus);

}  // namespace igcl
