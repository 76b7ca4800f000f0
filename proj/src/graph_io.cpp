// SPDX-FileCopyrightText: © 2026 igcl contributors
//
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <istream>
#include <ostream>
#include <set>
#include <tuple>

#include "igcl/graph.hpp"
#include "json.hpp"

namespace igcl {

using json = nlohmann::json;
using Code = GraphParseError::Code;

namespace {

NodeType parse_type(const std::string& s, std::size_t index) {
  if (s == "ANAT") return NodeType::kAnatomy;
  if (s == "OBS-DP") return NodeType::kObsPresent;
  if (s == "OBS-U") return NodeType::kObsUncertain;
  if (s == "OBS-DA") return NodeType::kObsAbsent;
  throw GraphParseError(Code::kUnknownType, "node " + std::to_string(index) + ": unknown type '" + s + "'");
}

Relation parse_relation(const std::string& s, std::size_t index) {
  if (s == "modify") return Relation::kModify;
  if (s == "located_at") return Relation::kLocatedAt;
  if (s == "suggestive_of") return Relation::kSuggestiveOf;
  throw GraphParseError(Code::kUnknownRelation, "edge " + std::to_string(index) + ": unknown relation '" + s + "'");
}

const json& field(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw GraphParseError(Code::kSchema, where + ": missing field '" + key + "'");
  return *it;
}

std::size_t index_field(const json& obj, const char* key, const std::string& where) {
  const json& v = field(obj, key, where);
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
    throw GraphParseError(Code::kSchema, where + ": '" + key + "' must be a nonnegative integer");
  }
  return v.get<std::size_t>();
}

std::string string_field(const json& obj, const char* key, const std::string& where) {
  const json& v = field(obj, key, where);
  if (!v.is_string()) throw GraphParseError(Code::kSchema, where + ": '" + key + "' must be a string");
  return v.get<std::string>();
}

}  // namespace

ReportGraph parse_graph(std::string_view document) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    throw GraphParseError(Code::kMalformedJson, std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw GraphParseError(Code::kSchema, "document is not a JSON object");

  ReportGraph g;
  g.graph_id = string_field(doc, "graph_id", "document");
  const json& nodes = field(doc, "nodes", "document");
  const json& edges = field(doc, "edges", "document");
  if (!nodes.is_array() || !edges.is_array()) {
    throw GraphParseError(Code::kSchema, "'nodes' and 'edges' must be arrays");
  }
  if (nodes.empty()) throw GraphParseError(Code::kEmptyNodes, "graph '" + g.graph_id + "' has an empty node list");

  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const std::string where = "node " + std::to_string(i);
    if (!nodes[i].is_object()) throw GraphParseError(Code::kSchema, where + " is not an object");
    std::string text = string_field(nodes[i], "text", where);
    const NodeType type = parse_type(string_field(nodes[i], "type", where), i);
    g.add_node(std::move(text), type);
  }

  std::set<std::tuple<std::size_t, std::size_t, Relation>> seen;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const std::string where = "edge " + std::to_string(i);
    if (!edges[i].is_object()) throw GraphParseError(Code::kSchema, where + " is not an object");
    const std::size_t src = index_field(edges[i], "src", where);
    const std::size_t dst = index_field(edges[i], "dst", where);
    const Relation rel = parse_relation(string_field(edges[i], "rel", where), i);
    for (std::size_t end : {src, dst}) {
      if (end >= g.nodes.size()) {
        throw GraphParseError(Code::kDanglingEndpoint, where + ": endpoint " + std::to_string(end) + " but only " +
                                                           std::to_string(g.nodes.size()) + " nodes");
      }
    }
    if (src == dst) throw GraphParseError(Code::kSelfLoop, where + ": self-loop on node " + std::to_string(src));
    if (!seen.emplace(src, dst, rel).second) {
      throw GraphParseError(Code::kDuplicateTriple, where + ": duplicate (" + std::to_string(src) + ", " +
                                                        std::to_string(dst) + ", " + std::string(to_string(rel)) +
                                                        ")");
    }
    g.add_edge(src, dst, rel);
  }
  return g;
}

std::string serialize_graph(const ReportGraph& g) {
  json doc;
  doc["graph_id"] = g.graph_id;
  doc["nodes"] = json::array();
  for (const auto& n : g.nodes) doc["nodes"].push_back({{"text", n.text}, {"type", std::string(to_string(n.type))}});
  std::vector<GraphEdge> edges = g.edges;
  std::sort(edges.begin(), edges.end());
  doc["edges"] = json::array();
  for (const auto& e : edges)
    doc["edges"].push_back({{"src", e.src}, {"dst", e.dst}, {"rel", std::string(to_string(e.relation))}});
  return doc.dump();
}

std::vector<ReportGraph> read_corpus(std::istream& in) {
  std::vector<ReportGraph> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(parse_graph(line));
    } catch (const GraphParseError& e) {
      throw GraphParseError(e.code(), "line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

void write_corpus(std::ostream& out, const std::vector<ReportGraph>& corpus) {
  for (const auto& g : corpus) out << serialize_graph(g) << '\n';
}

}  // namespace igcl
