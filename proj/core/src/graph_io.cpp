#include "convkg/error.hpp"
#include "convkg/graph.hpp"
#include "convkg/io.hpp"

namespace convkg::graph {

using nlohmann::json;

namespace {

constexpr std::string_view kFormatName = "convkg-graph";

json ProvenanceJson(const std::vector<edges::Provenance>& provenance) {
  json out = json::array();
  for (const auto& p : provenance) {
    out.push_back({{"conversation", p.conversation_id}, {"utterances", p.utterances}, {"source", p.source}});
  }
  return out;
}

}  // namespace

json ToJson(const Node& n) {
  return json{{"id", n.id}, {"kind", ToString(n.kind)}, {"text", n.text}};
}

json ToJson(const Edge& e) {
  return json{{"kind", ToString(e.family)},
              {"relation", e.relation ? json(kb::ToString(*e.relation)) : json(nullptr)},
              {"subkind", e.subkind ? json(edges::ToString(*e.subkind)) : json(nullptr)},
              {"from", e.from},
              {"to", e.to},
              {"weight", e.weight},
              {"intent_label", e.intent_label ? json(ToString(*e.intent_label)) : json(nullptr)},
              {"provenance", ProvenanceJson(e.provenance)}};
}

json ToJson(const ScenarioGraph& s) {
  json nodes = json::array();
  for (const Node* n : s.nodes) nodes.push_back(ToJson(*n));
  json edges = json::array();
  for (const Edge* e : s.edges) edges.push_back(ToJson(*e));
  return json{{"scenario_id", s.scenario_id}, {"heads", s.heads}, {"nodes", std::move(nodes)},
              {"edges", std::move(edges)}};
}

Node NodeFromJson(const json& j) {
  Node n;
  try {
    n.id = j.at("id").get<std::string>();
    auto kind = ParseNodeKind(j.at("kind").get<std::string>());
    if (!kind) throw ValidationError("kind", "unknown node kind");
    n.kind = *kind;
    n.text = j.at("text").get<std::string>();
  } catch (const json::exception& e) {
    throw ValidationError("node", e.what());
  }
  return n;
}

Edge EdgeFromJson(const json& j) {
  Edge e;
  try {
    auto family = ParseEdgeFamily(j.at("kind").get<std::string>());
    if (!family) throw ValidationError("kind", "unknown edge kind '" + j.at("kind").get<std::string>() + "'");
    e.family = *family;
    if (auto it = j.find("relation"); it != j.end() && !it->is_null()) {
      auto r = kb::ParseRelation(it->get<std::string>());
      if (!r) throw ValidationError("relation", "unknown relation '" + it->get<std::string>() + "'");
      e.relation = *r;
    }
    if (auto it = j.find("subkind"); it != j.end() && !it->is_null()) {
      auto s = edges::ParseFlowSubkind(it->get<std::string>());
      if (!s) throw ValidationError("subkind", "unknown subkind '" + it->get<std::string>() + "'");
      e.subkind = *s;
    }
    e.from = j.at("from").get<std::string>();
    e.to = j.at("to").get<std::string>();
    if (auto it = j.find("intent_label"); it != j.end() && !it->is_null()) {
      auto i = ParseIntent(it->get<std::string>());
      if (!i) throw ValidationError("intent_label", "unknown intent '" + it->get<std::string>() + "'");
      e.intent_label = *i;
    }
    if (auto it = j.find("provenance"); it != j.end()) {
      for (const auto& p : *it) {
        edges::Provenance prov;
        prov.conversation_id = p.at("conversation").get<std::string>();
        prov.utterances = p.at("utterances").get<std::vector<std::size_t>>();
        prov.source = p.value("source", std::string(edges::kPipelineSource));
        e.provenance.push_back(std::move(prov));
      }
    }
    e.weight = j.value("weight", std::size_t{1});
  } catch (const json::exception& ex) {
    throw ValidationError("edge", ex.what());
  }
  return e;
}

std::string Serialize(const Graph& g) {
  std::string out = io::DumpLine(json{{"format", kFormatName},
                                      {"version", kFormatVersion},
                                      {"nodes", g.nodes().size()},
                                      {"edges", g.edge_count()}});
  out += '\n';
  for (const auto& [id, n] : g.nodes()) {
    json j = ToJson(n);
    j["record"] = "node";
    out += io::DumpLine(j);
    out += '\n';
  }
  for (const Edge* e : g.Edges()) {
    json j = ToJson(*e);
    j["record"] = "edge";
    out += io::DumpLine(j);
    out += '\n';
  }
  return out;
}

Graph Deserialize(std::string_view data, const std::string& source) {
  const auto lines = io::Lines(std::string(data));
  if (lines.empty()) throw ParseError(source, 1, "format", "missing header");
  json header;
  try {
    header = json::parse(lines[0]);
  } catch (const json::parse_error& e) {
    throw ParseError(source, 1, "format", e.what());
  }
  if (!header.is_object() || header.value("format", std::string()) != kFormatName) {
    throw ParseError(source, 1, "format", "not a convkg graph file");
  }
  if (!header.contains("version") || header["version"] != kFormatVersion) {
    throw ParseError(source, 1, "version",
                     "unsupported version " + header.value("version", json()).dump() +
                         ", expected " + std::to_string(kFormatVersion));
  }
  Graph g;
  bool in_edges = false;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::size_t lineno = i + 1;
    if (lines[i].empty()) continue;
    try {
      const json j = json::parse(lines[i]);
      const std::string record = j.value("record", std::string());
      if (record == "node") {
        if (in_edges) throw ValidationError("record", "node records must precede edge records");
        g.AddNode(NodeFromJson(j));
      } else if (record == "edge") {
        in_edges = true;
        Edge e = EdgeFromJson(j);
        const std::size_t stated = e.weight;
        const Edge& added = g.AddEdge(std::move(e));
        if (added.weight != stated) {
          throw ValidationError("weight", "stated weight " + std::to_string(stated) +
                                              " differs from provenance count");
        }
      } else {
        throw ValidationError("record", "expected 'node' or 'edge'");
      }
    } catch (const json::parse_error& e) {
      throw ParseError(source, lineno, "", e.what());
    } catch (const ValidationError& e) {
      throw ParseError(source, lineno, e.field(), e.what());
    } catch (const NotFoundError& e) {
      throw ParseError(source, lineno, "", e.what());
    }
  }
  if (header.contains("nodes") && header["nodes"] != g.nodes().size()) {
    throw ParseError(source, 1, "nodes", "header node count does not match the records");
  }
  if (header.contains("edges") && header["edges"] != g.edge_count()) {
    throw ParseError(source, 1, "edges", "header edge count does not match the records");
  }
  return g;
}

void SaveGraph(const Graph& g, const std::filesystem::path& path) {
  io::WriteFile(path, Serialize(g));
}

Graph LoadGraph(const std::filesystem::path& path) {
  return Deserialize(io::ReadFile(path), path.string());
}

}  // namespace convkg::graph
