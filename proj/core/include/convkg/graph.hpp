#ifndef CONVKG_GRAPH_HPP_
#define CONVKG_GRAPH_HPP_

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "convkg/corpus.hpp"
#include "convkg/edges.hpp"
#include "convkg/kb.hpp"
#include "convkg/labels.hpp"
#include "convkg/link.hpp"

// Unified store over KB triples and dialog-flow edges.
namespace convkg::graph {

enum class NodeKind { kEventHead, kEntityHead, kTail };

std::string_view ToString(NodeKind k);
std::optional<NodeKind> ParseNodeKind(std::string_view s);

struct Node {
  std::string id;
  NodeKind kind = NodeKind::kTail;
  std::string text;
  friend bool operator==(const Node&, const Node&) = default;
};

enum class EdgeFamily { kAtomic, kEventFlow, kConceptFlow, kEmotionCause, kEmotionIntent };

inline constexpr std::array<EdgeFamily, 5> kAllFamilies = {
    EdgeFamily::kAtomic, EdgeFamily::kEventFlow, EdgeFamily::kConceptFlow,
    EdgeFamily::kEmotionCause, EdgeFamily::kEmotionIntent};

std::string_view ToString(EdgeFamily f);
std::optional<EdgeFamily> ParseEdgeFamily(std::string_view s);
EdgeFamily FamilyOf(edges::EdgeKind k);

// Bit set over EdgeFamily.
class FamilySet {
 public:
  FamilySet() = default;
  static FamilySet All() { return FamilySet(0x1F); }
  static FamilySet Of(std::initializer_list<EdgeFamily> families);
  // Comma-separated family names; empty means all. Throws ValidationError.
  static FamilySet Parse(std::string_view csv);

  bool Has(EdgeFamily f) const { return (bits_ >> static_cast<unsigned>(f)) & 1U; }
  FamilySet& Add(EdgeFamily f) {
    bits_ |= 1U << static_cast<unsigned>(f);
    return *this;
  }

 private:
  explicit FamilySet(unsigned bits) : bits_(bits) {}
  unsigned bits_ = 0;
};

struct Edge {
  EdgeFamily family = EdgeFamily::kAtomic;
  std::optional<kb::Relation> relation;       // atomic only
  std::optional<edges::FlowSubkind> subkind;  // event_flow only
  std::string from;
  std::string to;
  std::size_t weight = 1;
  std::optional<Intent> intent_label;  // emotion_intent only
  // Empty for triples loaded from the KB; weight = max(1, |provenance|).
  std::vector<edges::Provenance> provenance;

  friend bool operator==(const Edge&, const Edge&) = default;
};

struct EdgeKey {
  EdgeFamily family;
  std::optional<kb::Relation> relation;
  std::optional<edges::FlowSubkind> subkind;
  std::string from;
  std::string to;
  std::optional<Intent> intent_label;
  friend auto operator<=>(const EdgeKey&, const EdgeKey&) = default;
};

EdgeKey KeyOf(const Edge& e);
Edge FromFlowEdge(const edges::FlowEdge& e);

struct GraphStats {
  std::size_t atomic_relations = 0;
  std::size_t event_flows = 0;
  std::size_t concept_flows = 0;
  std::size_t emotion_cause_flows = 0;
  std::size_t emotion_intent_flows = 0;
  std::size_t total_triplets = 0;
  std::size_t event_heads = 0;
  std::size_t entity_heads = 0;
  std::size_t tails = 0;
  friend bool operator==(const GraphStats&, const GraphStats&) = default;
};

nlohmann::json ToJson(const GraphStats& s);

enum class Direction { kOut, kIn, kBoth };
std::optional<Direction> ParseDirection(std::string_view s);

struct Neighbor {
  const Edge* edge = nullptr;
  const Node* node = nullptr;
  bool outgoing = true;
};

// Not internally synchronized: any number of concurrent const readers, or a
// single writer.
class Graph {
 public:
  // Adds a node, or returns the existing one when id and kind agree.
  // Throws ValidationError on an empty id or a kind mismatch.
  const Node& AddNode(Node node);

  // Inserts an edge. A flow edge whose key already exists absorbs the new
  // provenance instead; a duplicate atomic edge is a ValidationError.
  // Unknown endpoints raise NotFoundError; endpoint categories are checked
  // with CheckEndpoints.
  const Edge& AddEdge(Edge edge);

  // Throws NotFoundError when absent.
  Edge RemoveEdge(const EdgeKey& key);
  // Removes the node and every incident edge; returns the removed edges.
  std::vector<Edge> RemoveNode(std::string_view id);
  // Moves every edge incident to `from` onto `to` (merging with existing
  // keys), except atomic edges, which stay put.
  void RetargetFlows(std::string_view from, std::string_view to);

  const Node* FindNode(std::string_view id) const;
  const Edge* FindEdge(const EdgeKey& key) const;
  bool HasNode(std::string_view id) const { return FindNode(id) != nullptr; }

  // Sorted by (family, weight desc, neighbor id, edge key). Throws
  // NotFoundError for an unknown node.
  std::vector<Neighbor> Neighbors(std::string_view id, FamilySet families = FamilySet::All(),
                                  Direction direction = Direction::kBoth) const;

  // Hop count over the selected families, ignoring direction. Throws
  // NotFoundError for unknown nodes.
  std::optional<std::size_t> Distance(std::string_view a, std::string_view b,
                                      FamilySet families = FamilySet::All()) const;

  // Tail categories of a node, from the relations of its incoming atomic
  // edges. Empty for heads.
  std::set<kb::TailCategory> TailCategories(std::string_view id) const;

  // Flow edges must connect event heads (event_flow), entity heads
  // (concept_flow), an emotion tail to a before tail (emotion_cause) or an
  // emotion tail to an after tail (emotion_intent). Atomic edges run from a
  // head to a tail. Throws ValidationError naming the violation.
  void CheckEndpoints(const Edge& e) const;

  // Case-insensitive (ASCII) substring search over node text and ids,
  // ordered by id, at most `limit` results.
  std::vector<const Node*> Search(std::string_view query, std::size_t limit = 50) const;

  const GraphStats& stats() const { return stats_; }
  // Nodes ordered by id.
  const std::map<std::string, Node, std::less<>>& nodes() const { return nodes_; }
  // Edges ordered by key.
  std::vector<const Edge*> Edges() const;
  std::size_t edge_count() const { return key_index_.size(); }

 private:
  void Count(const Edge& e, int delta);
  void Unlink(std::size_t slot);

  std::map<std::string, Node, std::less<>> nodes_;
  std::vector<std::optional<Edge>> slots_;
  std::vector<std::size_t> free_slots_;
  std::map<EdgeKey, std::size_t> key_index_;
  std::unordered_map<std::string, std::vector<std::size_t>> out_;
  std::unordered_map<std::string, std::vector<std::size_t>> in_;
  GraphStats stats_;
};

bool operator==(const Graph& a, const Graph& b);

struct AssembleOptions {
  kb::TailIdentity tail_identity = kb::TailIdentity::kGraphWide;
};

// Heads become nodes, every triple an atomic edge to its tail node, then the
// flow edges are added. Throws ValidationError listing every dangling
// endpoint.
Graph Assemble(const kb::KnowledgeBase& kb, const std::vector<edges::FlowEdge>& flows,
               const AssembleOptions& options = {});

struct EdgeEvaluation {
  double connectivity = 0.0;  // fraction of evaluated pairs with a path
  double avg_distance = 0.0;  // mean over connected pairs, 0 when none
  std::size_t pairs = 0;      // evaluated pairs (a != b)
  std::size_t connected = 0;
  std::size_t disconnected = 0;
  std::size_t skipped_identical = 0;
};

// Pairs with identical endpoints are skipped. Throws ValidationError when no
// pair remains, NotFoundError on an unknown node.
EdgeEvaluation EvaluateEdges(const Graph& g,
                             const std::vector<std::pair<std::string, std::string>>& pairs,
                             FamilySet families = FamilySet::All());

struct ScenarioGraph {
  std::string scenario_id;
  std::vector<std::string> heads;  // ranked
  std::vector<const Node*> nodes;  // heads plus their tails, by id
  std::vector<const Edge*> edges;  // induced, by key
};

// Heads ranked by match count desc, best score desc, id; the top
// ceil(fraction * N) are kept along with their atomic tails and every edge
// among those nodes. Heads missing from the graph are ignored. Throws
// ValidationError unless 0 < fraction <= 1.
ScenarioGraph ScenarioSubgraph(const Graph& g, std::string scenario_id,
                               const std::vector<link::MentionHeadMatch>& matches, double fraction);

// One subgraph per scenario, matches routed through their conversation.
std::vector<ScenarioGraph> ScenarioSubgraphs(const Graph& g, const corpus::Corpus& corpus,
                                             const std::vector<link::MentionHeadMatch>& matches,
                                             double fraction);

nlohmann::json ToJson(const Node& n);
nlohmann::json ToJson(const Edge& e);
nlohmann::json ToJson(const ScenarioGraph& s);
Node NodeFromJson(const nlohmann::json& j);
Edge EdgeFromJson(const nlohmann::json& j);

inline constexpr int kFormatVersion = 1;

// Header line, nodes by id, edges by key. Canonical: equal graphs serialize
// to identical bytes.
std::string Serialize(const Graph& g);
// Throws ParseError on malformed input or a version mismatch.
Graph Deserialize(std::string_view data, const std::string& source = "");
// Gzip when the path ends in ".gz".
void SaveGraph(const Graph& g, const std::filesystem::path& path);
Graph LoadGraph(const std::filesystem::path& path);

}  // namespace convkg::graph

#endif  // CONVKG_GRAPH_HPP_
