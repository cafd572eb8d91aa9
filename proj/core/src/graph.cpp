#include "convkg/graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <tuple>

#include "convkg/error.hpp"
#include "convkg/text.hpp"

namespace convkg::graph {

std::string_view ToString(NodeKind k) {
  switch (k) {
    case NodeKind::kEventHead: return "event_head";
    case NodeKind::kEntityHead: return "entity_head";
    case NodeKind::kTail: return "tail";
  }
  return "";
}

std::optional<NodeKind> ParseNodeKind(std::string_view s) {
  for (auto k : {NodeKind::kEventHead, NodeKind::kEntityHead, NodeKind::kTail}) {
    if (ToString(k) == s) return k;
  }
  return std::nullopt;
}

std::string_view ToString(EdgeFamily f) {
  switch (f) {
    case EdgeFamily::kAtomic: return "atomic";
    case EdgeFamily::kEventFlow: return "event_flow";
    case EdgeFamily::kConceptFlow: return "concept_flow";
    case EdgeFamily::kEmotionCause: return "emotion_cause";
    case EdgeFamily::kEmotionIntent: return "emotion_intent";
  }
  return "";
}

std::optional<EdgeFamily> ParseEdgeFamily(std::string_view s) {
  for (auto f : kAllFamilies) {
    if (ToString(f) == s) return f;
  }
  return std::nullopt;
}

EdgeFamily FamilyOf(edges::EdgeKind k) {
  switch (k) {
    case edges::EdgeKind::kEventFlow: return EdgeFamily::kEventFlow;
    case edges::EdgeKind::kConceptFlow: return EdgeFamily::kConceptFlow;
    case edges::EdgeKind::kEmotionCause: return EdgeFamily::kEmotionCause;
    case edges::EdgeKind::kEmotionIntent: return EdgeFamily::kEmotionIntent;
  }
  return EdgeFamily::kEventFlow;
}

FamilySet FamilySet::Of(std::initializer_list<EdgeFamily> families) {
  FamilySet s;
  for (auto f : families) s.Add(f);
  return s;
}

FamilySet FamilySet::Parse(std::string_view csv) {
  if (text::Trim(csv).empty()) return All();
  FamilySet s;
  for (const auto& part : text::Split(csv, ',')) {
    const std::string name = text::Trim(part);
    if (name.empty()) continue;
    auto f = ParseEdgeFamily(name);
    if (!f) throw ValidationError("kinds", "unknown edge kind '" + name + "'");
    s.Add(*f);
  }
  return s;
}

EdgeKey KeyOf(const Edge& e) {
  return EdgeKey{e.family, e.relation, e.subkind, e.from, e.to, e.intent_label};
}

Edge FromFlowEdge(const edges::FlowEdge& e) {
  Edge out;
  out.family = FamilyOf(e.kind);
  out.subkind = e.subkind;
  out.from = e.from;
  out.to = e.to;
  out.intent_label = e.intent_label;
  out.provenance = e.provenance;
  out.weight = e.provenance.size();
  return out;
}

nlohmann::json ToJson(const GraphStats& s) {
  return nlohmann::json{{"atomic_relations", s.atomic_relations},
                        {"event_flows", s.event_flows},
                        {"concept_flows", s.concept_flows},
                        {"emotion_cause_flows", s.emotion_cause_flows},
                        {"emotion_intent_flows", s.emotion_intent_flows},
                        {"total_triplets", s.total_triplets},
                        {"event_heads", s.event_heads},
                        {"entity_heads", s.entity_heads},
                        {"tails", s.tails}};
}

std::optional<Direction> ParseDirection(std::string_view s) {
  if (s == "out") return Direction::kOut;
  if (s == "in") return Direction::kIn;
  if (s == "both" || s.empty()) return Direction::kBoth;
  return std::nullopt;
}

namespace {

std::size_t& FamilyCounter(GraphStats& s, EdgeFamily f) {
  switch (f) {
    case EdgeFamily::kAtomic: return s.atomic_relations;
    case EdgeFamily::kEventFlow: return s.event_flows;
    case EdgeFamily::kConceptFlow: return s.concept_flows;
    case EdgeFamily::kEmotionCause: return s.emotion_cause_flows;
    case EdgeFamily::kEmotionIntent: return s.emotion_intent_flows;
  }
  return s.atomic_relations;
}

std::size_t& NodeCounter(GraphStats& s, NodeKind k) {
  switch (k) {
    case NodeKind::kEventHead: return s.event_heads;
    case NodeKind::kEntityHead: return s.entity_heads;
    case NodeKind::kTail: return s.tails;
  }
  return s.tails;
}

void ValidateShape(const Edge& e) {
  if (e.from.empty() || e.to.empty()) throw ValidationError("from/to", "edge endpoints must be non-empty");
  if (e.from == e.to) throw ValidationError("to", "self-loops are not allowed");
  if ((e.family == EdgeFamily::kAtomic) != e.relation.has_value()) {
    throw ValidationError("relation", "exactly the atomic edges carry a relation");
  }
  if ((e.family == EdgeFamily::kEventFlow) != e.subkind.has_value()) {
    throw ValidationError("subkind", "exactly the event_flow edges carry a subkind");
  }
  if (e.family == EdgeFamily::kEmotionIntent) {
    if (!e.intent_label) throw ValidationError("intent_label", "emotion_intent edges need an intent label");
    if (!IsEdgeIntent(*e.intent_label)) {
      throw ValidationError("intent_label", "intent must be one of ask, advise, describe, opinion, console");
    }
  } else if (e.intent_label) {
    throw ValidationError("intent_label", "only emotion_intent edges carry an intent label");
  }
  if (e.family != EdgeFamily::kAtomic && e.provenance.empty()) {
    throw ValidationError("provenance", "flow edges need at least one provenance entry");
  }
}

std::size_t WeightOf(const Edge& e) {
  return e.family == EdgeFamily::kAtomic ? 1 : e.provenance.size();
}

void EraseValue(std::vector<std::size_t>& v, std::size_t x) {
  v.erase(std::remove(v.begin(), v.end(), x), v.end());
}

}  // namespace

const Node& Graph::AddNode(Node node) {
  if (node.id.empty()) throw ValidationError("id", "node id must be non-empty");
  if (auto it = nodes_.find(node.id); it != nodes_.end()) {
    if (it->second.kind != node.kind) {
      throw ValidationError("kind", "node '" + node.id + "' already exists as " +
                                        std::string(ToString(it->second.kind)));
    }
    return it->second;
  }
  ++NodeCounter(stats_, node.kind);
  auto [it, inserted] = nodes_.emplace(node.id, std::move(node));
  return it->second;
}

void Graph::Count(const Edge& e, int delta) {
  auto& c = FamilyCounter(stats_, e.family);
  c = static_cast<std::size_t>(static_cast<long long>(c) + delta);
  stats_.total_triplets = static_cast<std::size_t>(static_cast<long long>(stats_.total_triplets) + delta);
}

std::set<kb::TailCategory> Graph::TailCategories(std::string_view id) const {
  std::set<kb::TailCategory> out;
  auto it = in_.find(std::string(id));
  if (it == in_.end()) return out;
  for (std::size_t slot : it->second) {
    const Edge& e = *slots_[slot];
    if (e.family == EdgeFamily::kAtomic) out.insert(kb::CategorizeTail(*e.relation));
  }
  return out;
}

void Graph::CheckEndpoints(const Edge& e) const {
  const Node* from = FindNode(e.from);
  const Node* to = FindNode(e.to);
  if (from == nullptr) throw NotFoundError("unknown node '" + e.from + "'");
  if (to == nullptr) throw NotFoundError("unknown node '" + e.to + "'");
  auto require_kind = [](const Node* n, NodeKind k, const char* field) {
    if (n->kind != k) {
      throw ValidationError(field, "'" + n->id + "' is a " + std::string(ToString(n->kind)) +
                                       ", expected " + std::string(ToString(k)));
    }
  };
  auto require_category = [this](const Node* n, kb::TailCategory c, const char* field) {
    if (n->kind != NodeKind::kTail || TailCategories(n->id).count(c) == 0) {
      throw ValidationError(field, "'" + n->id + "' is not a " + std::string(ToString(c)) + " tail");
    }
  };
  switch (e.family) {
    case EdgeFamily::kAtomic:
      if (from->kind == NodeKind::kTail) throw ValidationError("from", "atomic edges start at a head");
      require_kind(to, NodeKind::kTail, "to");
      break;
    case EdgeFamily::kEventFlow:
      require_kind(from, NodeKind::kEventHead, "from");
      require_kind(to, NodeKind::kEventHead, "to");
      break;
    case EdgeFamily::kConceptFlow:
      require_kind(from, NodeKind::kEntityHead, "from");
      require_kind(to, NodeKind::kEntityHead, "to");
      break;
    case EdgeFamily::kEmotionCause:
      require_category(from, kb::TailCategory::kEmotion, "from");
      require_category(to, kb::TailCategory::kBefore, "to");
      break;
    case EdgeFamily::kEmotionIntent:
      require_category(from, kb::TailCategory::kEmotion, "from");
      require_category(to, kb::TailCategory::kAfter, "to");
      break;
  }
}

const Edge& Graph::AddEdge(Edge edge) {
  ValidateShape(edge);
  CheckEndpoints(edge);
  const EdgeKey key = KeyOf(edge);
  if (auto it = key_index_.find(key); it != key_index_.end()) {
    Edge& existing = *slots_[it->second];
    if (edge.family == EdgeFamily::kAtomic) {
      throw ValidationError("tail", "triple " + edge.from + " " + std::string(kb::ToString(*edge.relation)) +
                                        " " + edge.to + " already exists");
    }
    for (auto& p : edge.provenance) existing.provenance.push_back(std::move(p));
    std::sort(existing.provenance.begin(), existing.provenance.end());
    existing.weight = WeightOf(existing);
    return existing;
  }
  std::sort(edge.provenance.begin(), edge.provenance.end());
  edge.weight = WeightOf(edge);
  std::size_t slot;
  if (!free_slots_.empty()) {
    slot = free_slots_.back();
    free_slots_.pop_back();
    slots_[slot] = std::move(edge);
  } else {
    slot = slots_.size();
    slots_.push_back(std::move(edge));
  }
  const Edge& e = *slots_[slot];
  key_index_.emplace(key, slot);
  out_[e.from].push_back(slot);
  in_[e.to].push_back(slot);
  Count(e, +1);
  return e;
}

void Graph::Unlink(std::size_t slot) {
  Edge& e = *slots_[slot];
  Count(e, -1);
  EraseValue(out_[e.from], slot);
  EraseValue(in_[e.to], slot);
  key_index_.erase(KeyOf(e));
  slots_[slot].reset();
  free_slots_.push_back(slot);
}

Edge Graph::RemoveEdge(const EdgeKey& key) {
  auto it = key_index_.find(key);
  if (it == key_index_.end()) throw NotFoundError("no such edge " + key.from + " -> " + key.to);
  const std::size_t slot = it->second;
  Edge removed = *slots_[slot];
  Unlink(slot);
  return removed;
}

std::vector<Edge> Graph::RemoveNode(std::string_view id) {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) throw NotFoundError("unknown node '" + std::string(id) + "'");
  std::vector<std::size_t> incident;
  const std::string key(id);
  if (auto o = out_.find(key); o != out_.end()) incident = o->second;
  if (auto i = in_.find(key); i != in_.end()) {
    incident.insert(incident.end(), i->second.begin(), i->second.end());
  }
  std::sort(incident.begin(), incident.end());
  incident.erase(std::unique(incident.begin(), incident.end()), incident.end());
  std::vector<Edge> removed;
  for (std::size_t slot : incident) {
    removed.push_back(*slots_[slot]);
    Unlink(slot);
  }
  std::sort(removed.begin(), removed.end(),
            [](const Edge& a, const Edge& b) { return KeyOf(a) < KeyOf(b); });
  --NodeCounter(stats_, it->second.kind);
  nodes_.erase(it);
  out_.erase(key);
  in_.erase(key);
  return removed;
}

void Graph::RetargetFlows(std::string_view from, std::string_view to) {
  if (FindNode(from) == nullptr) throw NotFoundError("unknown node '" + std::string(from) + "'");
  if (FindNode(to) == nullptr) throw NotFoundError("unknown node '" + std::string(to) + "'");
  std::vector<EdgeKey> keys;
  const std::string id(from);
  for (auto* index : {&out_, &in_}) {
    if (auto it = index->find(id); it != index->end()) {
      for (std::size_t slot : it->second) {
        if (slots_[slot]->family != EdgeFamily::kAtomic) keys.push_back(KeyOf(*slots_[slot]));
      }
    }
  }
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
  for (const auto& k : keys) {
    Edge e = RemoveEdge(k);
    if (e.from == id) e.from = std::string(to);
    if (e.to == id) e.to = std::string(to);
    if (e.from == e.to) continue;
    AddEdge(std::move(e));
  }
}

const Node* Graph::FindNode(std::string_view id) const {
  auto it = nodes_.find(id);
  return it == nodes_.end() ? nullptr : &it->second;
}

const Edge* Graph::FindEdge(const EdgeKey& key) const {
  auto it = key_index_.find(key);
  return it == key_index_.end() ? nullptr : &*slots_[it->second];
}

std::vector<Neighbor> Graph::Neighbors(std::string_view id, FamilySet families,
                                       Direction direction) const {
  if (FindNode(id) == nullptr) throw NotFoundError("unknown node '" + std::string(id) + "'");
  std::vector<Neighbor> out;
  const std::string key(id);
  auto collect = [&](const std::unordered_map<std::string, std::vector<std::size_t>>& index,
                     bool outgoing) {
    auto it = index.find(key);
    if (it == index.end()) return;
    for (std::size_t slot : it->second) {
      const Edge& e = *slots_[slot];
      if (!families.Has(e.family)) continue;
      out.push_back(Neighbor{&e, FindNode(outgoing ? e.to : e.from), outgoing});
    }
  };
  if (direction != Direction::kIn) collect(out_, true);
  if (direction != Direction::kOut) collect(in_, false);
  std::sort(out.begin(), out.end(), [](const Neighbor& a, const Neighbor& b) {
    if (a.edge->family != b.edge->family) return a.edge->family < b.edge->family;
    if (a.edge->weight != b.edge->weight) return a.edge->weight > b.edge->weight;
    if (a.node->id != b.node->id) return a.node->id < b.node->id;
    if (a.outgoing != b.outgoing) return a.outgoing;
    return KeyOf(*a.edge) < KeyOf(*b.edge);
  });
  return out;
}

std::optional<std::size_t> Graph::Distance(std::string_view a, std::string_view b,
                                           FamilySet families) const {
  if (FindNode(a) == nullptr) throw NotFoundError("unknown node '" + std::string(a) + "'");
  if (FindNode(b) == nullptr) throw NotFoundError("unknown node '" + std::string(b) + "'");
  if (a == b) return 0;
  std::unordered_map<std::string_view, std::size_t> dist;
  std::deque<std::string_view> queue;
  dist.emplace(a, 0);
  queue.push_back(a);
  while (!queue.empty()) {
    const std::string_view cur = queue.front();
    queue.pop_front();
    const std::size_t d = dist[cur];
    const std::string key(cur);
    for (const auto* index : {&out_, &in_}) {
      auto it = index->find(key);
      if (it == index->end()) continue;
      for (std::size_t slot : it->second) {
        const Edge& e = *slots_[slot];
        if (!families.Has(e.family)) continue;
        const std::string_view next = e.from == cur ? std::string_view(e.to) : std::string_view(e.from);
        if (dist.count(next) > 0) continue;
        if (next == b) return d + 1;
        dist.emplace(next, d + 1);
        queue.push_back(next);
      }
    }
  }
  return std::nullopt;
}

std::vector<const Node*> Graph::Search(std::string_view query, std::size_t limit) const {
  const std::string q = text::AsciiLower(text::Trim(query));
  std::vector<const Node*> out;
  if (q.empty()) return out;
  for (const auto& [id, node] : nodes_) {
    if (out.size() >= limit) break;
    if (text::AsciiLower(node.text).find(q) != std::string::npos ||
        text::AsciiLower(id).find(q) != std::string::npos) {
      out.push_back(&node);
    }
  }
  return out;
}

std::vector<const Edge*> Graph::Edges() const {
  std::vector<const Edge*> out;
  out.reserve(key_index_.size());
  for (const auto& [key, slot] : key_index_) out.push_back(&*slots_[slot]);
  return out;
}

bool operator==(const Graph& a, const Graph& b) {
  if (a.nodes() != b.nodes() || a.edge_count() != b.edge_count()) return false;
  const auto ea = a.Edges();
  const auto eb = b.Edges();
  for (std::size_t i = 0; i < ea.size(); ++i) {
    if (!(*ea[i] == *eb[i])) return false;
  }
  return true;
}

Graph Assemble(const kb::KnowledgeBase& kb, const std::vector<edges::FlowEdge>& flows,
               const AssembleOptions& options) {
  Graph g;
  for (const auto& h : kb.heads()) {
    g.AddNode(Node{h.id, h.level == kb::HeadLevel::kEvent ? NodeKind::kEventHead : NodeKind::kEntityHead,
                   h.text});
  }
  for (const auto& t : kb.triples()) {
    const std::string tail_id = kb::TailNodeId(t, options.tail_identity);
    g.AddNode(Node{tail_id, NodeKind::kTail, text::NormalizeWhitespace(t.tail)});
    Edge e;
    e.family = EdgeFamily::kAtomic;
    e.relation = t.relation;
    e.from = t.head_id;
    e.to = tail_id;
    g.AddEdge(std::move(e));
  }
  std::set<std::string> dangling;
  for (const auto& f : flows) {
    if (!g.HasNode(f.from)) dangling.insert(f.from);
    if (!g.HasNode(f.to)) dangling.insert(f.to);
  }
  if (!dangling.empty()) {
    throw ValidationError("edges", std::to_string(dangling.size()) + " dangling endpoint(s): " +
                                       text::Join({dangling.begin(), dangling.end()}, ", "));
  }
  for (const auto& f : flows) g.AddEdge(FromFlowEdge(f));
  return g;
}

EdgeEvaluation EvaluateEdges(const Graph& g,
                             const std::vector<std::pair<std::string, std::string>>& pairs,
                             FamilySet families) {
  EdgeEvaluation out;
  std::size_t total_distance = 0;
  for (const auto& [a, b] : pairs) {
    if (a == b) {
      if (!g.HasNode(a)) throw NotFoundError("unknown node '" + a + "'");
      ++out.skipped_identical;
      continue;
    }
    ++out.pairs;
    if (auto d = g.Distance(a, b, families)) {
      ++out.connected;
      total_distance += *d;
    } else {
      ++out.disconnected;
    }
  }
  if (out.pairs == 0) throw ValidationError("pairs", "no pair with distinct endpoints to evaluate");
  out.connectivity = static_cast<double>(out.connected) / static_cast<double>(out.pairs);
  if (out.connected > 0) {
    out.avg_distance = static_cast<double>(total_distance) / static_cast<double>(out.connected);
  }
  return out;
}

ScenarioGraph ScenarioSubgraph(const Graph& g, std::string scenario_id,
                               const std::vector<link::MentionHeadMatch>& matches, double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw ValidationError("fraction", "must be in (0, 1]");
  }
  struct Tally {
    std::size_t count = 0;
    double best = -2.0;
  };
  std::map<std::string, Tally> tally;
  for (const auto& m : matches) {
    if (!g.HasNode(m.head_id)) continue;
    auto& t = tally[m.head_id];
    ++t.count;
    t.best = std::max(t.best, m.score);
  }
  std::vector<std::pair<std::string, Tally>> ranked(tally.begin(), tally.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second.count != b.second.count) return a.second.count > b.second.count;
    if (a.second.best != b.second.best) return a.second.best > b.second.best;
    return a.first < b.first;
  });
  const auto keep = static_cast<std::size_t>(
      std::ceil(fraction * static_cast<double>(ranked.size()) - 1e-9));

  ScenarioGraph out;
  out.scenario_id = std::move(scenario_id);
  std::set<std::string> members;
  for (std::size_t i = 0; i < std::min(keep, ranked.size()); ++i) {
    out.heads.push_back(ranked[i].first);
    members.insert(ranked[i].first);
    for (const auto& n : g.Neighbors(ranked[i].first, FamilySet::Of({EdgeFamily::kAtomic}),
                                     Direction::kOut)) {
      members.insert(n.node->id);
    }
  }
  for (const auto& id : members) out.nodes.push_back(g.FindNode(id));
  for (const Edge* e : g.Edges()) {
    if (members.count(e->from) > 0 && members.count(e->to) > 0) out.edges.push_back(e);
  }
  return out;
}

std::vector<ScenarioGraph> ScenarioSubgraphs(const Graph& g, const corpus::Corpus& corpus,
                                             const std::vector<link::MentionHeadMatch>& matches,
                                             double fraction) {
  std::map<std::string, std::vector<link::MentionHeadMatch>> by_scenario;
  for (const auto& m : matches) {
    const corpus::Conversation* conv = corpus.FindConversation(m.mention.source.conversation_id);
    if (conv == nullptr) {
      throw NotFoundError("match refers to unknown conversation '" +
                          m.mention.source.conversation_id + "'");
    }
    by_scenario[conv->scenario_id].push_back(m);
  }
  std::vector<ScenarioGraph> out;
  for (const auto& [id, ms] : by_scenario) out.push_back(ScenarioSubgraph(g, id, ms, fraction));
  return out;
}

}  // namespace convkg::graph
