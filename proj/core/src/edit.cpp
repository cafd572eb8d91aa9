#include "convkg/edit.hpp"

#include <vector>

#include "convkg/edges.hpp"
#include "convkg/error.hpp"
#include "convkg/text.hpp"

namespace convkg::edit {

using graph::Edge;
using graph::EdgeFamily;
using graph::Graph;
using nlohmann::json;

std::string_view ToString(OpKind k) {
  switch (k) {
    case OpKind::kAddTail: return "add_tail";
    case OpKind::kReviseTail: return "revise_tail";
    case OpKind::kDeleteTail: return "delete_tail";
    case OpKind::kAddFlowEdge: return "add_flow_edge";
    case OpKind::kLabelEdge: return "label_edge";
    case OpKind::kDeleteFlowEdge: return "delete_flow_edge";
  }
  return "";
}

std::optional<OpKind> ParseOpKind(std::string_view s) {
  for (auto k : {OpKind::kAddTail, OpKind::kReviseTail, OpKind::kDeleteTail, OpKind::kAddFlowEdge,
                 OpKind::kLabelEdge, OpKind::kDeleteFlowEdge}) {
    if (ToString(k) == s) return k;
  }
  return std::nullopt;
}

EditOp EditOpFromJson(const json& j) {
  if (!j.is_object()) throw ValidationError("", "edit must be a JSON object");
  EditOp op;
  auto name = j.find("op");
  if (name == j.end() || !name->is_string()) throw ValidationError("op", "required string");
  auto kind = ParseOpKind(name->get<std::string>());
  if (!kind) throw ValidationError("op", "unknown op '" + name->get<std::string>() + "'");
  op.op = *kind;
  if (auto p = j.find("payload"); p != j.end()) {
    if (!p->is_object()) throw ValidationError("payload", "must be an object");
    op.payload = *p;
  }
  if (auto a = j.find("author"); a != j.end()) {
    if (!a->is_string()) throw ValidationError("author", "must be a string");
    op.author = a->get<std::string>();
  }
  if (auto t = j.find("timestamp"); t != j.end() && !t->is_null()) {
    if (!t->is_string()) throw ValidationError("timestamp", "must be a string");
    op.timestamp = t->get<std::string>();
  }
  if (auto v = j.find("base_version"); v != j.end() && !v->is_null()) {
    if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<long long>() >= 0)) {
      throw ValidationError("base_version", "must be a non-negative integer");
    }
    op.base_version = v->get<std::uint64_t>();
  }
  return op;
}

json ToJson(const EditOp& op) {
  json j{{"op", ToString(op.op)}, {"payload", op.payload}, {"author", op.author},
         {"timestamp", op.timestamp}};
  j["base_version"] = op.base_version ? json(*op.base_version) : json(nullptr);
  return j;
}

namespace {

std::string RequireString(const json& payload, const char* field) {
  auto it = payload.find(field);
  if (it == payload.end() || !it->is_string()) throw ValidationError(field, "required string");
  std::string s = text::Trim(it->get<std::string>());
  if (s.empty()) throw ValidationError(field, "must be non-empty");
  return s;
}

std::optional<std::string> OptionalString(const json& payload, const char* field) {
  auto it = payload.find(field);
  if (it == payload.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) throw ValidationError(field, "must be a string");
  return it->get<std::string>();
}

kb::Relation RequireRelation(const json& payload) {
  const std::string name = RequireString(payload, "relation");
  auto r = kb::ParseRelation(name);
  if (!r) throw ValidationError("relation", "unknown relation '" + name + "'");
  return *r;
}

const graph::Node& RequireHead(const Graph& g, const std::string& id) {
  const graph::Node* n = g.FindNode(id);
  if (n == nullptr) throw NotFoundError("unknown head '" + id + "'");
  if (n->kind == graph::NodeKind::kTail) throw ValidationError("head", "'" + id + "' is a tail, not a head");
  return *n;
}

edges::Provenance ExpertProvenance(const json& payload) {
  edges::Provenance p;
  p.source = std::string(edges::kExpertSource);
  if (auto c = OptionalString(payload, "conversation")) p.conversation_id = *c;
  if (auto it = payload.find("utterances"); it != payload.end() && !it->is_null()) {
    try {
      p.utterances = it->get<std::vector<std::size_t>>();
    } catch (const json::exception&) {
      throw ValidationError("utterances", "must be a list of non-negative integers");
    }
  }
  return p;
}

graph::EdgeKey AtomicKey(const std::string& head, kb::Relation r, const std::string& tail_id) {
  return graph::EdgeKey{EdgeFamily::kAtomic, r, std::nullopt, head, tail_id, std::nullopt};
}

std::size_t IncomingTriples(const Graph& g, const std::string& id) {
  return g.Neighbors(id, graph::FamilySet::Of({EdgeFamily::kAtomic}), graph::Direction::kIn).size();
}

Edge FlowEdgeFromPayload(const json& payload) {
  const std::string kind_name = RequireString(payload, "kind");
  auto family = graph::ParseEdgeFamily(kind_name);
  if (!family || *family == EdgeFamily::kAtomic) {
    throw ValidationError("kind", "expected event_flow, concept_flow, emotion_cause or emotion_intent");
  }
  Edge e;
  e.family = *family;
  e.from = RequireString(payload, "from");
  e.to = RequireString(payload, "to");
  if (auto s = OptionalString(payload, "subkind")) {
    auto sub = edges::ParseFlowSubkind(*s);
    if (!sub) throw ValidationError("subkind", "unknown subkind '" + *s + "'");
    e.subkind = *sub;
  }
  if (auto s = OptionalString(payload, "intent_label")) {
    auto intent = ParseIntent(*s);
    if (!intent) throw ValidationError("intent_label", "unknown intent '" + *s + "'");
    e.intent_label = *intent;
  }
  return e;
}

json EdgeSummary(const Edge& e) { return graph::ToJson(e); }

json AddTail(Graph& g, const json& payload, kb::TailIdentity identity) {
  const std::string head = RequireString(payload, "head");
  const kb::Relation r = RequireRelation(payload);
  const std::string tail = text::NormalizeWhitespace(RequireString(payload, "tail"));
  RequireHead(g, head);
  const std::string tail_id = kb::TailNodeId(head, r, tail, identity);
  if (const graph::Node* n = g.FindNode(tail_id); n != nullptr && n->kind != graph::NodeKind::kTail) {
    throw ValidationError("tail", "id '" + tail_id + "' belongs to a head");
  }
  if (g.FindEdge(AtomicKey(head, r, tail_id)) != nullptr) {
    throw ValidationError("tail", "triple already exists");
  }
  const bool created = !g.HasNode(tail_id);
  g.AddNode(graph::Node{tail_id, graph::NodeKind::kTail, tail});
  Edge e;
  e.family = EdgeFamily::kAtomic;
  e.relation = r;
  e.from = head;
  e.to = tail_id;
  e.provenance.push_back(ExpertProvenance(payload));
  const Edge& added = g.AddEdge(std::move(e));
  return json{{"tail_id", tail_id}, {"created_node", created}, {"edge", EdgeSummary(added)}};
}

json DeleteTail(Graph& g, const json& payload, kb::TailIdentity identity) {
  const std::string head = RequireString(payload, "head");
  const kb::Relation r = RequireRelation(payload);
  const std::string tail = text::NormalizeWhitespace(RequireString(payload, "tail"));
  RequireHead(g, head);
  const std::string tail_id = kb::TailNodeId(head, r, tail, identity);
  const auto key = AtomicKey(head, r, tail_id);
  if (g.FindEdge(key) == nullptr) throw NotFoundError("no triple " + head + " " + std::string(kb::ToString(r)) + " " + tail);
  g.RemoveEdge(key);
  std::size_t removed = 1;
  bool node_removed = false;
  if (IncomingTriples(g, tail_id) == 0) {
    removed += g.RemoveNode(tail_id).size();
    node_removed = true;
  }
  return json{{"tail_id", tail_id}, {"removed_edges", removed}, {"removed_node", node_removed}};
}

json ReviseTail(Graph& g, const json& payload, kb::TailIdentity identity) {
  const std::string head = RequireString(payload, "head");
  const kb::Relation r = RequireRelation(payload);
  const std::string tail = text::NormalizeWhitespace(RequireString(payload, "tail"));
  const std::string new_tail = text::NormalizeWhitespace(RequireString(payload, "new_tail"));
  RequireHead(g, head);
  const std::string old_id = kb::TailNodeId(head, r, tail, identity);
  const std::string new_id = kb::TailNodeId(head, r, new_tail, identity);
  const auto old_key = AtomicKey(head, r, old_id);
  if (g.FindEdge(old_key) == nullptr) throw NotFoundError("no triple " + head + " " + std::string(kb::ToString(r)) + " " + tail);
  if (old_id == new_id) throw ValidationError("new_tail", "equals the current tail");
  if (const graph::Node* n = g.FindNode(new_id); n != nullptr && n->kind != graph::NodeKind::kTail) {
    throw ValidationError("new_tail", "id '" + new_id + "' belongs to a head");
  }
  if (g.FindEdge(AtomicKey(head, r, new_id)) != nullptr) {
    throw ValidationError("new_tail", "triple already exists");
  }
  Edge old_edge = g.RemoveEdge(old_key);
  g.AddNode(graph::Node{new_id, graph::NodeKind::kTail, new_tail});
  Edge e;
  e.family = EdgeFamily::kAtomic;
  e.relation = r;
  e.from = head;
  e.to = new_id;
  e.provenance = old_edge.provenance;
  e.provenance.push_back(ExpertProvenance(payload));
  g.AddEdge(std::move(e));
  bool node_removed = false;
  if (IncomingTriples(g, old_id) == 0) {
    g.RetargetFlows(old_id, new_id);
    g.RemoveNode(old_id);
    node_removed = true;
  }
  return json{{"old_tail_id", old_id}, {"tail_id", new_id}, {"removed_node", node_removed}};
}

json AddFlowEdge(Graph& g, const json& payload) {
  Edge e = FlowEdgeFromPayload(payload);
  e.provenance.push_back(ExpertProvenance(payload));
  const Edge& added = g.AddEdge(std::move(e));
  return json{{"edge", EdgeSummary(added)}};
}

json LabelEdge(Graph& g, const json& payload) {
  Edge target = FlowEdgeFromPayload(payload);
  if (target.family != EdgeFamily::kEmotionCause && target.family != EdgeFamily::kEmotionIntent) {
    throw ValidationError("kind", "only emotion_cause and emotion_intent edges are labeled");
  }
  if (target.subkind) throw ValidationError("subkind", "emotion edges carry no subkind");
  if (target.family == EdgeFamily::kEmotionIntent) {
    if (!target.intent_label) throw ValidationError("intent_label", "required for emotion_intent");
    if (!IsEdgeIntent(*target.intent_label)) {
      throw ValidationError("intent_label", "must be one of ask, advise, describe, opinion, console");
    }
  } else if (target.intent_label) {
    throw ValidationError("intent_label", "emotion_cause edges carry no intent");
  }
  if (!g.HasNode(target.from)) throw NotFoundError("unknown node '" + target.from + "'");
  std::vector<graph::EdgeKey> existing;
  for (const auto& n : g.Neighbors(target.from, graph::FamilySet::Of({target.family}), graph::Direction::kOut)) {
    if (n.edge->to == target.to) existing.push_back(graph::KeyOf(*n.edge));
  }
  if (existing.empty()) {
    throw NotFoundError("no " + std::string(graph::ToString(target.family)) + " edge " + target.from +
                        " -> " + target.to);
  }
  for (const auto& k : existing) {
    Edge old = g.RemoveEdge(k);
    for (auto& p : old.provenance) target.provenance.push_back(std::move(p));
  }
  target.provenance.push_back(ExpertProvenance(payload));
  const Edge& added = g.AddEdge(std::move(target));
  return json{{"edge", EdgeSummary(added)}, {"merged", existing.size()}};
}

json DeleteFlowEdge(Graph& g, const json& payload) {
  const Edge e = FlowEdgeFromPayload(payload);
  Edge removed = g.RemoveEdge(graph::KeyOf(e));
  return json{{"edge", EdgeSummary(removed)}};
}

}  // namespace

json ApplyEdit(Graph& g, const EditOp& op, kb::TailIdentity identity) {
  json detail;
  switch (op.op) {
    case OpKind::kAddTail: detail = AddTail(g, op.payload, identity); break;
    case OpKind::kReviseTail: detail = ReviseTail(g, op.payload, identity); break;
    case OpKind::kDeleteTail: detail = DeleteTail(g, op.payload, identity); break;
    case OpKind::kAddFlowEdge: detail = AddFlowEdge(g, op.payload); break;
    case OpKind::kLabelEdge: detail = LabelEdge(g, op.payload); break;
    case OpKind::kDeleteFlowEdge: detail = DeleteFlowEdge(g, op.payload); break;
  }
  return json{{"op", ToString(op.op)}, {"detail", std::move(detail)}, {"stats", graph::ToJson(g.stats())}};
}

}  // namespace convkg::edit
