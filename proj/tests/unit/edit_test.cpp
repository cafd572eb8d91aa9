#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "convkg/edit.hpp"
#include "convkg/error.hpp"
#include "convkg/graph.hpp"

namespace convkg::edit {
namespace {

using nlohmann::json;

graph::Graph Fixture() {
  kb::KnowledgeBase kb;
  kb.AddHead({"h1", "PersonX works late", kb::HeadLevel::kEvent});
  kb.AddHead({"h2", "PersonX can't sleep", kb::HeadLevel::kEvent});
  kb.AddHead({"e1", "doctor", kb::HeadLevel::kEntity});
  kb.AddTriple({"h1", kb::Relation::kXReact, "tired"});
  kb.AddTriple({"h2", kb::Relation::kXReact, "tired"});
  kb.AddTriple({"h2", kb::Relation::kXNeed, "lie down"});
  kb.AddTriple({"h2", kb::Relation::kXWant, "see a doctor"});
  std::vector<edges::FlowEdge> flows = {
      {edges::EdgeKind::kEventFlow, edges::FlowSubkind::kNextUtterance, "h1", "h2", 1,
       std::nullopt, {{"c", {0, 1}}}},
      {edges::EdgeKind::kEmotionCause, std::nullopt, "tail:tired", "tail:lie down", 1,
       std::nullopt, {{"c", {0, 1}}}},
      {edges::EdgeKind::kEmotionIntent, std::nullopt, "tail:tired", "tail:see a doctor", 1,
       Intent::kAsk, {{"c", {1, 2}}}}};
  return graph::Assemble(kb, flows);
}

EditOp Op(OpKind kind, json payload) {
  EditOp op;
  op.op = kind;
  op.payload = std::move(payload);
  op.author = "tester";
  op.timestamp = "2026-01-01T00:00:00Z";
  return op;
}

TEST(AddTailTest, CreatesNodeAndTriple) {
  auto g = Fixture();
  const auto before = g.stats().total_triplets;
  const auto r = ApplyEdit(g, Op(OpKind::kAddTail, {{"head", "h1"}, {"relation", "xWant"},
                                                    {"tail", "  go   home "}}));
  EXPECT_EQ(r["detail"]["tail_id"], "tail:go home");
  EXPECT_TRUE(r["detail"]["created_node"].get<bool>());
  EXPECT_EQ(g.stats().total_triplets, before + 1);
  const auto* e = g.FindEdge({graph::EdgeFamily::kAtomic, kb::Relation::kXWant, std::nullopt,
                              "h1", "tail:go home", std::nullopt});
  ASSERT_NE(e, nullptr);
  ASSERT_EQ(e->provenance.size(), 1u);
  EXPECT_EQ(e->provenance[0].source, edges::kExpertSource);
}

TEST(AddTailTest, Errors) {
  auto g = Fixture();
  EXPECT_THROW(ApplyEdit(g, Op(OpKind::kAddTail, {{"head", "h1"}, {"relation", "xReact"}, {"tail", "tired"}})),
               ValidationError);
  EXPECT_THROW(ApplyEdit(g, Op(OpKind::kAddTail, {{"head", "h9"}, {"relation", "xReact"}, {"tail", "x"}})),
               NotFoundError);
  EXPECT_THROW(ApplyEdit(g, Op(OpKind::kAddTail, {{"head", "h1"}, {"relation", "xFoo"}, {"tail", "x"}})),
               ValidationError);
  EXPECT_THROW(ApplyEdit(g, Op(OpKind::kAddTail, {{"head", "tail:tired"}, {"relation", "xReact"}, {"tail", "x"}})),
               ValidationError);
  EXPECT_THROW(ApplyEdit(g, Op(OpKind::kAddTail, {{"head", "h1"}, {"relation", "xReact"}})),
               ValidationError);
}

TEST(DeleteTailTest, OrphanedTailTakesItsFlowEdges) {
  auto g = Fixture();
  const auto before = g.stats().total_triplets;
  const auto r = ApplyEdit(g, Op(OpKind::kDeleteTail, {{"head", "h2"}, {"relation", "xNeed"},
                                                       {"tail", "lie down"}}));
  EXPECT_EQ(r["detail"]["removed_edges"], 2);
  EXPECT_TRUE(r["detail"]["removed_node"].get<bool>());
  EXPECT_FALSE(g.HasNode("tail:lie down"));
  EXPECT_EQ(g.stats().total_triplets, before - 2);
  EXPECT_EQ(g.stats().emotion_cause_flows, 0u);
}

TEST(DeleteTailTest, SharedTailSurvives) {
  auto g = Fixture();
  const auto r = ApplyEdit(g, Op(OpKind::kDeleteTail, {{"head", "h1"}, {"relation", "xReact"},
                                                       {"tail", "tired"}}));
  EXPECT_EQ(r["detail"]["removed_edges"], 1);
  EXPECT_TRUE(g.HasNode("tail:tired"));
  EXPECT_THROW(ApplyEdit(g, Op(OpKind::kDeleteTail, {{"head", "h1"}, {"relation", "xReact"},
                                                     {"tail", "tired"}})),
               NotFoundError);
}

TEST(ReviseTailTest, FlowEdgesFollowTheText) {
  auto g = Fixture();
  const auto before = g.stats();
  ApplyEdit(g, Op(OpKind::kReviseTail, {{"head", "h2"}, {"relation", "xNeed"},
                                        {"tail", "lie down"}, {"new_tail", "rest a while"}}));
  EXPECT_FALSE(g.HasNode("tail:lie down"));
  EXPECT_TRUE(g.FindEdge({graph::EdgeFamily::kEmotionCause, std::nullopt, std::nullopt,
                          "tail:tired", "tail:rest a while", std::nullopt}));
  EXPECT_EQ(g.stats().total_triplets, before.total_triplets);
  EXPECT_THROW(ApplyEdit(g, Op(OpKind::kReviseTail, {{"head", "h2"}, {"relation", "xNeed"},
                                                     {"tail", "rest a while"},
                                                     {"new_tail", "rest  a while"}})),
               ValidationError);
}

TEST(FlowEdgeOpsTest, AddLabelDelete) {
  auto g = Fixture();
  ApplyEdit(g, Op(OpKind::kAddFlowEdge, {{"kind", "event_flow"}, {"subkind", "next_utterance"},
                                         {"from", "h2"}, {"to", "h1"}, {"conversation", "c9"},
                                         {"utterances", {3, 4}}}));
  EXPECT_EQ(g.stats().event_flows, 2u);
  EXPECT_THROW(ApplyEdit(g, Op(OpKind::kAddFlowEdge, {{"kind", "event_flow"},
                                                      {"subkind", "next_utterance"},
                                                      {"from", "h1"}, {"to", "e1"}})),
               ValidationError);

  const auto r = ApplyEdit(g, Op(OpKind::kLabelEdge, {{"kind", "emotion_intent"}, {"from", "tail:tired"},
                                                      {"to", "tail:see a doctor"},
                                                      {"intent_label", "advise"}}));
  EXPECT_EQ(r["detail"]["edge"]["intent_label"], "advise");
  EXPECT_EQ(g.stats().emotion_intent_flows, 1u);
  EXPECT_THROW(ApplyEdit(g, Op(OpKind::kLabelEdge, {{"kind", "emotion_intent"}, {"from", "tail:tired"},
                                                    {"to", "tail:see a doctor"},
                                                    {"intent_label", "other"}})),
               ValidationError);
  EXPECT_THROW(ApplyEdit(g, Op(OpKind::kLabelEdge, {{"kind", "emotion_cause"}, {"from", "tail:tired"},
                                                    {"to", "tail:see a doctor"}})),
               NotFoundError);

  ApplyEdit(g, Op(OpKind::kDeleteFlowEdge, {{"kind", "emotion_intent"}, {"from", "tail:tired"},
                                            {"to", "tail:see a doctor"}, {"intent_label", "advise"}}));
  EXPECT_EQ(g.stats().emotion_intent_flows, 0u);
  EXPECT_THROW(ApplyEdit(g, Op(OpKind::kDeleteFlowEdge, {{"kind", "emotion_intent"},
                                                         {"from", "tail:tired"},
                                                         {"to", "tail:see a doctor"},
                                                         {"intent_label", "advise"}})),
               NotFoundError);
}

TEST(ApplyEditTest, FailedEditLeavesGraphUntouched) {
  auto g = Fixture();
  const std::string before = graph::Serialize(g);
  const std::vector<EditOp> bad = {
      Op(OpKind::kAddTail, {{"head", "h1"}, {"relation", "xReact"}, {"tail", "tired"}}),
      Op(OpKind::kReviseTail, {{"head", "h2"}, {"relation", "xNeed"}, {"tail", "nope"}, {"new_tail", "x"}}),
      Op(OpKind::kAddFlowEdge, {{"kind", "concept_flow"}, {"from", "h1"}, {"to", "h2"}}),
      Op(OpKind::kLabelEdge, {{"kind", "event_flow"}, {"from", "h1"}, {"to", "h2"}}),
      Op(OpKind::kDeleteFlowEdge, {{"kind", "atomic"}, {"from", "h1"}, {"to", "tail:tired"}})};
  for (const auto& op : bad) {
    EXPECT_THROW(ApplyEdit(g, op), Error) << ToJson(op).dump();
    EXPECT_EQ(graph::Serialize(g), before);
  }
}

TEST(EditOpJsonTest, RoundTripAndErrors) {
  auto op = Op(OpKind::kLabelEdge, {{"kind", "emotion_cause"}});
  op.base_version = 7;
  const auto back = EditOpFromJson(ToJson(op));
  EXPECT_EQ(back.op, op.op);
  EXPECT_EQ(back.payload, op.payload);
  EXPECT_EQ(back.author, "tester");
  EXPECT_EQ(back.base_version, 7u);
  EXPECT_THROW(EditOpFromJson(json{{"payload", json::object()}}), ValidationError);
  EXPECT_THROW(EditOpFromJson(json{{"op", "rename"}, {"payload", json::object()}}), ValidationError);
  for (const char* name : {"add_tail", "revise_tail", "delete_tail", "add_flow_edge", "label_edge",
                           "delete_flow_edge"}) {
    EXPECT_TRUE(ParseOpKind(name)) << name;
  }
}

}  // namespace
}  // namespace convkg::edit
