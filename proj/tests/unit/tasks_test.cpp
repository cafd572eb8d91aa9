#include <algorithm>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "convkg/embedding.hpp"
#include "convkg/error.hpp"
#include "convkg/graph.hpp"
#include "convkg/tasks.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

namespace convkg::tasks {
namespace {

using convkg::testing::GoldenParse;

TaskInstance Full() {
  TaskInstance t;
  t.history = {"U_{i-2}", "U_{i-1}"};
  t.current = "U_i";
  t.knowledge = {{"t1", kb::Relation::kXAttr, "h", 1.0}, {"t2", kb::Relation::kXReact, "h", 1.0}};
  t.label = "joy";
  return t;
}

TEST(AssembleInputTest, ExactFormat) {
  EXPECT_EQ(AssembleInput(Full(), InputMode::kKnowledgeHistory),
            "U_{i-2} [SEP] U_{i-1} [SEP] U_i [SEP] t1 [SEP] t2");
  EXPECT_EQ(AssembleInput(Full(), InputMode::kHistory), "U_{i-2} [SEP] U_{i-1} [SEP] U_i");
  EXPECT_EQ(AssembleInput(Full(), InputMode::kKnowledge), "U_i [SEP] t1 [SEP] t2");
  EXPECT_EQ(AssembleInput(Full(), InputMode::kBase), "U_i");
}

TEST(AssembleInputTest, MissingSlotsLeaveNoSeparators) {
  TaskInstance t = Full();
  t.history = {"U_{i-1}"};
  t.knowledge.clear();
  EXPECT_EQ(AssembleInput(t, InputMode::kKnowledgeHistory), "U_{i-1} [SEP] U_i");
  t.history.clear();
  EXPECT_EQ(AssembleInput(t, InputMode::kKnowledgeHistory), "U_i");
}

class LookupClassifier : public TextClassifier {
 public:
  explicit LookupClassifier(std::map<std::string, std::string> table) : table_(std::move(table)) {}
  std::string Predict(const std::string& input) override { return table_.at(input); }

 private:
  std::map<std::string, std::string> table_;
};

class ConstantClassifier : public TextClassifier {
 public:
  std::string Predict(const std::string&) override { return "a"; }
  bool thread_safe() const override { return false; }
};

std::vector<TaskInstance> Numbered(std::size_t n) {
  std::vector<TaskInstance> out;
  for (std::size_t i = 0; i < n; ++i) {
    TaskInstance t;
    t.conversation_id = "c";
    t.utterance_index = i;
    t.current = "utterance " + std::to_string(i);
    if (i > 0) t.history = {"utterance " + std::to_string(i - 1)};
    t.knowledge = {{"k" + std::to_string(i), kb::Relation::kXReact, "h", 0.9}};
    t.label = i % 2 ? "a" : "b";
    out.push_back(t);
  }
  return out;
}

TEST(EvaluateTaskTest, LookupClassifierIsPerfectInEveryMode) {
  const auto instances = Numbered(40);
  for (InputMode mode : kAllModes) {
    std::map<std::string, std::string> table;
    for (const auto& t : instances) table[AssembleInput(t, mode)] = t.label;
    LookupClassifier c(table);
    const auto r = EvaluateTask(instances, c, mode, 4);
    EXPECT_DOUBLE_EQ(r.accuracy, 1.0) << ToString(mode);
    EXPECT_EQ(r.total, 40u);
  }
}

TEST(EvaluateTaskTest, ConstantClassifierGetsHalf) {
  ConstantClassifier c;
  const auto r = EvaluateTask(Numbered(40), c, InputMode::kBase, 4);
  EXPECT_DOUBLE_EQ(r.accuracy, 0.5);
  EXPECT_EQ(r.correct, 20u);
  EXPECT_THROW(EvaluateTask({}, c, InputMode::kBase), ValidationError);
}

TEST(NearestCentroidTest, SeparatesDistinctVocabularies) {
  embed::HashingEmbeddingProvider p(64);
  NearestCentroidClassifier c(p);
  c.Train({{"我很开心", "joy"}, {"太开心了", "joy"}, {"我很生气", "angry"}, {"气死我了", "angry"}});
  EXPECT_EQ(c.Predict("真开心"), "joy");
  EXPECT_EQ(c.Predict("好生气"), "angry");
  NearestCentroidClassifier empty(p);
  EXPECT_THROW(empty.Train({}), ValidationError);
}

TEST(SplitInstancesTest, DeterministicSizes) {
  const auto [a, b] = SplitInstances(Numbered(10), 0.8, 7);
  EXPECT_EQ(a.size(), 8u);
  EXPECT_EQ(b.size(), 2u);
  const auto [c, d] = SplitInstances(Numbered(10), 0.8, 7);
  EXPECT_EQ(a[0].current, c[0].current);
}

struct KnowledgeFixture {
  kb::KnowledgeBase kb;
  graph::Graph graph;
  embed::HashingEmbeddingProvider provider{64};
  std::unique_ptr<link::HeadIndex> heads;

  KnowledgeFixture() {
    kb.AddHead({"h1", "学习节奏快", kb::HeadLevel::kEvent});
    kb.AddHead({"h2", "股票市场", kb::HeadLevel::kEvent});
    kb.AddHead({"h3", "回家", kb::HeadLevel::kEvent});
    for (int i = 0; i < 5; ++i) {
      kb.AddTriple({"h1", kb::Relation::kXReact, "焦虑" + std::to_string(i)});
    }
    kb.AddTriple({"h1", kb::Relation::kXAttr, "勤奋"});
    kb.AddTriple({"h1", kb::Relation::kOReact, "担心"});
    kb.AddTriple({"h1", kb::Relation::kOEffect, "安慰"});
    kb.AddTriple({"h1", kb::Relation::kXWant, "休息"});
    kb.AddTriple({"h2", kb::Relation::kXReact, "兴奋"});
    kb.AddTriple({"h3", kb::Relation::kXReact, "放松"});
    kb.AddTriple({"h3", kb::Relation::kOReact, "高兴"});
    graph = graph::Assemble(kb, {});
    heads = std::make_unique<link::HeadIndex>(kb, kb::HeadLevel::kEvent, provider);
  }
};

TEST(SampleKnowledgeTest, EmotionRelationsCappedAndGrouped) {
  KnowledgeFixture f;
  KnowledgeConfig cfg;
  cfg.per_relation = 3;
  const auto tails = SampleEmotionKnowledge(GoldenParse("pace"), f.graph, *f.heads, f.provider, cfg);
  ASSERT_EQ(tails.size(), 4u);
  EXPECT_EQ(tails[0].relation, kb::Relation::kXAttr);
  EXPECT_EQ(tails[0].text, "勤奋");
  for (std::size_t i = 1; i < 4; ++i) EXPECT_EQ(tails[i].relation, kb::Relation::kXReact);
  for (const auto& t : tails) EXPECT_EQ(t.head_id, "h1");
}

TEST(SampleKnowledgeTest, IntentRelations) {
  KnowledgeFixture f;
  const auto tails = SampleIntentKnowledge(GoldenParse("pace"), f.graph, *f.heads, f.provider);
  ASSERT_EQ(tails.size(), 2u);
  EXPECT_EQ(tails[0].text, "担心");
  EXPECT_EQ(tails[1].text, "安慰");
}

TEST(SampleKnowledgeTest, EveryTailTracesToAQualifyingHead) {
  KnowledgeFixture f;
  for (const std::string key : {"urge", "pace", "university", "chain", "two_adv"}) {
    const auto pu = GoldenParse(key);
    std::vector<embed::Vector> mention_vectors;
    for (const auto& m : extract::ExtractParsing(pu, {})) {
      mention_vectors.push_back(f.provider.EmbedOne(m.text));
    }
    for (Task task : {Task::kEmotion, Task::kIntent}) {
      for (const auto& t : SampleKnowledge(pu, task, f.graph, *f.heads, f.provider)) {
        EXPECT_GE(t.score, link::kDefaultThreshold);
        const auto* head = f.kb.FindHead(t.head_id);
        ASSERT_NE(head, nullptr);
        const auto hv = f.provider.EmbedOne(head->text);
        double best = -1;
        for (const auto& v : mention_vectors) best = std::max(best, oracle::NaiveCosine(v, hv));
        EXPECT_GE(best, link::kDefaultThreshold - 1e-12);
        bool found = false;
        for (const auto& n : f.graph.Neighbors(t.head_id, graph::FamilySet::Of({graph::EdgeFamily::kAtomic}),
                                               graph::Direction::kOut)) {
          found |= n.edge->relation == t.relation && n.node->text == t.text;
        }
        EXPECT_TRUE(found) << t.text;
      }
    }
  }
}

TEST(SampleKnowledgeTest, ThresholdAboveOneExcludesEverything) {
  KnowledgeFixture f;
  KnowledgeConfig cfg;
  cfg.threshold = 1.01;
  EXPECT_TRUE(SampleEmotionKnowledge(GoldenParse("pace"), f.graph, *f.heads, f.provider, cfg).empty());
}

TEST(BuildInstancesTest, OnePerUtteranceWithHistory) {
  KnowledgeFixture f;
  const auto corpus = corpus::LoadCorpus(convkg::testing::DataPath("corpus.jsonl"),
                                         convkg::testing::DataPath("corpus.conllu"));
  const auto inst = BuildInstances(corpus, Task::kIntent, f.graph, *f.heads, f.provider, {}, 2);
  ASSERT_EQ(inst.size(), 12u);
  EXPECT_TRUE(inst[0].history.empty());
  EXPECT_EQ(inst[3].history, (std::vector<std::string>{"那你要好好休息", "我打算回家做饭然后睡觉"}));
  EXPECT_EQ(inst[1].label, "advise");
  EXPECT_TRUE(inst[1].knowledge.empty());  // no parse
}

TEST(TaskNamesTest, RoundTrip) {
  for (InputMode m : kAllModes) EXPECT_EQ(ParseInputMode(ToString(m)), m);
  EXPECT_EQ(ParseTask("emotion"), Task::kEmotion);
  EXPECT_FALSE(ParseTask("sentiment"));
}

}  // namespace
}  // namespace convkg::tasks
