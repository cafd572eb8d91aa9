#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "convkg/edges.hpp"
#include "convkg/error.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

namespace convkg::edges {
namespace {

using convkg::testing::Match;
using convkg::testing::RandomMatches;

TEST(EventFlowTest, HandExample) {
  const std::vector<link::MentionHeadMatch> ms = {Match("c", 3, 0, "D"), Match("c", 1, 0, "C"),
                                                  Match("c", 0, 0, "A"), Match("c", 0, 1, "B")};
  const auto edges = BuildEventFlows(ms);
  ASSERT_EQ(edges.size(), 2u);
  const auto& sub = edges[0].subkind == FlowSubkind::kNextSubUtterance ? edges[0] : edges[1];
  const auto& utt = edges[0].subkind == FlowSubkind::kNextUtterance ? edges[0] : edges[1];
  EXPECT_EQ(sub.from, "A");
  EXPECT_EQ(sub.to, "B");
  EXPECT_EQ(sub.provenance, (std::vector<Provenance>{{"c", {0}}}));
  EXPECT_EQ(utt.from, "B");
  EXPECT_EQ(utt.to, "C");
  EXPECT_EQ(utt.provenance, (std::vector<Provenance>{{"c", {0, 1}}}));
  EXPECT_EQ(utt.weight, 1u);
}

TEST(EventFlowTest, CrossProductPairsEveryMatch) {
  const std::vector<link::MentionHeadMatch> ms = {Match("c", 0, 0, "A"), Match("c", 0, 1, "B"),
                                                  Match("c", 1, 0, "C"), Match("c", 1, 0, "D")};
  EXPECT_EQ(BuildEventFlows(ms, {true}).size(), 2u + 4u);
  EXPECT_EQ(BuildEventFlows(ms, {false}).size(), 2u + 1u);
}

TEST(EventFlowTest, SelfLoopsSkippedAndRepeatsMerged) {
  const std::vector<link::MentionHeadMatch> ms = {
      Match("a", 0, 0, "X"), Match("a", 1, 0, "X"), Match("a", 2, 0, "Y"),
      Match("b", 4, 0, "X"), Match("b", 5, 0, "Y")};
  const auto edges = BuildEventFlows(ms);
  ASSERT_EQ(edges.size(), 1u);
  EXPECT_EQ(edges[0].weight, 2u);
  EXPECT_EQ(edges[0].provenance,
            (std::vector<Provenance>{{"a", {1, 2}}, {"b", {4, 5}}}));
}

TEST(EventFlowTest, MatchesPairwiseOracle) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    std::mt19937_64 rng(seed);
    const auto ms = RandomMatches(rng, 1 + rng() % 8, 1 + rng() % 12);
    for (bool cross : {false, true}) {
      EXPECT_EQ(oracle::ToMultiset(BuildEventFlows(ms, {cross})),
                oracle::BruteForceFlows(ms, EdgeKind::kEventFlow, cross))
          << "seed " << seed << " cross " << cross;
    }
  }
}

TEST(ConceptFlowTest, SameAdjacencyNoSubkind) {
  std::mt19937_64 rng(5);
  const auto ms = RandomMatches(rng, 4, 6);
  const auto edges = BuildConceptFlows(ms);
  for (const auto& e : edges) {
    EXPECT_EQ(e.kind, EdgeKind::kConceptFlow);
    EXPECT_FALSE(e.subkind.has_value());
  }
  EXPECT_EQ(oracle::ToMultiset(edges), oracle::BruteForceFlows(ms, EdgeKind::kConceptFlow, false));
}

TEST(MergeTest, OrderIndependent) {
  std::mt19937_64 rng(9);
  auto edges = BuildEventFlows(RandomMatches(rng, 6, 5));
  std::vector<FlowEdge> split;
  for (const auto& e : edges) {
    for (const auto& p : e.provenance) {
      FlowEdge one = e;
      one.provenance = {p};
      one.weight = 1;
      split.push_back(one);
    }
  }
  std::shuffle(split.begin(), split.end(), rng);
  EXPECT_EQ(Merge(split), edges);
}

TEST(FrequencyFilterTest, KeepsAtLeastMinWeight) {
  std::mt19937_64 rng(3);
  const auto edges = BuildEventFlows(RandomMatches(rng, 20, 4));
  const auto kept = FrequencyFilter(edges, 3);
  const auto expected = std::count_if(edges.begin(), edges.end(),
                                      [](const FlowEdge& e) { return e.provenance.size() >= 3; });
  EXPECT_EQ(static_cast<std::ptrdiff_t>(kept.size()), expected);
  EXPECT_EQ(FrequencyFilter(edges, 1).size(), edges.size());
}

TEST(ValidateEdgeTest, RejectsInconsistentFields) {
  FlowEdge e{EdgeKind::kEventFlow, FlowSubkind::kNextUtterance, "a", "b", 1, std::nullopt,
             {{"c", {0, 1}}}};
  EXPECT_NO_THROW(ValidateEdge(e));
  FlowEdge no_subkind = e;
  no_subkind.subkind.reset();
  EXPECT_THROW(ValidateEdge(no_subkind), ValidationError);
  FlowEdge bad_weight = e;
  bad_weight.weight = 2;
  EXPECT_THROW(ValidateEdge(bad_weight), ValidationError);
  FlowEdge intent = e;
  intent.kind = EdgeKind::kEmotionIntent;
  intent.subkind.reset();
  EXPECT_THROW(ValidateEdge(intent), ValidationError);
  intent.intent_label = Intent::kOther;
  EXPECT_THROW(ValidateEdge(intent), ValidationError);
  intent.intent_label = Intent::kAsk;
  EXPECT_NO_THROW(ValidateEdge(intent));
}

TEST(EmotionEdgeTest, CauseExample) {
  const auto edges = EmotionEdges(convkg::testing::CauseExample());
  ASSERT_EQ(edges.size(), 1u);
  EXPECT_EQ(edges[0].kind, EdgeKind::kEmotionCause);
  EXPECT_EQ(edges[0].from, "tail:angry");
  EXPECT_EQ(edges[0].to, "tail:insomnia");
  EXPECT_EQ(edges[0].provenance, (std::vector<Provenance>{{"e", {0, 1}}}));
}

TEST(EmotionEdgeTest, IntentExample) {
  const auto edges = EmotionEdges(convkg::testing::IntentExample());
  ASSERT_EQ(edges.size(), 1u);
  EXPECT_EQ(edges[0].kind, EdgeKind::kEmotionIntent);
  EXPECT_EQ(edges[0].intent_label, Intent::kAsk);
  EXPECT_EQ(edges[0].from, kb::TailNodeId("h2", kb::Relation::kXReact, "Uncomfortable",
                                          kb::TailIdentity::kGraphWide));
  EXPECT_EQ(edges[0].to, kb::TailNodeId("h2", kb::Relation::kXWant, "Take medicine",
                                        kb::TailIdentity::kGraphWide));
}

TEST(EmotionEdgeTest, NoCauseWithoutKeywordOverlap) {
  auto ex = convkg::testing::CauseExample();
  ex.corpus.conversations[0].utterances[0].text = "the weather was nice";
  EXPECT_TRUE(EmotionEdges(ex).empty());
}

TEST(EmotionEdgeTest, OtherEmotionOrIntentGivesNothing) {
  auto cause = convkg::testing::CauseExample();
  cause.corpus.conversations[0].utterances[1].emotion = Emotion::kOther;
  EXPECT_TRUE(EmotionEdges(cause).empty());
  auto intent = convkg::testing::IntentExample();
  intent.corpus.conversations[0].utterances[1].intent = Intent::kOther;
  EXPECT_TRUE(EmotionEdges(intent).empty());
}

TEST(EmotionEdgeTest, TailEmotionMustMatchUtterance) {
  auto ex = convkg::testing::CauseExample();
  ex.corpus.conversations[0].utterances[1].emotion = Emotion::kJoy;
  EXPECT_TRUE(EmotionEdges(ex).empty());
}

TEST(EmotionEdgeTest, PerHeadTailIds) {
  const auto ex = convkg::testing::CauseExample();
  LexiconSentimentClassifier classifier(DefaultEmotionLexicon());
  embed::HashingEmbeddingProvider provider(32);
  const auto labels = LabelTailEmotions(ex.kb, classifier, provider, DefaultSurprisePrototypes());
  KeywordExtractor keywords;
  keywords.AddVocabulary(ex.corpus);
  const EmotionEdgeContext ctx{&ex.kb, &labels, &keywords, kb::TailIdentity::kPerHead};
  const auto convs = LinkConversations(ex.corpus, ex.matches, keywords);
  ASSERT_EQ(convs.size(), 1u);
  const auto edges = BuildEmotionCauseEdges(convs[0], ctx);
  ASSERT_EQ(edges.size(), 1u);
  EXPECT_EQ(edges[0].from, kb::TailNodeId("h1", kb::Relation::kXReact, "angry",
                                          kb::TailIdentity::kPerHead));
}

TEST(LexiconClassifierTest, LongestKeywordWins) {
  LexiconSentimentClassifier c({{"happy", Emotion::kJoy}, {"unhappy", Emotion::kSad},
                                {"生气", Emotion::kAngry}});
  EXPECT_EQ(c.Classify("I am UNHAPPY"), Emotion::kSad);
  EXPECT_EQ(c.Classify("happy days"), Emotion::kJoy);
  EXPECT_EQ(c.Classify("他很生气"), Emotion::kAngry);
  EXPECT_EQ(c.Classify("a table"), Emotion::kOther);
}

TEST(LexiconClassifierTest, ShippedLexiconLoads) {
  const auto lex = LoadEmotionLexicon(std::filesystem::path(CONVKG_TEST_DATA) / ".." / ".." /
                                      "config" / "emotion_lexicon.tsv");
  EXPECT_FALSE(lex.empty());
  for (const auto& [word, e] : lex) EXPECT_NE(e, Emotion::kSurprising) << word;
}

TEST(TailEmotionTest, SurprisePromotion) {
  LexiconSentimentClassifier c(DefaultEmotionLexicon());
  embed::HashingEmbeddingProvider p(32);
  const std::vector<embed::Vector> protos = {p.EmbedOne("shocked")};
  EXPECT_EQ(LabelTailEmotion("shocked", c, p, protos, 0.7), Emotion::kSurprising);
  EXPECT_EQ(LabelTailEmotion("a chair", c, p, protos, 0.99), Emotion::kOther);
  EXPECT_EQ(LabelTailEmotion("angry", c, p, {p.EmbedOne("angry")}, 0.7), Emotion::kAngry);
}

TEST(KeywordTest, FromTextUsesVocabulary) {
  KeywordExtractor k({"的"}, {"压力", "工作", "失眠"});
  EXPECT_EQ(k.FromText("工作的压力"), (std::set<std::string>{"工作", "压力"}));
  EXPECT_EQ(k.FromText("Take Medicine!"), (std::set<std::string>{"take", "medicine"}));
}

TEST(KeywordTest, FromParseKeepsContentWords) {
  KeywordExtractor k;
  const auto utt = convkg::testing::Utt(
      "c", 0, {convkg::testing::Sub({{"我", "r", 2, "SBV"}, {"失眠", "v", 0, "HED"},
                                     {"了", "u", 2, "RAD"}, {"很", "d", 5, "ADV"},
                                     {"累", "a", 2, "COO"}})});
  EXPECT_EQ(k.FromParse(utt), (std::set<std::string>{"失眠", "累"}));
}

TEST(EdgeJsonTest, RoundTrip) {
  const FlowEdge e{EdgeKind::kEmotionIntent, std::nullopt, "tail:a", "tail:b", 2, Intent::kAsk,
                   {{"c", {0, 1}}, {"d", {3, 4}, std::string(kExpertSource)}}};
  EXPECT_EQ(EdgeFromJson(ToJson(e)), e);
  auto j = ToJson(e);
  j["kind"] = "sideways";
  EXPECT_THROW(EdgeFromJson(j), ValidationError);
}

TEST(EdgeJsonTest, FileRoundTrip) {
  std::mt19937_64 rng(1);
  const auto edges = BuildEventFlows(RandomMatches(rng, 5, 5));
  convkg::testing::TempDir dir;
  WriteEdges(dir / "edges.jsonl", edges);
  EXPECT_EQ(LoadEdges(dir / "edges.jsonl"), edges);
}

}  // namespace
}  // namespace convkg::edges
