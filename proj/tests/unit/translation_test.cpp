#include <algorithm>
#include <atomic>
#include <cctype>
#include <map>
#include <random>
#include <string>

#include <gtest/gtest.h>

#include "convkg/error.hpp"
#include "convkg/translation.hpp"

namespace convkg::kb {
namespace {

std::string Replaced(const std::string& s) {
  return ApplyReplacements(s, DefaultReplacementRules()).text;
}

TEST(ReplacementTest, PatternRows) {
  EXPECT_EQ(Replaced("PersonX votes for personY"), "Someone votes for someone else");
  EXPECT_EQ(Replaced("PersonX votes for PersonY"), "Someone votes for someone else");
  EXPECT_EQ(Replaced("PersonX hurts PersonX"), "Someone hurts himself");
  EXPECT_EQ(Replaced("PersonX feeds PersonX's dog"), "Someone feeds his dog");
  EXPECT_EQ(Replaced("PersonX borrows PersonY's car"), "Someone borrows someone else's car");
  EXPECT_EQ(Replaced("PersonX gets ___ as a pet"), "Someone gets something as a pet");
}

TEST(ReplacementTest, NoPatternIsIdentity) {
  const auto r = ApplyReplacements("to go home", DefaultReplacementRules());
  EXPECT_EQ(r.text, "to go home");
  EXPECT_TRUE(r.log.empty());
}

TEST(ReplacementTest, LogInvertsToOriginal) {
  for (const std::string s :
       {"PersonX gives PersonY ___ and PersonY thanks PersonX", "PersonX washes PersonX's car",
        "PersonX's friend meets PersonY", "___", "PersonX"}) {
    const auto r = ApplyReplacements(s, DefaultReplacementRules());
    EXPECT_EQ(InvertReplacements(r), s) << s;
  }
}

TEST(ReplacementTest, MismatchedTemplatesAreRejected) {
  EXPECT_THROW(ApplyReplacements("x", {{"A...B", "C"}}), ValidationError);
}

TEST(JointTranslateTest, IdentityClientRoundTrips) {
  IdentityTranslationClient client;
  const auto r = JointTranslate("PersonX eats", Relation::kXWant, "to sleep",
                                UniformConnectors({" AND ", std::nullopt}), client);
  EXPECT_EQ(r.head, "PersonX eats");
  EXPECT_EQ(r.tail, "to sleep");
  EXPECT_FALSE(r.split_failed);
}

TEST(JointTranslateTest, UppercasingClientSplits) {
  FunctionTranslationClient client([](std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return out;
  });
  const auto r = JointTranslate("goes home", Relation::kXEffect, "sleeps well",
                                UniformConnectors({" AND ", std::nullopt}), client);
  EXPECT_EQ(r.head, "GOES HOME");
  EXPECT_EQ(r.tail, "SLEEPS WELL");
  EXPECT_FALSE(r.split_failed);
}

TEST(JointTranslateTest, DroppedConnectorFallsBack) {
  std::atomic<int> calls{0};
  FunctionTranslationClient client([&](std::string_view s) {
    ++calls;
    std::string out(s);
    const auto at = out.find(" AND ");
    if (at != std::string::npos) out.erase(at, 5);
    return "zh:" + out;
  });
  const auto r = JointTranslate("eats", Relation::kXWant, "sleeps",
                                UniformConnectors({" AND ", " AND "}), client);
  EXPECT_TRUE(r.split_failed);
  EXPECT_EQ(r.head, "zh:eats");
  EXPECT_EQ(r.tail, "zh:sleeps");
  EXPECT_EQ(calls.load(), 3);
}

TEST(JointTranslateTest, ClientErrorsPropagate) {
  FunctionTranslationClient client(
      [](std::string_view) -> std::string { throw RetriableError("service unavailable"); });
  EXPECT_THROW(
      JointTranslate("a", Relation::kXWant, "b", DefaultConnectors(), client),
      RetriableError);
}

TEST(JointTranslateTest, DefaultMarkersSurviveIdentity) {
  IdentityTranslationClient client;
  for (Relation r : kAllRelations) {
    const auto t = JointTranslate("PersonX runs", r, "tired", DefaultConnectors(), client);
    EXPECT_EQ(t.head, "PersonX runs");
    EXPECT_EQ(t.tail, "tired");
  }
}

TEST(TranslateKbTest, TableClientAndReplacements) {
  KnowledgeBase kb;
  kb.AddHead({"h1", "PersonX votes for PersonY", HeadLevel::kEvent});
  kb.AddTriple({"h1", Relation::kXReact, "proud"});
  TableTranslationClient client(std::map<std::string, std::string>{
      {"Someone votes for someone else ⟦xReact⟧ proud", "有人投票给别人 ⟦xReact⟧ 自豪"}});
  const auto out = TranslateKb(kb, DefaultReplacementRules(), DefaultConnectors(), client);
  ASSERT_EQ(out.kb.triples().size(), 1u);
  EXPECT_EQ(out.kb.FindHead("h1")->text, "有人投票给别人");
  EXPECT_EQ(out.kb.triples()[0].tail, "自豪");
  EXPECT_EQ(out.split_failures, 0u);
}

TEST(QualityReportTest, Means) {
  const auto r = TranslationQualityReport({{"a", 1, 0}, {"b", 0, 0}, {"c", 1, 1}, {"d", 1, 1}});
  EXPECT_DOUBLE_EQ(r.fluency, 0.75);
  EXPECT_DOUBLE_EQ(r.logic, 0.5);
  std::vector<QualityLabel> labels;
  for (int i = 0; i < 200; ++i) labels.push_back({std::to_string(i), i < 184 ? 1 : 0, 1});
  EXPECT_DOUBLE_EQ(TranslationQualityReport(labels).fluency, 0.92);
  EXPECT_THROW(TranslationQualityReport({}), ValidationError);
  EXPECT_THROW(TranslationQualityReport({{"x", 2, 0}}), ValidationError);
}

}  // namespace
}  // namespace convkg::kb
