#include <algorithm>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "convkg/error.hpp"
#include "convkg/extract.hpp"
#include "fixtures.hpp"

namespace convkg::extract {
namespace {

using convkg::testing::GoldenParse;
using convkg::testing::Sub;
using convkg::testing::Utt;

std::vector<std::string> Texts(const std::vector<EventMention>& ms) {
  std::vector<std::string> out;
  for (const auto& m : ms) out.push_back(m.text);
  return out;
}

TEST(GoldenTest, VerbDrivenDropsSubjectAndParticles) {
  const auto ms = ExtractParsing(GoldenParse("urge"), {});
  EXPECT_EQ(Texts(ms), (std::vector<std::string>{"催促提供物资的商家"}));
  EXPECT_EQ(ms[0].driver, Driver::kVerb);
  EXPECT_EQ(ms[0].method, Method::kParsing);
}

TEST(GoldenTest, AdjectiveDrivenKeepsSubject) {
  const auto ms = ExtractParsing(GoldenParse("pace"), {});
  EXPECT_EQ(Texts(ms), (std::vector<std::string>{"学习节奏快"}));
  EXPECT_EQ(ms[0].driver, Driver::kAdjective);
}

TEST(GoldenTest, SecondaryDecomposition) {
  const auto pu = GoldenParse("university");
  const auto events = ExtractEvents(pu, {});
  ASSERT_EQ(events.size(), 1u);
  EXPECT_EQ(events[0].text, "以为进了大学就可以放松放松");
  EXPECT_EQ(Texts(SecondaryDecompose(events[0], pu.sub_utterances[0], {})),
            (std::vector<std::string>{"进了大学", "就可以放松放松"}));
  EXPECT_EQ(Texts(ExtractParsing(pu, {})), (std::vector<std::string>{"进了大学", "就可以放松放松"}));
}

TEST(GoldenTest, ThreeChainedVerbs) {
  EXPECT_EQ(Texts(ExtractParsing(GoldenParse("chain"), {})),
            (std::vector<std::string>{"回家", "做饭", "睡觉"}));
}

TEST(GoldenTest, TwoAdverbialsKeptInOrder) {
  const auto pu = GoldenParse("two_adv");
  const auto m = ExtractVerbDriven(pu.sub_utterances[0], 3, {});
  EXPECT_EQ(m.text, "每天认真学习");
}

TEST(SecondaryDecomposeTest, HighThresholdLeavesMentionAlone) {
  ExtractorConfig cfg;
  cfg.decompose_depth_threshold = 5;
  const auto pu = GoldenParse("university");
  const auto events = ExtractEvents(pu, cfg);
  EXPECT_EQ(Texts(SecondaryDecompose(events[0], pu.sub_utterances[0], cfg)),
            (std::vector<std::string>{"以为进了大学就可以放松放松"}));
}

TEST(SecondaryDecomposeTest, SingleVerbUnchanged) {
  const auto su = Sub({{"睡觉", "v", 0, "HED"}});
  const auto m = ExtractVerbDriven(su, 1, {});
  EXPECT_EQ(m.text, "睡觉");
  EXPECT_EQ(Texts(SecondaryDecompose(m, su, {})), (std::vector<std::string>{"睡觉"}));
}

TEST(ExtractEventsTest, NounHeadYieldsNothing) {
  const auto pu = Utt("n", 0, {Sub({{"明天", "nt", 2, "ATT"}, {"考试", "n", 0, "HED"}})});
  EXPECT_TRUE(ExtractEvents(pu, {}).empty());
}

TEST(ExtractAdjectiveDrivenTest, Variants) {
  EXPECT_EQ(ExtractAdjectiveDriven(Sub({{"快", "a", 0, "HED"}}), 1).text, "快");
  const auto su = Sub({{"老师", "n", 4, "SBV"}, {"和", "c", 3, "LAD"}, {"学生", "n", 4, "SBV"},
                       {"累", "a", 0, "HED"}});
  EXPECT_EQ(ExtractAdjectiveDriven(su, 4).text, "老师和学生累");
}

TEST(SplitAndFilterTest, StopPhrasesAndLength) {
  const auto pu = Utt("s", 0,
                      {Sub({{"好的", "a", 0, "HED"}, {"，", "wp", 1, "WP"}}, 0, "好的，"),
                       Sub({{"我", "r", 3, "SBV"}, {"明天", "nt", 3, "ADV"}, {"去", "v", 0, "HED"},
                            {"医院", "n", 3, "VOB"}},
                           1)});
  const auto kept = SplitAndFilter(pu, {});
  ASSERT_EQ(kept.size(), 1u);
  EXPECT_EQ(kept[0].text, "我明天去医院");
  EXPECT_TRUE(SplitAndFilter(Utt("e", 0, {}), {}).empty());
}

TEST(SplitAndFilterTest, ShortSubUtterancesDropped) {
  std::vector<corpus::SubUtterance> subs;
  const std::vector<std::string> texts = {"我想睡觉", "好", "明天再说吧", "嗯嗯", "周末去爬山"};
  for (std::size_t i = 0; i < texts.size(); ++i) {
    subs.push_back(Sub({{texts[i], "v", 0, "HED"}}, i, texts[i]));
  }
  std::vector<std::string> kept;
  for (const auto& su : SplitAndFilter(Utt("s", 0, subs), {})) kept.push_back(su.text);
  EXPECT_EQ(kept, (std::vector<std::string>{"我想睡觉", "明天再说吧", "周末去爬山"}));
}

TEST(SplitTextTest, SplitsAfterPunctuationRuns) {
  EXPECT_EQ(SplitText("好的，我明天去。你呢？！", {}),
            (std::vector<std::string>{"好的，", "我明天去。", "你呢？！"}));
}

TEST(PosTemplateTest, Examples) {
  EXPECT_EQ(Texts(PosTemplateExtract(Sub({{"想", "v", 0, "HED"}, {"睡觉", "v", 1, "VOB"}}))),
            (std::vector<std::string>{"想睡觉"}));
  EXPECT_TRUE(PosTemplateExtract(Sub({{"学校", "n", 2, "ATT"}, {"食堂", "n", 0, "HED"}})).empty());
  const auto su = Sub({{"做", "v", 0, "HED"}, {"作业", "n", 1, "VOB"}, {"然后", "c", 4, "ADV"},
                       {"睡觉", "v", 1, "COO"}});
  // Left to right: 做作业 (v+n) claims tokens 1-2, then nothing matches at 3-4.
  EXPECT_EQ(Texts(PosTemplateExtract(su)), (std::vector<std::string>{"做作业"}));
  const auto vcv = Sub({{"吃", "v", 0, "HED"}, {"和", "c", 3, "LAD"}, {"喝", "v", 1, "COO"}});
  EXPECT_EQ(Texts(PosTemplateExtract(vcv)), (std::vector<std::string>{"吃和喝"}));
}

TEST(SimpleExtractTest, OneMentionPerSurvivingSubUtterance) {
  const auto pu = Utt("s", 0,
                      {Sub({{"好的", "a", 0, "HED"}}, 0, "好的，"),
                       Sub({{"我明天去医院", "v", 0, "HED"}}, 1, "我明天去医院。"),
                       Sub({{"你要一起吗", "v", 0, "HED"}}, 2, "你要一起吗？")});
  const auto ms = SimpleExtract(pu, {});
  EXPECT_EQ(Texts(ms), (std::vector<std::string>{"我明天去医院", "你要一起吗"}));
  EXPECT_FALSE(ms[0].driver.has_value());
  EXPECT_EQ(ms.size(), SplitAndFilter(pu, {}).size());
}

TEST(ExtractTest, MentionsAreTokenSubsequences) {
  for (const std::string key : {"urge", "pace", "university", "chain", "two_adv"}) {
    const auto pu = GoldenParse(key);
    for (const auto& m : ExtractParsing(pu, {})) {
      const auto& su = pu.sub_utterances.at(m.source.sub_index);
      ASSERT_FALSE(m.tokens.empty());
      EXPECT_TRUE(std::is_sorted(m.tokens.begin(), m.tokens.end()));
      std::string joined;
      for (int t : m.tokens) joined += su.At(t).form;
      EXPECT_EQ(joined, m.text);
    }
  }
}

TEST(ExtractTest, ConceptMethodIsNotAnExtractor) {
  EXPECT_THROW(Extract(GoldenParse("urge"), Method::kConcept, {}), ValidationError);
}

TEST(ExtractTest, MethodNames) {
  EXPECT_EQ(ParseMethod("pos"), Method::kPosTemplate);
  EXPECT_EQ(ParseMethod("parsing"), Method::kParsing);
  EXPECT_EQ(ParseMethod("simple"), Method::kSimple);
  EXPECT_FALSE(ParseMethod("bert"));
}

TEST(ExtractTest, JsonRoundTrip) {
  const auto m = ExtractParsing(GoldenParse("urge"), {}).at(0);
  const auto j = ToJson(m);
  EXPECT_EQ(j["text"], "催促提供物资的商家");
  EXPECT_EQ(j["driver"], "verb");
  EXPECT_EQ(j["method"], "parsing");
  const auto back = MentionFromJson(j);
  EXPECT_EQ(back.text, m.text);
  EXPECT_EQ(back.source, m.source);
}

TEST(ExtractorConfigTest, RejectsZeroThresholds) {
  ExtractorConfig cfg;
  cfg.decompose_depth_threshold = 0;
  EXPECT_THROW(cfg.Validate(), ValidationError);
}

TEST(ExtractorConfigTest, ShippedConfigLoads) {
  const auto cfg = LoadExtractorConfig(std::filesystem::path(CONVKG_TEST_DATA) / ".." / ".." /
                                       "config" / "extractor.json");
  EXPECT_EQ(cfg.min_sub_utterance_chars, 4u);
  EXPECT_TRUE(cfg.stop_phrases.count("好的"));
  EXPECT_TRUE(cfg.stop_phrases.count("就是这样"));
}

}  // namespace
}  // namespace convkg::extract
