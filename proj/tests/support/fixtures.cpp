#include "fixtures.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <stdexcept>

#include <unistd.h>

#ifndef CONVKG_TEST_DATA
#error "CONVKG_TEST_DATA must point at tests/data"
#endif

namespace convkg::testing {

std::filesystem::path DataPath(const std::string& name) {
  return std::filesystem::path(CONVKG_TEST_DATA) / name;
}

TempDir::TempDir() {
  static std::atomic<int> counter{0};
  const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
  path_ = std::filesystem::temp_directory_path() /
          ("convkg-test-" + std::to_string(::getpid()) + "-" + std::to_string(stamp) + "-" +
           std::to_string(counter++));
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

corpus::SubUtterance Sub(std::initializer_list<Tok> tokens, std::size_t index,
                         const std::string& text) {
  corpus::SubUtterance su;
  su.index = index;
  int i = 1;
  for (const auto& t : tokens) su.tokens.push_back({i++, t.form, t.pos, t.head, t.deprel});
  su.text = text.empty() ? su.FormsText() : text;
  return su;
}

corpus::ParsedUtterance Utt(const std::string& conversation, std::size_t utterance,
                            std::vector<corpus::SubUtterance> subs) {
  corpus::ParsedUtterance pu;
  pu.conversation_id = conversation;
  pu.utterance_index = utterance;
  pu.sub_utterances = std::move(subs);
  return pu;
}

corpus::ParsedUtterance GoldenParse(const std::string& conversation) {
  for (auto& pu : corpus::LoadConllu(DataPath("golden.conllu"))) {
    if (pu.conversation_id == conversation) return pu;
  }
  throw std::runtime_error("no golden parse for " + conversation);
}

link::MentionHeadMatch Match(const std::string& conversation, std::size_t utterance,
                             std::size_t sub, const std::string& head, double score,
                             const std::string& text) {
  link::MentionHeadMatch m;
  m.mention.text = text.empty() ? head : text;
  m.mention.source = {conversation, utterance, sub};
  m.head_id = head;
  m.head_text = head;
  m.score = score;
  return m;
}

embed::Vector RandomVector(std::size_t dim, std::mt19937_64& rng) {
  std::normal_distribution<double> d(0.0, 1.0);
  embed::Vector v(dim);
  for (auto& x : v) x = d(rng);
  return v;
}

std::vector<link::MentionHeadMatch> RandomMatches(std::mt19937_64& rng, std::size_t conversations,
                                                  std::size_t heads) {
  std::vector<link::MentionHeadMatch> out;
  for (std::size_t c = 0; c < conversations; ++c) {
    const std::size_t utts = 2 + rng() % 6;
    for (std::size_t u = 0; u < utts; ++u) {
      const std::size_t n = rng() % 4;
      for (std::size_t i = 0; i < n; ++i) {
        out.push_back(Match("c" + std::to_string(c), u, rng() % 3,
                            "h" + std::to_string(rng() % heads)));
      }
    }
  }
  std::shuffle(out.begin(), out.end(), rng);
  return out;
}

namespace {

corpus::Conversation TwoTurns(corpus::Utterance a, corpus::Utterance b) {
  a.index = 0;
  a.speaker = "A";
  b.index = 1;
  b.speaker = "B";
  return {"e", "", {a, b}};
}

}  // namespace

EmotionExample CauseExample() {
  EmotionExample ex;
  ex.corpus.conversations.push_back(
      TwoTurns({0, "", "I had insomnia last night", Emotion::kOther, Intent::kDescribe, {}},
               {1, "", "that makes me so angry", Emotion::kAngry, Intent::kDescribe, {}}));
  ex.kb.AddHead({"h1", "PersonX can't sleep", kb::HeadLevel::kEvent});
  ex.kb.AddTriple({"h1", kb::Relation::kXReact, "angry"});
  ex.kb.AddTriple({"h1", kb::Relation::kXNeed, "insomnia"});
  ex.kb.AddTriple({"h1", kb::Relation::kXWant, "to rest"});
  ex.matches.push_back(Match("e", 1, 0, "h1", 0.9, "makes me angry"));
  return ex;
}

EmotionExample IntentExample() {
  EmotionExample ex;
  ex.corpus.conversations.push_back(
      TwoTurns({0, "", "I feel uncomfortable", Emotion::kSad, Intent::kDescribe, {}},
               {1, "", "Did you take medicine?", Emotion::kOther, Intent::kAsk, {}}));
  ex.corpus.parses[{"e", 1}] =
      Utt("e", 1,
          {Sub({{"Did", "v", 3, "ADV"}, {"you", "r", 3, "SBV"}, {"take", "v", 0, "HED"},
                {"medicine", "n", 3, "VOB"}, {"?", "wp", 3, "WP"}},
               0, "Did you take medicine?")});
  ex.kb.AddHead({"h2", "PersonX feels sick", kb::HeadLevel::kEvent});
  ex.kb.AddTriple({"h2", kb::Relation::kXReact, "Uncomfortable"});
  ex.kb.AddTriple({"h2", kb::Relation::kXWant, "Take medicine"});
  ex.kb.AddTriple({"h2", kb::Relation::kXNeed, "go outside"});
  ex.matches.push_back(Match("e", 0, 0, "h2", 0.9, "feel uncomfortable"));
  return ex;
}

std::vector<edges::FlowEdge> EmotionEdges(const EmotionExample& ex) {
  edges::LexiconSentimentClassifier classifier(edges::DefaultEmotionLexicon());
  embed::HashingEmbeddingProvider provider(32);
  const auto labels = edges::LabelTailEmotions(ex.kb, classifier, provider,
                                               edges::DefaultSurprisePrototypes());
  edges::KeywordExtractor keywords;
  keywords.AddVocabulary(ex.corpus);
  edges::EmotionEdgeContext ctx{&ex.kb, &labels, &keywords, kb::TailIdentity::kGraphWide};
  std::vector<edges::FlowEdge> out;
  for (const auto& conv : edges::LinkConversations(ex.corpus, ex.matches, keywords)) {
    for (auto& e : edges::BuildEmotionCauseEdges(conv, ctx)) out.push_back(std::move(e));
    for (auto& e : edges::BuildEmotionIntentEdges(conv, ctx)) out.push_back(std::move(e));
  }
  return edges::Merge(std::move(out));
}

}  // namespace convkg::testing
