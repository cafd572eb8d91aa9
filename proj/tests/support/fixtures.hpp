#ifndef CONVKG_TESTS_FIXTURES_HPP_
#define CONVKG_TESTS_FIXTURES_HPP_

#include <cstddef>
#include <filesystem>
#include <initializer_list>
#include <random>
#include <string>
#include <vector>

#include "convkg/corpus.hpp"
#include "convkg/edges.hpp"
#include "convkg/embedding.hpp"
#include "convkg/extract.hpp"
#include "convkg/kb.hpp"
#include "convkg/link.hpp"

namespace convkg::testing {

std::filesystem::path DataPath(const std::string& name);

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

struct Tok {
  std::string form;
  std::string pos;
  int head;
  std::string deprel;
};

// Tokens are numbered from 1 in list order.
corpus::SubUtterance Sub(std::initializer_list<Tok> tokens, std::size_t index = 0,
                         const std::string& text = "");
corpus::ParsedUtterance Utt(const std::string& conversation, std::size_t utterance,
                            std::vector<corpus::SubUtterance> subs);

// Golden parses of the worked examples (keyed "urge", "pace", "university",
// "chain", "two_adv" in tests/data/golden.conllu).
corpus::ParsedUtterance GoldenParse(const std::string& conversation);

link::MentionHeadMatch Match(const std::string& conversation, std::size_t utterance,
                             std::size_t sub, const std::string& head, double score = 1.0,
                             const std::string& text = "");

embed::Vector RandomVector(std::size_t dim, std::mt19937_64& rng);

// Conversations c0.. with 2-7 utterances, 0-3 matches per utterance spread
// over sub-utterances 0-2, heads h0..h{heads-1}; returned shuffled.
std::vector<link::MentionHeadMatch> RandomMatches(std::mt19937_64& rng, std::size_t conversations,
                                                  std::size_t heads);

// A two-utterance conversation "e" with one linked head, small enough to
// check emotion edges by hand.
struct EmotionExample {
  corpus::Corpus corpus;
  kb::KnowledgeBase kb;
  std::vector<link::MentionHeadMatch> matches;
};

// Sleepless night, then an angry reply linked to a head whose xReact tail is
// "angry" and whose xNeed tail is "insomnia".
EmotionExample CauseExample();
// A sad utterance linked to a head with xReact "Uncomfortable" and xWant
// "Take medicine"; the reply asks "Did you take medicine?".
EmotionExample IntentExample();

// Default lexicon, hashing embeddings, keywords from the example corpus.
std::vector<edges::FlowEdge> EmotionEdges(const EmotionExample& ex);

}  // namespace convkg::testing

#endif  // CONVKG_TESTS_FIXTURES_HPP_
