#ifndef CONVKG_LINK_HPP_
#define CONVKG_LINK_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "convkg/corpus.hpp"
#include "convkg/embedding.hpp"
#include "convkg/extract.hpp"
#include "convkg/kb.hpp"

// Embedding-similarity linking of mentions and concept words to KB heads.
namespace convkg::link {

inline constexpr double kDefaultThreshold = 0.7;

struct MentionHeadMatch {
  extract::EventMention mention;
  std::string head_id;
  std::string head_text;
  double score = 0.0;
};

// Candidate heads of one level with their vectors, sorted by id so that
// results never depend on KB insertion order.
class HeadIndex {
 public:
  struct Entry {
    std::string id;
    std::string text;
    embed::Vector vector;
  };

  HeadIndex(const kb::KnowledgeBase& kb, kb::HeadLevel level, embed::EmbeddingProvider& provider);
  explicit HeadIndex(std::vector<Entry> entries);

  const std::vector<Entry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  struct Best {
    std::size_t entry = 0;
    double score = 0.0;
  };
  // Highest cosine; equal scores go to the smallest head id. nullopt when
  // the index is empty.
  std::optional<Best> BestMatch(const embed::Vector& v) const;

 private:
  std::vector<Entry> entries_;
};

// Best head regardless of threshold.
std::optional<MentionHeadMatch> BestMatch(const extract::EventMention& m, const HeadIndex& heads,
                                          embed::EmbeddingProvider& provider);

// Best head when its score is >= threshold.
std::optional<MentionHeadMatch> LinkMention(const extract::EventMention& m, const HeadIndex& heads,
                                            embed::EmbeddingProvider& provider,
                                            double threshold = kDefaultThreshold);

// Links every mention; unmatched mentions are dropped, order is preserved.
// Mentions are embedded in one batch per worker chunk.
std::vector<MentionHeadMatch> LinkMentions(const std::vector<extract::EventMention>& mentions,
                                           const HeadIndex& heads,
                                           embed::EmbeddingProvider& provider,
                                           double threshold = kDefaultThreshold,
                                           std::size_t threads = 1);

// Every token tagged v, n or a becomes a concept mention matched against
// entity-level heads.
std::vector<MentionHeadMatch> LinkConcepts(const corpus::ParsedUtterance& utt,
                                           const HeadIndex& entity_heads,
                                           embed::EmbeddingProvider& provider,
                                           double threshold = kDefaultThreshold);

struct FinetunePair {
  std::string mention;
  std::string head;
  std::optional<int> label;  // left empty for annotators
};

// Uniform sample of k matches without replacement, in shuffled order.
// Throws ValidationError when k exceeds the number of matches.
std::vector<FinetunePair> ExportFinetunePairs(const std::vector<MentionHeadMatch>& matches,
                                              std::size_t k, std::uint64_t seed);

nlohmann::json ToJson(const MentionHeadMatch& m);
MentionHeadMatch MatchFromJson(const nlohmann::json& j);
nlohmann::json ToJson(const FinetunePair& p);

}  // namespace convkg::link

#endif  // CONVKG_LINK_HPP_
