#ifndef CONVKG_EDGES_HPP_
#define CONVKG_EDGES_HPP_

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "convkg/corpus.hpp"
#include "convkg/embedding.hpp"
#include "convkg/kb.hpp"
#include "convkg/labels.hpp"
#include "convkg/link.hpp"

// Dialog-flow edges derived from linked conversations.
namespace convkg::edges {

enum class EdgeKind { kEventFlow, kConceptFlow, kEmotionCause, kEmotionIntent };
enum class FlowSubkind { kNextUtterance, kNextSubUtterance };

std::string_view ToString(EdgeKind k);
std::string_view ToString(FlowSubkind s);
std::optional<EdgeKind> ParseEdgeKind(std::string_view s);
std::optional<FlowSubkind> ParseFlowSubkind(std::string_view s);

inline constexpr std::string_view kPipelineSource = "pipeline";
inline constexpr std::string_view kExpertSource = "expert";

struct Provenance {
  std::string conversation_id;
  std::vector<std::size_t> utterances;
  std::string source = std::string(kPipelineSource);
  friend auto operator<=>(const Provenance&, const Provenance&) = default;
};

// Edges are directed from -> to. The emotion_cause direction runs from the
// emotion tail to its cause; walk incoming edges for the opposite reading.
struct FlowEdge {
  EdgeKind kind = EdgeKind::kEventFlow;
  std::optional<FlowSubkind> subkind;  // event_flow only
  std::string from;
  std::string to;
  std::size_t weight = 0;             // always provenance.size()
  std::optional<Intent> intent_label;  // emotion_intent only
  std::vector<Provenance> provenance;

  friend bool operator==(const FlowEdge&, const FlowEdge&) = default;
};

// Identity of an edge for merging: everything except weight and provenance.
struct EdgeKey {
  EdgeKind kind;
  std::optional<FlowSubkind> subkind;
  std::string from;
  std::string to;
  std::optional<Intent> intent_label;
  friend auto operator<=>(const EdgeKey&, const EdgeKey&) = default;
};

EdgeKey KeyOf(const FlowEdge& e);

// Throws ValidationError when the subkind/intent fields do not fit the kind,
// an endpoint is empty, an intent label is other, or weight differs from the
// provenance count.
void ValidateEdge(const FlowEdge& e);

// Sums edges sharing a key: provenance lists are concatenated (and sorted),
// weights recomputed. Output sorted by key, so merge order never matters.
std::vector<FlowEdge> Merge(std::vector<FlowEdge> edges);

struct FlowConfig {
  // Pair every match of utterance i with every match of utterance i+1
  // instead of only last -> first.
  bool cross_product = false;
};

// Matches may span many conversations and come in any order. Within an
// utterance, consecutive matches give next_sub_utterance edges; the last
// match of utterance i and the first of utterance i+1 give a next_utterance
// edge. Self-loops are skipped. Merged output.
std::vector<FlowEdge> BuildEventFlows(const std::vector<link::MentionHeadMatch>& matches,
                                      const FlowConfig& cfg = {});

// Same adjacency over entity-level matches, kind concept_flow, no subkind.
std::vector<FlowEdge> BuildConceptFlows(const std::vector<link::MentionHeadMatch>& matches,
                                        const FlowConfig& cfg = {});

// Keeps edges with weight >= min_weight.
std::vector<FlowEdge> FrequencyFilter(const std::vector<FlowEdge>& edges, std::size_t min_weight);

class SentimentClassifier {
 public:
  virtual ~SentimentClassifier() = default;
  // One of joy, angry, sad or other. Must tolerate concurrent calls.
  virtual Emotion Classify(std::string_view text) = 0;
};

// Longest lexicon keyword contained in the text wins (ASCII case-folded);
// ties go to the keyword that sorts first. No keyword -> other.
class LexiconSentimentClassifier final : public SentimentClassifier {
 public:
  explicit LexiconSentimentClassifier(std::map<std::string, Emotion> lexicon);
  Emotion Classify(std::string_view text) override;

 private:
  std::map<std::string, Emotion> lexicon_;
};

// Small bilingual lexicon used when no lexicon file is configured.
std::map<std::string, Emotion> DefaultEmotionLexicon();
// TSV keyword<TAB>emotion; '#' comments. Surprising is not a lexicon label.
std::map<std::string, Emotion> LoadEmotionLexicon(const std::filesystem::path& path);

std::vector<std::string> DefaultSurprisePrototypes();

// The classifier's label, except that other is promoted to surprising when
// the tail's best cosine against the prototype vectors is >= threshold.
Emotion LabelTailEmotion(std::string_view tail, SentimentClassifier& classifier,
                         embed::EmbeddingProvider& provider,
                         const std::vector<embed::Vector>& prototypes, double threshold);

// Normalized tail text -> label, for every tail of an emotion-category
// relation.
using TailEmotionMap = std::map<std::string, Emotion>;

TailEmotionMap LabelTailEmotions(const kb::KnowledgeBase& kb, SentimentClassifier& classifier,
                                 embed::EmbeddingProvider& provider,
                                 const std::vector<std::string>& prototype_texts,
                                 double threshold = 0.7);

std::set<std::string> DefaultStopwords();

// Keyword sets used for exact matching between tails and dialogue context.
// Parsed text contributes its v/n/a tokens. Raw text (tails) is split on
// whitespace and punctuation; a chunk that is a known vocabulary word is
// kept whole, CJK chunks are otherwise segmented by forward maximum match
// against the vocabulary, and ASCII words are kept as is. Everything is
// ASCII-lowercased and stopwords are removed.
class KeywordExtractor {
 public:
  KeywordExtractor() : stopwords_(DefaultStopwords()) {}
  KeywordExtractor(std::set<std::string> stopwords, const std::set<std::string>& vocabulary);

  // Adds every content token of the corpus parses to the vocabulary.
  void AddVocabulary(const corpus::Corpus& corpus);
  void AddWord(std::string_view word);

  std::set<std::string> FromParse(const corpus::ParsedUtterance& utt) const;
  std::set<std::string> FromText(std::string_view text) const;

  const std::set<std::string>& vocabulary() const { return vocabulary_; }

 private:
  std::set<std::string> stopwords_;
  std::set<std::string> vocabulary_;
  std::size_t max_word_cps_ = 1;
};

// Inputs for one conversation.
struct LinkedConversation {
  const corpus::Conversation* conversation = nullptr;
  // Utterance index -> matched head ids, in match order.
  std::map<std::size_t, std::vector<std::string>> heads;
  // Utterance index -> keyword set.
  std::map<std::size_t, std::set<std::string>> keywords;
};

struct EmotionEdgeContext {
  const kb::KnowledgeBase* kb = nullptr;
  const TailEmotionMap* tail_emotions = nullptr;
  const KeywordExtractor* keywords = nullptr;
  kb::TailIdentity tail_identity = kb::TailIdentity::kGraphWide;
};

// For an utterance with emotion e (not other) linked to head h: each
// emotion-category tail of h labeled e is connected to every before-category
// tail of h whose keywords intersect those of some previous utterance.
std::vector<FlowEdge> BuildEmotionCauseEdges(const LinkedConversation& conv,
                                             const EmotionEdgeContext& ctx);

// Same emotion condition; the next utterance must carry an intent other than
// other. Each labeled emotion tail is connected to every after-category tail
// of h whose keywords intersect the next utterance's, carrying that intent.
std::vector<FlowEdge> BuildEmotionIntentEdges(const LinkedConversation& conv,
                                              const EmotionEdgeContext& ctx);

// Groups matches by conversation and computes keywords from parses (or raw
// text when an utterance has no parse).
std::vector<LinkedConversation> LinkConversations(const corpus::Corpus& corpus,
                                                  const std::vector<link::MentionHeadMatch>& matches,
                                                  const KeywordExtractor& keywords);

struct EdgeBuildConfig {
  FlowConfig flow;
  std::size_t min_weight_event = 3;
  std::size_t min_weight_concept = 2;
  std::size_t min_weight_emotion = 1;
  double surprise_threshold = 0.7;
  kb::TailIdentity tail_identity = kb::TailIdentity::kGraphWide;
};

// The whole pipeline: event and concept flows, tail emotion labeling, both
// emotion edge kinds, frequency filtering. Output merged and sorted.
std::vector<FlowEdge> BuildAllEdges(const corpus::Corpus& corpus, const kb::KnowledgeBase& kb,
                                    const std::vector<link::MentionHeadMatch>& event_matches,
                                    const std::vector<link::MentionHeadMatch>& concept_matches,
                                    SentimentClassifier& classifier,
                                    embed::EmbeddingProvider& provider,
                                    const KeywordExtractor& keywords, const EdgeBuildConfig& cfg);

nlohmann::json ToJson(const FlowEdge& e);
// Throws ValidationError on a malformed record.
FlowEdge EdgeFromJson(const nlohmann::json& j);

std::vector<FlowEdge> LoadEdges(const std::filesystem::path& path);
void WriteEdges(const std::filesystem::path& path, const std::vector<FlowEdge>& edges);

}  // namespace convkg::edges

#endif  // CONVKG_EDGES_HPP_
