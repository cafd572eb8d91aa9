#ifndef CONVKG_EXTRACT_HPP_
#define CONVKG_EXTRACT_HPP_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "convkg/corpus.hpp"

// Event mention extraction from dependency-parsed utterances, plus the POS
// template and punctuation-split baselines.
namespace convkg::extract {

enum class Driver { kVerb, kAdjective };
enum class Method { kParsing, kPosTemplate, kSimple, kConcept };

std::string_view ToString(Driver d);
std::string_view ToString(Method m);
std::optional<Method> ParseMethod(std::string_view s);

struct Source {
  std::string conversation_id;
  std::size_t utterance_index = 0;
  std::size_t sub_index = 0;
  friend auto operator<=>(const Source&, const Source&) = default;
};

struct EventMention {
  std::string text;
  Source source;
  std::optional<Driver> driver;  // unset for the simple baseline
  Method method = Method::kParsing;
  // 1-based token indices in the source sub-utterance, surface order.
  std::vector<int> tokens;
};

struct ExtractorConfig {
  std::size_t min_sub_utterance_chars = 4;
  std::set<std::string> stop_phrases = {"好的", "就是这样"};
  std::size_t decompose_verb_count_threshold = 2;
  std::size_t decompose_depth_threshold = 2;
  std::set<std::string> punctuation = {"，", "。", "！", "？", "；", "、", "…", ",",
                                       ".", "!", "?", ";", "：", ":", "～", "~"};
  // Aspect and degree adverbs dropped from verb-driven mentions even when
  // they attach to the seed with ADV.
  std::set<std::string> discard_adverbs = {"已经", "在", "正在", "也", "太", "都",
                                           "还", "又", "很", "真", "挺", "非常"};

  // Throws ValidationError when a threshold is zero.
  void Validate() const;
};

// Reads a JSON object with any of the ExtractorConfig fields; missing keys
// keep their defaults. A "stop_phrases_file" key names a one-per-line list
// resolved relative to the config file.
ExtractorConfig LoadExtractorConfig(const std::filesystem::path& path);

// Splits raw text after each punctuation mark; pieces keep their trailing
// punctuation so concatenation reproduces the input.
std::vector<std::string> SplitText(std::string_view text, const ExtractorConfig& cfg);

// Sub-utterance text with surrounding whitespace and punctuation removed.
std::string CoreText(std::string_view text, const ExtractorConfig& cfg);

// Drops sub-utterances whose core text is shorter than
// min_sub_utterance_chars code points or equals a stop phrase.
std::vector<corpus::SubUtterance> SplitAndFilter(const corpus::ParsedUtterance& utt,
                                                 const ExtractorConfig& cfg);

// Seeds at the HED token when its POS is v or a. A verb seed with at least
// decompose_verb_count_threshold direct verb dependents is replaced by the
// clause-heading verbs found below it.
std::vector<EventMention> ExtractEvents(const corpus::ParsedUtterance& utt,
                                        const ExtractorConfig& cfg);

// ADV dependents of the seed (minus conjunctions and discard_adverbs), the
// seed, and every following token, minus trailing particles/punctuation.
EventMention ExtractVerbDriven(const corpus::SubUtterance& su, int seed,
                               const ExtractorConfig& cfg);

// The SBV dependents of the seed (with their modifiers) followed by the seed.
EventMention ExtractAdjectiveDriven(const corpus::SubUtterance& su, int seed);

// Splits a multi-clause verb mention into one mention per clause-heading verb
// when both the verb count and the deepest clause depth reach their
// thresholds. Otherwise returns the mention unchanged.
std::vector<EventMention> SecondaryDecompose(const EventMention& mention,
                                             const corpus::SubUtterance& su,
                                             const ExtractorConfig& cfg);

// ExtractEvents followed by SecondaryDecompose on every mention.
std::vector<EventMention> ExtractParsing(const corpus::ParsedUtterance& utt,
                                         const ExtractorConfig& cfg);

// Baseline: every leftmost-longest window matching a POS template.
std::vector<EventMention> PosTemplateExtract(const corpus::SubUtterance& su);

// Baseline: each surviving sub-utterance's core text is one mention.
std::vector<EventMention> SimpleExtract(const corpus::ParsedUtterance& utt,
                                        const ExtractorConfig& cfg);

// Dispatches on method (concept is not an extraction method).
std::vector<EventMention> Extract(const corpus::ParsedUtterance& utt, Method method,
                                  const ExtractorConfig& cfg);

// Runs `method` over every parsed utterance of the corpus; conversations are
// processed in parallel and merged in source order.
std::vector<EventMention> ExtractCorpus(const corpus::Corpus& corpus, Method method,
                                        const ExtractorConfig& cfg, std::size_t threads = 1);

nlohmann::json ToJson(const EventMention& m);
EventMention MentionFromJson(const nlohmann::json& j);

}  // namespace convkg::extract

#endif  // CONVKG_EXTRACT_HPP_
