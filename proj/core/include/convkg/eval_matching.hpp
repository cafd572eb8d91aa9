#ifndef CONVKG_EVAL_MATCHING_HPP_
#define CONVKG_EVAL_MATCHING_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "convkg/corpus.hpp"
#include "convkg/embedding.hpp"
#include "convkg/extract.hpp"
#include "convkg/link.hpp"

// Compares extraction methods by how well their mentions match KB heads.
namespace convkg::eval {

struct MatchingReport {
  extract::Method method = extract::Method::kParsing;
  double threshold = link::kDefaultThreshold;
  // Mean best-match score over all mentions; 0 without mentions.
  double avg_similarity = 0.0;
  // Mean over utterances with mentions of their per-mention mean.
  double avg_similarity_per_utterance = 0.0;
  // Mean over utterances of distinct heads whose best-match score clears
  // the threshold.
  double avg_number = 0.0;
  std::size_t utterance_count = 0;
  std::size_t mention_count = 0;
  std::optional<std::uint64_t> seed;
};

// Throws ValidationError on an empty sample.
MatchingReport MatchingEvaluation(const std::vector<const corpus::ParsedUtterance*>& sample,
                                  extract::Method method, const link::HeadIndex& heads,
                                  embed::EmbeddingProvider& provider,
                                  const extract::ExtractorConfig& cfg,
                                  double threshold = link::kDefaultThreshold,
                                  std::size_t threads = 1);

// `n` parsed utterances drawn uniformly without replacement with a seeded
// generator; n = 0 or n >= available takes every parse in corpus order.
std::vector<const corpus::ParsedUtterance*> SampleUtterances(const corpus::Corpus& corpus,
                                                             std::size_t n, std::uint64_t seed);

nlohmann::json ToJson(const MatchingReport& r);

}  // namespace convkg::eval

#endif  // CONVKG_EVAL_MATCHING_HPP_
