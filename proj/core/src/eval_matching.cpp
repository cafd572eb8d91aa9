#include "convkg/eval_matching.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <string>

#include "convkg/error.hpp"
#include "convkg/io.hpp"

namespace convkg::eval {

namespace {

struct UtteranceScore {
  std::vector<double> scores;
  std::size_t matched_heads = 0;
};

}  // namespace

MatchingReport MatchingEvaluation(const std::vector<const corpus::ParsedUtterance*>& sample,
                                  extract::Method method, const link::HeadIndex& heads,
                                  embed::EmbeddingProvider& provider,
                                  const extract::ExtractorConfig& cfg, double threshold,
                                  std::size_t threads) {
  if (sample.empty()) throw ValidationError("sample", "at least one utterance is required");
  std::vector<UtteranceScore> per_utt(sample.size());
  io::ParallelFor(sample.size(), threads, [&](std::size_t i) {
    std::set<std::string> matched;
    for (const auto& m : extract::Extract(*sample[i], method, cfg)) {
      auto best = link::BestMatch(m, heads, provider);
      if (!best) continue;
      per_utt[i].scores.push_back(best->score);
      if (best->score >= threshold) matched.insert(best->head_id);
    }
    per_utt[i].matched_heads = matched.size();
  });

  MatchingReport r;
  r.method = method;
  r.threshold = threshold;
  r.utterance_count = sample.size();
  double total = 0.0;
  double utt_total = 0.0;
  std::size_t utts_with_mentions = 0;
  std::size_t heads_total = 0;
  for (const auto& u : per_utt) {
    heads_total += u.matched_heads;
    if (u.scores.empty()) continue;
    double s = 0.0;
    for (double x : u.scores) s += x;
    total += s;
    utt_total += s / static_cast<double>(u.scores.size());
    ++utts_with_mentions;
    r.mention_count += u.scores.size();
  }
  if (r.mention_count > 0) r.avg_similarity = total / static_cast<double>(r.mention_count);
  if (utts_with_mentions > 0) {
    r.avg_similarity_per_utterance = utt_total / static_cast<double>(utts_with_mentions);
  }
  r.avg_number = static_cast<double>(heads_total) / static_cast<double>(sample.size());
  return r;
}

std::vector<const corpus::ParsedUtterance*> SampleUtterances(const corpus::Corpus& corpus,
                                                             std::size_t n, std::uint64_t seed) {
  std::vector<const corpus::ParsedUtterance*> all;
  for (const auto& [key, pu] : corpus.parses) all.push_back(&pu);
  if (n == 0 || n >= all.size()) return all;
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, all.size() - 1);
    std::swap(all[i], all[pick(rng)]);
  }
  all.resize(n);
  return all;
}

nlohmann::json ToJson(const MatchingReport& r) {
  return nlohmann::json{{"method", extract::ToString(r.method)},
                        {"threshold", r.threshold},
                        {"avg_similarity", r.avg_similarity},
                        {"avg_similarity_per_utterance", r.avg_similarity_per_utterance},
                        {"avg_number", r.avg_number},
                        {"utterance_count", r.utterance_count},
                        {"mention_count", r.mention_count},
                        {"seed", r.seed ? nlohmann::json(*r.seed) : nlohmann::json(nullptr)}};
}

}  // namespace convkg::eval
