#include "convkg/link.hpp"

#include <algorithm>
#include <random>

#include "convkg/error.hpp"
#include "convkg/io.hpp"

namespace convkg::link {

using nlohmann::json;

HeadIndex::HeadIndex(const kb::KnowledgeBase& kb, kb::HeadLevel level,
                     embed::EmbeddingProvider& provider) {
  std::vector<std::string> texts;
  for (const kb::Head* h : kb.HeadsAt(level)) {
    entries_.push_back(Entry{h->id, h->text, {}});
  }
  std::sort(entries_.begin(), entries_.end(),
            [](const Entry& a, const Entry& b) { return a.id < b.id; });
  for (const auto& e : entries_) texts.push_back(e.text);
  if (texts.empty()) return;
  auto vectors = provider.Embed(texts);
  if (vectors.size() != entries_.size()) {
    throw RetriableError("provider returned " + std::to_string(vectors.size()) + " vectors for " +
                         std::to_string(texts.size()) + " heads");
  }
  for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i].vector = std::move(vectors[i]);
}

HeadIndex::HeadIndex(std::vector<Entry> entries) : entries_(std::move(entries)) {
  std::sort(entries_.begin(), entries_.end(),
            [](const Entry& a, const Entry& b) { return a.id < b.id; });
}

std::optional<HeadIndex::Best> HeadIndex::BestMatch(const embed::Vector& v) const {
  std::optional<Best> best;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const double s = embed::Cosine(v, entries_[i].vector);
    if (!best || s > best->score) best = Best{i, s};
  }
  return best;
}

namespace {

std::optional<MentionHeadMatch> Resolve(const extract::EventMention& m, const HeadIndex& heads,
                                        const embed::Vector& v) {
  auto best = heads.BestMatch(v);
  if (!best) return std::nullopt;
  const auto& e = heads.entries()[best->entry];
  return MentionHeadMatch{m, e.id, e.text, best->score};
}

}  // namespace

std::optional<MentionHeadMatch> BestMatch(const extract::EventMention& m, const HeadIndex& heads,
                                          embed::EmbeddingProvider& provider) {
  if (heads.empty()) return std::nullopt;
  return Resolve(m, heads, provider.EmbedOne(m.text));
}

std::optional<MentionHeadMatch> LinkMention(const extract::EventMention& m, const HeadIndex& heads,
                                            embed::EmbeddingProvider& provider, double threshold) {
  auto match = BestMatch(m, heads, provider);
  if (match && match->score >= threshold) return match;
  return std::nullopt;
}

std::vector<MentionHeadMatch> LinkMentions(const std::vector<extract::EventMention>& mentions,
                                           const HeadIndex& heads,
                                           embed::EmbeddingProvider& provider, double threshold,
                                           std::size_t threads) {
  if (heads.empty() || mentions.empty()) return {};
  constexpr std::size_t kChunk = 256;
  const std::size_t chunks = (mentions.size() + kChunk - 1) / kChunk;
  std::vector<std::vector<std::optional<MentionHeadMatch>>> slots(chunks);
  io::ParallelFor(chunks, threads, [&](std::size_t c) {
    const std::size_t begin = c * kChunk;
    const std::size_t end = std::min(mentions.size(), begin + kChunk);
    std::vector<std::string> texts;
    for (std::size_t i = begin; i < end; ++i) texts.push_back(mentions[i].text);
    const auto vectors = provider.Embed(texts);
    if (vectors.size() != texts.size()) throw RetriableError("provider returned a short batch");
    for (std::size_t i = begin; i < end; ++i) {
      auto m = Resolve(mentions[i], heads, vectors[i - begin]);
      if (m && m->score >= threshold) {
        slots[c].push_back(std::move(m));
      }
    }
  });
  std::vector<MentionHeadMatch> out;
  for (auto& chunk : slots) {
    for (auto& m : chunk) out.push_back(std::move(*m));
  }
  return out;
}

std::vector<MentionHeadMatch> LinkConcepts(const corpus::ParsedUtterance& utt,
                                           const HeadIndex& entity_heads,
                                           embed::EmbeddingProvider& provider, double threshold) {
  std::vector<extract::EventMention> words;
  for (const auto& su : utt.sub_utterances) {
    for (const auto& t : su.tokens) {
      if (t.pos != "v" && t.pos != "n" && t.pos != "a") continue;
      extract::EventMention m;
      m.text = t.form;
      m.source = extract::Source{utt.conversation_id, utt.utterance_index, su.index};
      m.method = extract::Method::kConcept;
      m.tokens = {t.index};
      words.push_back(std::move(m));
    }
  }
  return LinkMentions(words, entity_heads, provider, threshold);
}

std::vector<FinetunePair> ExportFinetunePairs(const std::vector<MentionHeadMatch>& matches,
                                              std::size_t k, std::uint64_t seed) {
  if (k > matches.size()) {
    throw ValidationError("k", "cannot sample " + std::to_string(k) + " pairs from " +
                                   std::to_string(matches.size()) + " matches");
  }
  std::vector<std::size_t> order(matches.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::mt19937_64 rng(seed);
  // Partial Fisher-Yates: the first k slots are a uniform sample.
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, order.size() - 1);
    std::swap(order[i], order[pick(rng)]);
  }
  std::vector<FinetunePair> out;
  for (std::size_t i = 0; i < k; ++i) {
    const auto& m = matches[order[i]];
    out.push_back(FinetunePair{m.mention.text, m.head_text, std::nullopt});
  }
  return out;
}

json ToJson(const MentionHeadMatch& m) {
  return json{{"mention", extract::ToJson(m.mention)},
              {"head", {{"id", m.head_id}, {"text", m.head_text}}},
              {"score", m.score}};
}

MentionHeadMatch MatchFromJson(const json& j) {
  MentionHeadMatch m;
  try {
    m.mention = extract::MentionFromJson(j.at("mention"));
    m.head_id = j.at("head").at("id").get<std::string>();
    m.head_text = j.at("head").at("text").get<std::string>();
    m.score = j.at("score").get<double>();
  } catch (const json::exception& e) {
    throw ValidationError("match", e.what());
  }
  return m;
}

json ToJson(const FinetunePair& p) {
  return json{{"mention", p.mention},
              {"head", p.head},
              {"label", p.label ? json(*p.label) : json(nullptr)}};
}

}  // namespace convkg::link
