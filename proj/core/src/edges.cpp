#include "convkg/edges.hpp"

#include <algorithm>
#include <cctype>
#include <iterator>
#include <tuple>

#include "convkg/error.hpp"
#include "convkg/io.hpp"
#include "convkg/text.hpp"

namespace convkg::edges {

using nlohmann::json;

std::string_view ToString(EdgeKind k) {
  switch (k) {
    case EdgeKind::kEventFlow: return "event_flow";
    case EdgeKind::kConceptFlow: return "concept_flow";
    case EdgeKind::kEmotionCause: return "emotion_cause";
    case EdgeKind::kEmotionIntent: return "emotion_intent";
  }
  return "";
}

std::string_view ToString(FlowSubkind s) {
  return s == FlowSubkind::kNextUtterance ? "next_utterance" : "next_sub_utterance";
}

std::optional<EdgeKind> ParseEdgeKind(std::string_view s) {
  for (auto k : {EdgeKind::kEventFlow, EdgeKind::kConceptFlow, EdgeKind::kEmotionCause,
                 EdgeKind::kEmotionIntent}) {
    if (ToString(k) == s) return k;
  }
  return std::nullopt;
}

std::optional<FlowSubkind> ParseFlowSubkind(std::string_view s) {
  if (s == "next_utterance") return FlowSubkind::kNextUtterance;
  if (s == "next_sub_utterance") return FlowSubkind::kNextSubUtterance;
  return std::nullopt;
}

EdgeKey KeyOf(const FlowEdge& e) { return EdgeKey{e.kind, e.subkind, e.from, e.to, e.intent_label}; }

void ValidateEdge(const FlowEdge& e) {
  if (e.from.empty() || e.to.empty()) throw ValidationError("from/to", "edge endpoints must be non-empty");
  if (e.kind == EdgeKind::kEventFlow && !e.subkind) {
    throw ValidationError("subkind", "event_flow edges need a subkind");
  }
  if (e.kind != EdgeKind::kEventFlow && e.subkind) {
    throw ValidationError("subkind", "only event_flow edges carry a subkind");
  }
  if (e.kind == EdgeKind::kEmotionIntent) {
    if (!e.intent_label) throw ValidationError("intent_label", "emotion_intent edges need an intent label");
    if (!IsEdgeIntent(*e.intent_label)) {
      throw ValidationError("intent_label", "intent 'other' is not an edge label");
    }
  } else if (e.intent_label) {
    throw ValidationError("intent_label", "only emotion_intent edges carry an intent label");
  }
  if (e.provenance.empty()) throw ValidationError("provenance", "at least one provenance entry is required");
  if (e.weight != e.provenance.size()) {
    throw ValidationError("weight", "weight " + std::to_string(e.weight) + " differs from provenance count " +
                                        std::to_string(e.provenance.size()));
  }
}

std::vector<FlowEdge> Merge(std::vector<FlowEdge> edges) {
  std::map<EdgeKey, FlowEdge> merged;
  for (auto& e : edges) {
    auto [it, inserted] = merged.try_emplace(KeyOf(e));
    if (inserted) {
      it->second = std::move(e);
    } else {
      for (auto& p : e.provenance) it->second.provenance.push_back(std::move(p));
    }
  }
  std::vector<FlowEdge> out;
  out.reserve(merged.size());
  for (auto& [key, e] : merged) {
    std::sort(e.provenance.begin(), e.provenance.end());
    e.weight = e.provenance.size();
    out.push_back(std::move(e));
  }
  return out;
}

namespace {

using Match = link::MentionHeadMatch;

// Conversation id -> matches sorted by (utterance, sub-utterance), original
// order kept within a sub-utterance.
std::map<std::string, std::vector<const Match*>> ByConversation(const std::vector<Match>& matches) {
  std::map<std::string, std::vector<const Match*>> out;
  for (const auto& m : matches) out[m.mention.source.conversation_id].push_back(&m);
  for (auto& [id, list] : out) {
    std::stable_sort(list.begin(), list.end(), [](const Match* a, const Match* b) {
      const auto& sa = a->mention.source;
      const auto& sb = b->mention.source;
      return std::tie(sa.utterance_index, sa.sub_index) < std::tie(sb.utterance_index, sb.sub_index);
    });
  }
  return out;
}

std::vector<FlowEdge> BuildFlows(const std::vector<Match>& matches, const FlowConfig& cfg,
                                 EdgeKind kind) {
  const bool typed = kind == EdgeKind::kEventFlow;
  std::vector<FlowEdge> raw;
  auto add = [&](const Match& a, const Match& b, FlowSubkind sub, std::vector<std::size_t> utts) {
    if (a.head_id == b.head_id) return;
    FlowEdge e;
    e.kind = kind;
    if (typed) e.subkind = sub;
    e.from = a.head_id;
    e.to = b.head_id;
    e.provenance.push_back(Provenance{a.mention.source.conversation_id, std::move(utts)});
    e.weight = 1;
    raw.push_back(std::move(e));
  };
  for (const auto& [conv, list] : ByConversation(matches)) {
    std::map<std::size_t, std::vector<const Match*>> by_utt;
    for (const Match* m : list) by_utt[m->mention.source.utterance_index].push_back(m);
    for (const auto& [u, ms] : by_utt) {
      for (std::size_t k = 0; k + 1 < ms.size(); ++k) {
        add(*ms[k], *ms[k + 1], FlowSubkind::kNextSubUtterance, {u});
      }
      auto next = by_utt.find(u + 1);
      if (next == by_utt.end()) continue;
      if (cfg.cross_product) {
        for (const Match* a : ms) {
          for (const Match* b : next->second) add(*a, *b, FlowSubkind::kNextUtterance, {u, u + 1});
        }
      } else {
        add(*ms.back(), *next->second.front(), FlowSubkind::kNextUtterance, {u, u + 1});
      }
    }
  }
  return Merge(std::move(raw));
}

}  // namespace

std::vector<FlowEdge> BuildEventFlows(const std::vector<Match>& matches, const FlowConfig& cfg) {
  return BuildFlows(matches, cfg, EdgeKind::kEventFlow);
}

std::vector<FlowEdge> BuildConceptFlows(const std::vector<Match>& matches, const FlowConfig& cfg) {
  return BuildFlows(matches, cfg, EdgeKind::kConceptFlow);
}

std::vector<FlowEdge> FrequencyFilter(const std::vector<FlowEdge>& edges, std::size_t min_weight) {
  std::vector<FlowEdge> out;
  std::copy_if(edges.begin(), edges.end(), std::back_inserter(out),
               [&](const FlowEdge& e) { return e.weight >= min_weight; });
  return out;
}

LexiconSentimentClassifier::LexiconSentimentClassifier(std::map<std::string, Emotion> lexicon) {
  for (auto& [k, v] : lexicon) {
    if (v == Emotion::kSurprising) {
      throw ValidationError("lexicon", "'" + k + "': surprising is assigned by prototype similarity");
    }
    const std::string key = text::AsciiLower(text::Trim(k));
    if (!key.empty()) lexicon_[key] = v;
  }
}

Emotion LexiconSentimentClassifier::Classify(std::string_view input) {
  const std::string lowered = text::AsciiLower(input);
  const std::string* best = nullptr;
  Emotion label = Emotion::kOther;
  for (const auto& [k, v] : lexicon_) {
    if (lowered.find(k) == std::string::npos) continue;
    if (best == nullptr || k.size() > best->size()) {
      best = &k;
      label = v;
    }
  }
  return label;
}

std::map<std::string, Emotion> DefaultEmotionLexicon() {
  return {
      {"happy", Emotion::kJoy},        {"glad", Emotion::kJoy},
      {"pleased", Emotion::kJoy},      {"excited", Emotion::kJoy},
      {"relieved", Emotion::kJoy},     {"开心", Emotion::kJoy},
      {"高兴", Emotion::kJoy},         {"快乐", Emotion::kJoy},
      {"满足", Emotion::kJoy},         {"angry", Emotion::kAngry},
      {"annoyed", Emotion::kAngry},    {"furious", Emotion::kAngry},
      {"irritated", Emotion::kAngry},
      {"生气", Emotion::kAngry},       {"愤怒", Emotion::kAngry},
      {"烦躁", Emotion::kAngry},       {"恼火", Emotion::kAngry},
      {"sad", Emotion::kSad},          {"upset", Emotion::kSad},
      {"uncomfortable", Emotion::kSad}, {"tired", Emotion::kSad},
      {"lonely", Emotion::kSad},       {"worried", Emotion::kSad},
      {"难过", Emotion::kSad},         {"伤心", Emotion::kSad},
      {"难受", Emotion::kSad},         {"不舒服", Emotion::kSad},
      {"失望", Emotion::kSad},         {"焦虑", Emotion::kSad},
  };
}

std::map<std::string, Emotion> LoadEmotionLexicon(const std::filesystem::path& path) {
  std::map<std::string, Emotion> out;
  const auto lines = io::ReadLines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (text::Trim(lines[i]).empty() || lines[i][0] == '#') continue;
    const auto cols = text::Split(lines[i], '\t');
    if (cols.size() != 2) throw ParseError(path.string(), i + 1, "", "expected keyword<TAB>emotion");
    auto e = ParseEmotion(text::Trim(cols[1]));
    if (!e || *e == Emotion::kSurprising) {
      throw ParseError(path.string(), i + 1, "emotion", "expected joy, angry, sad or other");
    }
    out[text::Trim(cols[0])] = *e;
  }
  return out;
}

std::vector<std::string> DefaultSurprisePrototypes() {
  return {"surprised", "amazed", "astonished", "shocked", "惊讶", "吃惊", "意外", "震惊"};
}

Emotion LabelTailEmotion(std::string_view tail, SentimentClassifier& classifier,
                         embed::EmbeddingProvider& provider,
                         const std::vector<embed::Vector>& prototypes, double threshold) {
  const Emotion e = classifier.Classify(tail);
  if (e != Emotion::kOther || prototypes.empty()) return e;
  const auto v = provider.EmbedOne(std::string(tail));
  for (const auto& p : prototypes) {
    if (embed::Cosine(v, p) >= threshold) return Emotion::kSurprising;
  }
  return Emotion::kOther;
}

TailEmotionMap LabelTailEmotions(const kb::KnowledgeBase& kb, SentimentClassifier& classifier,
                                 embed::EmbeddingProvider& provider,
                                 const std::vector<std::string>& prototype_texts,
                                 double threshold) {
  std::vector<embed::Vector> prototypes;
  if (!prototype_texts.empty()) prototypes = provider.Embed(prototype_texts);
  TailEmotionMap out;
  for (const auto& t : kb.triples()) {
    if (kb::CategorizeTail(t.relation) != kb::TailCategory::kEmotion) continue;
    const std::string key = text::NormalizeWhitespace(t.tail);
    if (out.count(key) > 0) continue;
    out[key] = LabelTailEmotion(key, classifier, provider, prototypes, threshold);
  }
  return out;
}

std::set<std::string> DefaultStopwords() {
  return {"be", "is",   "am",   "are", "was",  "were", "been", "have", "has", "had",
          "do", "does", "did",  "get", "got",  "feel", "make", "thing", "something",
          "是", "有",   "要",   "会",  "说",   "觉得", "什么", "东西", "这样", "那样"};
}

KeywordExtractor::KeywordExtractor(std::set<std::string> stopwords,
                                   const std::set<std::string>& vocabulary)
    : stopwords_(std::move(stopwords)) {
  for (const auto& w : vocabulary) AddWord(w);
}

void KeywordExtractor::AddWord(std::string_view word) {
  std::string w = text::AsciiLower(text::Trim(word));
  if (w.empty() || stopwords_.count(w) > 0) return;
  max_word_cps_ = std::max(max_word_cps_, text::CodePointCount(w));
  vocabulary_.insert(std::move(w));
}

void KeywordExtractor::AddVocabulary(const corpus::Corpus& corpus) {
  for (const auto& [key, pu] : corpus.parses) {
    for (const auto& su : pu.sub_utterances) {
      for (const auto& t : su.tokens) {
        if (t.pos == "v" || t.pos == "n" || t.pos == "a") AddWord(t.form);
      }
    }
  }
}

std::set<std::string> KeywordExtractor::FromParse(const corpus::ParsedUtterance& utt) const {
  std::set<std::string> out;
  for (const auto& su : utt.sub_utterances) {
    for (const auto& t : su.tokens) {
      if (t.pos != "v" && t.pos != "n" && t.pos != "a") continue;
      std::string w = text::AsciiLower(t.form);
      if (!w.empty() && stopwords_.count(w) == 0) out.insert(std::move(w));
    }
  }
  return out;
}

namespace {

bool IsSeparator(const std::string& cp) {
  static const std::set<std::string> kCjkPunct = {"，", "。", "！", "？", "；", "：", "、",
                                                  "…", "（", "）", "“", "”", "‘", "’",
                                                  "《", "》", "～", "　"};
  if (cp.size() == 1) {
    const unsigned char c = static_cast<unsigned char>(cp[0]);
    return std::isspace(c) != 0 || (std::ispunct(c) != 0 && c != '\'' && c != '-');
  }
  return kCjkPunct.count(cp) > 0;
}

}  // namespace

std::set<std::string> KeywordExtractor::FromText(std::string_view input) const {
  std::set<std::string> out;
  std::vector<std::vector<std::string>> chunks(1);
  for (auto& cp : text::CodePoints(text::AsciiLower(input))) {
    if (IsSeparator(cp)) {
      if (!chunks.back().empty()) chunks.emplace_back();
    } else {
      chunks.back().push_back(std::move(cp));
    }
  }
  for (const auto& cps : chunks) {
    if (cps.empty()) continue;
    std::string whole;
    bool ascii = true;
    for (const auto& cp : cps) {
      whole += cp;
      ascii = ascii && cp.size() == 1;
    }
    if (vocabulary_.count(whole) > 0 || ascii) {
      if (stopwords_.count(whole) == 0) out.insert(whole);
      continue;
    }
    std::size_t i = 0;
    while (i < cps.size()) {
      std::size_t taken = 0;
      for (std::size_t len = std::min(max_word_cps_, cps.size() - i); len >= 1; --len) {
        std::string w;
        for (std::size_t k = i; k < i + len; ++k) w += cps[k];
        if (vocabulary_.count(w) > 0) {
          out.insert(std::move(w));
          taken = len;
          break;
        }
      }
      i += taken == 0 ? 1 : taken;
    }
  }
  return out;
}

namespace {

bool Intersects(const std::set<std::string>& a, const std::set<std::string>& b) {
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia == *ib) return true;
    if (*ia < *ib) {
      ++ia;
    } else {
      ++ib;
    }
  }
  return false;
}

struct HeadTails {
  std::vector<const kb::Triple*> emotion;  // labeled with the utterance emotion
  std::vector<const kb::Triple*> before;
  std::vector<const kb::Triple*> after;
};

HeadTails TailsFor(const std::string& head_id, Emotion e, const EmotionEdgeContext& ctx) {
  HeadTails out;
  for (std::size_t idx : ctx.kb->TriplesOf(head_id)) {
    const kb::Triple& t = ctx.kb->triples()[idx];
    switch (kb::CategorizeTail(t.relation)) {
      case kb::TailCategory::kEmotion: {
        auto it = ctx.tail_emotions->find(text::NormalizeWhitespace(t.tail));
        if (it != ctx.tail_emotions->end() && it->second == e) out.emotion.push_back(&t);
        break;
      }
      case kb::TailCategory::kBefore:
        out.before.push_back(&t);
        break;
      case kb::TailCategory::kAfter:
        out.after.push_back(&t);
        break;
      case kb::TailCategory::kNone:
        break;
    }
  }
  return out;
}

std::vector<std::string> UniqueHeads(const std::vector<std::string>& heads) {
  std::vector<std::string> out;
  for (const auto& h : heads) {
    if (std::find(out.begin(), out.end(), h) == out.end()) out.push_back(h);
  }
  return out;
}

const std::set<std::string>& KeywordsAt(const LinkedConversation& conv, std::size_t u) {
  static const std::set<std::string> kEmpty;
  auto it = conv.keywords.find(u);
  return it == conv.keywords.end() ? kEmpty : it->second;
}

}  // namespace

std::vector<FlowEdge> BuildEmotionCauseEdges(const LinkedConversation& conv,
                                             const EmotionEdgeContext& ctx) {
  std::vector<FlowEdge> raw;
  const auto& utts = conv.conversation->utterances;
  for (std::size_t i = 0; i < utts.size(); ++i) {
    const Emotion e = utts[i].emotion;
    auto linked = conv.heads.find(utts[i].index);
    if (e == Emotion::kOther || linked == conv.heads.end()) continue;
    for (const auto& head : UniqueHeads(linked->second)) {
      const HeadTails tails = TailsFor(head, e, ctx);
      if (tails.emotion.empty()) continue;
      for (const kb::Triple* tb : tails.before) {
        const auto kws = ctx.keywords->FromText(tb->tail);
        std::vector<std::size_t> hits;
        for (std::size_t j = 0; j < i; ++j) {
          if (Intersects(kws, KeywordsAt(conv, utts[j].index))) hits.push_back(utts[j].index);
        }
        if (hits.empty()) continue;
        hits.push_back(utts[i].index);
        for (const kb::Triple* te : tails.emotion) {
          FlowEdge edge;
          edge.kind = EdgeKind::kEmotionCause;
          edge.from = kb::TailNodeId(*te, ctx.tail_identity);
          edge.to = kb::TailNodeId(*tb, ctx.tail_identity);
          if (edge.from == edge.to) continue;
          edge.provenance.push_back(Provenance{conv.conversation->id, hits});
          edge.weight = 1;
          raw.push_back(std::move(edge));
        }
      }
    }
  }
  return Merge(std::move(raw));
}

std::vector<FlowEdge> BuildEmotionIntentEdges(const LinkedConversation& conv,
                                              const EmotionEdgeContext& ctx) {
  std::vector<FlowEdge> raw;
  const auto& utts = conv.conversation->utterances;
  for (std::size_t i = 0; i + 1 < utts.size(); ++i) {
    const Emotion e = utts[i].emotion;
    const Intent next_intent = utts[i + 1].intent;
    auto linked = conv.heads.find(utts[i].index);
    if (e == Emotion::kOther || !IsEdgeIntent(next_intent) || linked == conv.heads.end()) continue;
    const auto& next_kws = KeywordsAt(conv, utts[i + 1].index);
    for (const auto& head : UniqueHeads(linked->second)) {
      const HeadTails tails = TailsFor(head, e, ctx);
      if (tails.emotion.empty()) continue;
      for (const kb::Triple* ta : tails.after) {
        if (!Intersects(ctx.keywords->FromText(ta->tail), next_kws)) continue;
        for (const kb::Triple* te : tails.emotion) {
          FlowEdge edge;
          edge.kind = EdgeKind::kEmotionIntent;
          edge.intent_label = next_intent;
          edge.from = kb::TailNodeId(*te, ctx.tail_identity);
          edge.to = kb::TailNodeId(*ta, ctx.tail_identity);
          if (edge.from == edge.to) continue;
          edge.provenance.push_back(
              Provenance{conv.conversation->id, {utts[i].index, utts[i + 1].index}});
          edge.weight = 1;
          raw.push_back(std::move(edge));
        }
      }
    }
  }
  return Merge(std::move(raw));
}

std::vector<LinkedConversation> LinkConversations(const corpus::Corpus& corpus,
                                                  const std::vector<link::MentionHeadMatch>& matches,
                                                  const KeywordExtractor& keywords) {
  const auto grouped = ByConversation(matches);
  std::vector<LinkedConversation> out;
  out.reserve(corpus.conversations.size());
  for (const auto& conv : corpus.conversations) {
    LinkedConversation lc;
    lc.conversation = &conv;
    if (auto it = grouped.find(conv.id); it != grouped.end()) {
      for (const Match* m : it->second) lc.heads[m->mention.source.utterance_index].push_back(m->head_id);
    }
    for (const auto& u : conv.utterances) {
      const corpus::ParsedUtterance* pu = corpus.FindParse(conv.id, u.index);
      lc.keywords[u.index] = pu != nullptr ? keywords.FromParse(*pu) : keywords.FromText(u.text);
    }
    out.push_back(std::move(lc));
  }
  return out;
}

std::vector<FlowEdge> BuildAllEdges(const corpus::Corpus& corpus, const kb::KnowledgeBase& kb,
                                    const std::vector<link::MentionHeadMatch>& event_matches,
                                    const std::vector<link::MentionHeadMatch>& concept_matches,
                                    SentimentClassifier& classifier,
                                    embed::EmbeddingProvider& provider,
                                    const KeywordExtractor& keywords, const EdgeBuildConfig& cfg) {
  std::vector<FlowEdge> all =
      FrequencyFilter(BuildEventFlows(event_matches, cfg.flow), cfg.min_weight_event);
  for (auto& e : FrequencyFilter(BuildConceptFlows(concept_matches, cfg.flow), cfg.min_weight_concept)) {
    all.push_back(std::move(e));
  }
  const TailEmotionMap tail_emotions = LabelTailEmotions(
      kb, classifier, provider, DefaultSurprisePrototypes(), cfg.surprise_threshold);
  const EmotionEdgeContext ctx{&kb, &tail_emotions, &keywords, cfg.tail_identity};
  std::vector<FlowEdge> emotion;
  for (const auto& lc : LinkConversations(corpus, event_matches, keywords)) {
    for (auto& e : BuildEmotionCauseEdges(lc, ctx)) emotion.push_back(std::move(e));
    for (auto& e : BuildEmotionIntentEdges(lc, ctx)) emotion.push_back(std::move(e));
  }
  for (auto& e : FrequencyFilter(Merge(std::move(emotion)), cfg.min_weight_emotion)) {
    all.push_back(std::move(e));
  }
  return Merge(std::move(all));
}

json ToJson(const FlowEdge& e) {
  json prov = json::array();
  for (const auto& p : e.provenance) {
    prov.push_back({{"conversation", p.conversation_id}, {"utterances", p.utterances}, {"source", p.source}});
  }
  return json{{"kind", ToString(e.kind)},
              {"subkind", e.subkind ? json(ToString(*e.subkind)) : json(nullptr)},
              {"from", e.from},
              {"to", e.to},
              {"weight", e.weight},
              {"intent_label", e.intent_label ? json(ToString(*e.intent_label)) : json(nullptr)},
              {"provenance", std::move(prov)}};
}

FlowEdge EdgeFromJson(const json& j) {
  FlowEdge e;
  try {
    auto kind = ParseEdgeKind(j.at("kind").get<std::string>());
    if (!kind) throw ValidationError("kind", "unknown edge kind");
    e.kind = *kind;
    if (auto it = j.find("subkind"); it != j.end() && !it->is_null()) {
      auto sub = ParseFlowSubkind(it->get<std::string>());
      if (!sub) throw ValidationError("subkind", "unknown subkind '" + it->get<std::string>() + "'");
      e.subkind = *sub;
    }
    e.from = j.at("from").get<std::string>();
    e.to = j.at("to").get<std::string>();
    if (auto it = j.find("intent_label"); it != j.end() && !it->is_null()) {
      auto intent = ParseIntent(it->get<std::string>());
      if (!intent) throw ValidationError("intent_label", "unknown intent '" + it->get<std::string>() + "'");
      e.intent_label = *intent;
    }
    for (const auto& p : j.at("provenance")) {
      Provenance prov;
      prov.conversation_id = p.at("conversation").get<std::string>();
      prov.utterances = p.at("utterances").get<std::vector<std::size_t>>();
      prov.source = p.value("source", std::string(kPipelineSource));
      if (prov.source != kPipelineSource && prov.source != kExpertSource) {
        throw ValidationError("provenance.source", "expected pipeline or expert");
      }
      e.provenance.push_back(std::move(prov));
    }
    e.weight = j.contains("weight") ? j.at("weight").get<std::size_t>() : e.provenance.size();
  } catch (const json::exception& ex) {
    throw ValidationError("edge", ex.what());
  }
  ValidateEdge(e);
  return e;
}

std::vector<FlowEdge> LoadEdges(const std::filesystem::path& path) {
  std::vector<FlowEdge> out;
  const auto records = io::ReadJsonLines(path);
  for (std::size_t i = 0; i < records.size(); ++i) {
    try {
      out.push_back(EdgeFromJson(records[i]));
    } catch (const ValidationError& e) {
      throw ParseError(path.string(), i + 1, e.field(), e.what());
    }
  }
  return out;
}

void WriteEdges(const std::filesystem::path& path, const std::vector<FlowEdge>& edges) {
  std::vector<json> records;
  records.reserve(edges.size());
  for (const auto& e : edges) records.push_back(ToJson(e));
  io::WriteJsonLines(path, records);
}

}  // namespace convkg::edges
