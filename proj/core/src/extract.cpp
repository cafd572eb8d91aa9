#include "convkg/extract.hpp"

#include <algorithm>
#include <array>
#include <set>

#include "convkg/error.hpp"
#include "convkg/io.hpp"
#include "convkg/text.hpp"

namespace convkg::extract {

using corpus::ParsedUtterance;
using corpus::SubUtterance;
using corpus::Token;
using nlohmann::json;

std::string_view ToString(Driver d) { return d == Driver::kVerb ? "verb" : "adjective"; }

std::string_view ToString(Method m) {
  switch (m) {
    case Method::kParsing: return "parsing";
    case Method::kPosTemplate: return "pos";
    case Method::kSimple: return "simple";
    case Method::kConcept: return "concept";
  }
  return "parsing";
}

std::optional<Method> ParseMethod(std::string_view s) {
  if (s == "parsing") return Method::kParsing;
  if (s == "pos" || s == "pos_template") return Method::kPosTemplate;
  if (s == "simple") return Method::kSimple;
  if (s == "concept") return Method::kConcept;
  return std::nullopt;
}

void ExtractorConfig::Validate() const {
  if (min_sub_utterance_chars == 0) {
    throw ValidationError("min_sub_utterance_chars", "must be at least 1");
  }
  if (decompose_verb_count_threshold == 0) {
    throw ValidationError("decompose_verb_count_threshold", "must be at least 1");
  }
  if (decompose_depth_threshold == 0) {
    throw ValidationError("decompose_depth_threshold", "must be at least 1");
  }
}

namespace {

std::set<std::string> StringSet(const json& j, const char* field) {
  if (!j.is_array()) throw ValidationError(field, "must be an array of strings");
  std::set<std::string> out;
  for (const auto& v : j) {
    if (!v.is_string()) throw ValidationError(field, "must be an array of strings");
    out.insert(v.get<std::string>());
  }
  return out;
}

std::size_t PositiveInt(const json& j, const char* field) {
  if (!j.is_number_integer() || j.get<long long>() < 1) {
    throw ValidationError(field, "must be a positive integer");
  }
  return j.get<std::size_t>();
}

}  // namespace

ExtractorConfig LoadExtractorConfig(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(io::ReadFile(path));
  } catch (const json::parse_error& e) {
    throw ParseError(path.string(), 0, "", e.what());
  }
  ExtractorConfig cfg;
  if (j.contains("min_sub_utterance_chars")) {
    cfg.min_sub_utterance_chars = PositiveInt(j["min_sub_utterance_chars"], "min_sub_utterance_chars");
  }
  if (j.contains("decompose_verb_count_threshold")) {
    cfg.decompose_verb_count_threshold =
        PositiveInt(j["decompose_verb_count_threshold"], "decompose_verb_count_threshold");
  }
  if (j.contains("decompose_depth_threshold")) {
    cfg.decompose_depth_threshold =
        PositiveInt(j["decompose_depth_threshold"], "decompose_depth_threshold");
  }
  if (j.contains("stop_phrases")) cfg.stop_phrases = StringSet(j["stop_phrases"], "stop_phrases");
  if (j.contains("punctuation")) cfg.punctuation = StringSet(j["punctuation"], "punctuation");
  if (j.contains("discard_adverbs")) {
    cfg.discard_adverbs = StringSet(j["discard_adverbs"], "discard_adverbs");
  }
  if (j.contains("stop_phrases_file")) {
    const auto file = path.parent_path() / j["stop_phrases_file"].get<std::string>();
    for (const auto& line : io::ReadLines(file)) {
      const std::string phrase = text::Trim(line);
      if (!phrase.empty() && phrase[0] != '#') cfg.stop_phrases.insert(phrase);
    }
  }
  cfg.Validate();
  return cfg;
}

std::vector<std::string> SplitText(std::string_view input, const ExtractorConfig& cfg) {
  std::vector<std::string> out;
  std::string current;
  bool in_punct = false;
  for (const auto& cp : text::CodePoints(input)) {
    const bool punct = cfg.punctuation.count(cp) > 0;
    if (!punct && in_punct) {
      out.push_back(std::move(current));
      current.clear();
    }
    current += cp;
    in_punct = punct;
  }
  if (!current.empty()) out.push_back(std::move(current));
  return out;
}

std::string CoreText(std::string_view input, const ExtractorConfig& cfg) {
  auto cps = text::CodePoints(text::Trim(input));
  auto is_noise = [&](const std::string& cp) {
    return cfg.punctuation.count(cp) > 0 || text::Trim(cp).empty();
  };
  std::size_t b = 0;
  std::size_t e = cps.size();
  while (b < e && is_noise(cps[b])) ++b;
  while (e > b && is_noise(cps[e - 1])) --e;
  std::string out;
  for (std::size_t i = b; i < e; ++i) out += cps[i];
  return out;
}

std::vector<SubUtterance> SplitAndFilter(const ParsedUtterance& utt, const ExtractorConfig& cfg) {
  std::vector<SubUtterance> out;
  for (const auto& su : utt.sub_utterances) {
    const std::string core = CoreText(su.text, cfg);
    if (text::CodePointCount(core) < cfg.min_sub_utterance_chars) continue;
    if (cfg.stop_phrases.count(core) > 0) continue;
    out.push_back(su);
  }
  return out;
}

namespace {

bool IsPunct(const Token& t, const ExtractorConfig& cfg) {
  return t.pos == "wp" || cfg.punctuation.count(t.form) > 0;
}

std::string JoinForms(const SubUtterance& su, const std::vector<int>& indices) {
  // Whitespace-tokenized languages keep their separators.
  const bool spaced = su.text.find(' ') != std::string::npos;
  std::string out;
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (spaced && i > 0) out += ' ';
    out += su.At(indices[i]).form;
  }
  return out;
}

// Drops leading conjunctions/punctuation and trailing particles, interjections
// and punctuation.
std::vector<int> Clean(const SubUtterance& su, std::vector<int> indices, const ExtractorConfig& cfg) {
  std::sort(indices.begin(), indices.end());
  indices.erase(std::unique(indices.begin(), indices.end()), indices.end());
  while (!indices.empty()) {
    const Token& t = su.At(indices.front());
    if (t.pos == "c" || IsPunct(t, cfg)) {
      indices.erase(indices.begin());
    } else {
      break;
    }
  }
  while (!indices.empty()) {
    const Token& t = su.At(indices.back());
    if (t.pos == "u" || t.pos == "e" || IsPunct(t, cfg)) {
      indices.pop_back();
    } else {
      break;
    }
  }
  return indices;
}

EventMention MakeMention(const SubUtterance& su, std::vector<int> indices, Driver driver,
                         Method method) {
  EventMention m;
  m.text = JoinForms(su, indices);
  m.tokens = std::move(indices);
  m.driver = driver;
  m.method = method;
  m.source.sub_index = su.index;
  return m;
}

// Verbs below `verb` that head a clause of their own (have dependents),
// found by descending through verb chains only. Surface order.
void CollectClauseVerbs(const SubUtterance& su, int verb, const std::set<int>* allowed,
                        std::vector<int>& out) {
  for (int c : su.Children(verb)) {
    if (allowed != nullptr && allowed->count(c) == 0) continue;
    if (su.At(c).pos != "v" || su.Children(c).empty()) continue;
    out.push_back(c);
    CollectClauseVerbs(su, c, allowed, out);
  }
}

std::vector<int> ClauseVerbs(const SubUtterance& su, int verb, const std::set<int>* allowed) {
  std::vector<int> out;
  CollectClauseVerbs(su, verb, allowed, out);
  std::sort(out.begin(), out.end());
  return out;
}

// Tokens of `verb`'s clause: its subtree minus the clauses of the other
// found verbs nested inside it.
std::vector<int> ClauseSpan(const SubUtterance& su, int verb, const std::vector<int>& found,
                            const std::set<int>* allowed) {
  const auto subtree = su.Subtree(verb);
  std::set<int> keep(subtree.begin(), subtree.end());
  for (int f : found) {
    if (f == verb || keep.count(f) == 0) continue;
    for (int t : su.Subtree(f)) keep.erase(t);
  }
  std::vector<int> out;
  for (int t : keep) {
    if (allowed == nullptr || allowed->count(t) > 0) out.push_back(t);
  }
  return out;
}

std::vector<EventMention> ClauseMentions(const SubUtterance& su, const std::vector<int>& found,
                                         const std::set<int>* allowed, const ExtractorConfig& cfg) {
  std::vector<EventMention> out;
  for (int v : found) {
    auto span = Clean(su, ClauseSpan(su, v, found, allowed), cfg);
    if (span.empty()) continue;
    out.push_back(MakeMention(su, std::move(span), Driver::kVerb, Method::kParsing));
  }
  std::stable_sort(out.begin(), out.end(), [](const EventMention& a, const EventMention& b) {
    return a.tokens.front() < b.tokens.front();
  });
  return out;
}

}  // namespace

EventMention ExtractVerbDriven(const SubUtterance& su, int seed, const ExtractorConfig& cfg) {
  std::vector<int> indices;
  for (int c : su.Children(seed)) {
    const Token& t = su.At(c);
    if (t.deprel != "ADV" || t.pos == "c" || IsPunct(t, cfg)) continue;
    if (cfg.discard_adverbs.count(t.form) > 0) continue;
    indices.push_back(c);
  }
  for (int i = seed; i <= static_cast<int>(su.tokens.size()); ++i) indices.push_back(i);
  auto cleaned = Clean(su, std::move(indices), cfg);
  return MakeMention(su, std::move(cleaned), Driver::kVerb, Method::kParsing);
}

EventMention ExtractAdjectiveDriven(const SubUtterance& su, int seed) {
  std::vector<int> indices;
  for (int c : su.Children(seed)) {
    if (su.At(c).deprel != "SBV") continue;
    for (int t : su.Subtree(c)) indices.push_back(t);
  }
  indices.push_back(seed);
  std::sort(indices.begin(), indices.end());
  indices.erase(std::unique(indices.begin(), indices.end()), indices.end());
  return MakeMention(su, std::move(indices), Driver::kAdjective, Method::kParsing);
}

std::vector<EventMention> ExtractEvents(const ParsedUtterance& utt, const ExtractorConfig& cfg) {
  std::vector<EventMention> out;
  for (const auto& su : SplitAndFilter(utt, cfg)) {
    const int root = su.RootIndex();
    if (root == 0) continue;
    const std::string& pos = su.At(root).pos;
    std::vector<EventMention> found;
    if (pos == "v") {
      std::size_t direct_verbs = 0;
      for (int c : su.Children(root)) direct_verbs += su.At(c).pos == "v" ? 1 : 0;
      if (direct_verbs >= cfg.decompose_verb_count_threshold) {
        found = ClauseMentions(su, ClauseVerbs(su, root, nullptr), nullptr, cfg);
      }
      if (found.empty()) found.push_back(ExtractVerbDriven(su, root, cfg));
    } else if (pos == "a") {
      found.push_back(ExtractAdjectiveDriven(su, root));
    }
    for (auto& m : found) {
      if (m.text.empty()) continue;
      m.source = Source{utt.conversation_id, utt.utterance_index, su.index};
      out.push_back(std::move(m));
    }
  }
  return out;
}

std::vector<EventMention> SecondaryDecompose(const EventMention& mention, const SubUtterance& su,
                                             const ExtractorConfig& cfg) {
  if (mention.driver != Driver::kVerb || mention.tokens.empty()) return {mention};
  const std::set<int> allowed(mention.tokens.begin(), mention.tokens.end());
  // The mention's root: its first verb whose governor lies outside it.
  int root = 0;
  for (int t : mention.tokens) {
    const Token& tok = su.At(t);
    if (tok.pos == "v" && allowed.count(tok.head) == 0) {
      root = t;
      break;
    }
  }
  if (root == 0) return {mention};
  const auto found = ClauseVerbs(su, root, &allowed);
  int depth = 0;
  for (int v : found) depth = std::max(depth, su.Depth(v));
  if (found.size() < cfg.decompose_verb_count_threshold ||
      static_cast<std::size_t>(depth) < cfg.decompose_depth_threshold) {
    return {mention};
  }
  auto parts = ClauseMentions(su, found, &allowed, cfg);
  if (parts.empty()) return {mention};
  for (auto& p : parts) {
    p.source = mention.source;
    p.method = mention.method;
  }
  return parts;
}

std::vector<EventMention> ExtractParsing(const ParsedUtterance& utt, const ExtractorConfig& cfg) {
  std::vector<EventMention> out;
  for (const auto& m : ExtractEvents(utt, cfg)) {
    const SubUtterance* su = nullptr;
    for (const auto& s : utt.sub_utterances) {
      if (s.index == m.source.sub_index) su = &s;
    }
    for (auto& part : SecondaryDecompose(m, *su, cfg)) out.push_back(std::move(part));
  }
  return out;
}

namespace {

struct PosTemplate {
  std::vector<std::string_view> tags;
};

const std::array<PosTemplate, 8>& PosTemplates() {
  static const std::array<PosTemplate, 8> kTemplates = {{
      {{"v", "v"}},
      {{"v", "n"}},
      {{"v", "i"}},
      {{"v", "u", "z"}},
      {{"v", "u", "m"}},
      {{"v", "c", "v"}},
      {{"v", "c", "i"}},
      {{"a", "v"}},
  }};
  return kTemplates;
}

}  // namespace

std::vector<EventMention> PosTemplateExtract(const SubUtterance& su) {
  std::vector<EventMention> out;
  const std::size_t n = su.tokens.size();
  std::size_t i = 0;
  while (i < n) {
    const PosTemplate* best = nullptr;
    for (const auto& tpl : PosTemplates()) {
      if (i + tpl.tags.size() > n) continue;
      bool match = true;
      for (std::size_t k = 0; k < tpl.tags.size() && match; ++k) {
        match = su.tokens[i + k].pos == tpl.tags[k];
      }
      if (match && (best == nullptr || tpl.tags.size() > best->tags.size())) best = &tpl;
    }
    if (best == nullptr) {
      ++i;
      continue;
    }
    std::vector<int> indices;
    for (std::size_t k = 0; k < best->tags.size(); ++k) {
      indices.push_back(static_cast<int>(i + k + 1));
    }
    const Driver driver = best->tags.front() == "a" ? Driver::kAdjective : Driver::kVerb;
    out.push_back(MakeMention(su, std::move(indices), driver, Method::kPosTemplate));
    i += best->tags.size();
  }
  return out;
}

std::vector<EventMention> SimpleExtract(const ParsedUtterance& utt, const ExtractorConfig& cfg) {
  std::vector<EventMention> out;
  for (const auto& su : SplitAndFilter(utt, cfg)) {
    EventMention m;
    m.text = CoreText(su.text, cfg);
    for (const auto& t : su.tokens) {
      if (!IsPunct(t, cfg)) m.tokens.push_back(t.index);
    }
    m.method = Method::kSimple;
    m.source = Source{utt.conversation_id, utt.utterance_index, su.index};
    out.push_back(std::move(m));
  }
  return out;
}

std::vector<EventMention> Extract(const ParsedUtterance& utt, Method method,
                                  const ExtractorConfig& cfg) {
  switch (method) {
    case Method::kParsing:
      return ExtractParsing(utt, cfg);
    case Method::kSimple:
      return SimpleExtract(utt, cfg);
    case Method::kPosTemplate: {
      std::vector<EventMention> out;
      for (const auto& su : SplitAndFilter(utt, cfg)) {
        for (auto& m : PosTemplateExtract(su)) {
          m.source = Source{utt.conversation_id, utt.utterance_index, su.index};
          out.push_back(std::move(m));
        }
      }
      return out;
    }
    case Method::kConcept:
      break;
  }
  throw ValidationError("method", "concept is not an extraction method");
}

std::vector<EventMention> ExtractCorpus(const corpus::Corpus& corpus, Method method,
                                        const ExtractorConfig& cfg, std::size_t threads) {
  std::vector<std::vector<EventMention>> per_conv(corpus.conversations.size());
  io::ParallelFor(corpus.conversations.size(), threads, [&](std::size_t c) {
    const auto& conv = corpus.conversations[c];
    for (const auto& u : conv.utterances) {
      const ParsedUtterance* pu = corpus.FindParse(conv.id, u.index);
      if (pu == nullptr) continue;
      for (auto& m : Extract(*pu, method, cfg)) per_conv[c].push_back(std::move(m));
    }
  });
  std::vector<EventMention> out;
  for (auto& v : per_conv) {
    for (auto& m : v) out.push_back(std::move(m));
  }
  return out;
}

json ToJson(const EventMention& m) {
  return json{{"text", m.text},
              {"source",
               {{"conversation", m.source.conversation_id},
                {"utterance", m.source.utterance_index},
                {"sub_utterance", m.source.sub_index}}},
              {"driver", m.driver ? json(ToString(*m.driver)) : json(nullptr)},
              {"method", ToString(m.method)}};
}

EventMention MentionFromJson(const json& j) {
  EventMention m;
  try {
    m.text = j.at("text").get<std::string>();
    const auto& s = j.at("source");
    m.source.conversation_id = s.at("conversation").get<std::string>();
    m.source.utterance_index = s.at("utterance").get<std::size_t>();
    m.source.sub_index = s.at("sub_utterance").get<std::size_t>();
    if (auto it = j.find("driver"); it != j.end() && !it->is_null()) {
      const auto d = it->get<std::string>();
      if (d == "verb") {
        m.driver = Driver::kVerb;
      } else if (d == "adjective") {
        m.driver = Driver::kAdjective;
      } else {
        throw ValidationError("driver", "unknown driver '" + d + "'");
      }
    }
    auto method = ParseMethod(j.at("method").get<std::string>());
    if (!method) throw ValidationError("method", "unknown method");
    m.method = *method;
  } catch (const json::exception& e) {
    throw ValidationError("mention", e.what());
  }
  if (m.text.empty()) throw ValidationError("text", "must be non-empty");
  return m;
}

}  // namespace convkg::extract
