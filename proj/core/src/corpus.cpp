#include "convkg/corpus.hpp"

#include <algorithm>
#include <set>

#include "convkg/error.hpp"
#include "convkg/io.hpp"
#include "convkg/text.hpp"

namespace convkg::corpus {

using nlohmann::json;

int SubUtterance::RootIndex() const {
  for (const Token& t : tokens) {
    if (t.head == 0) return t.index;
  }
  return 0;
}

std::vector<int> SubUtterance::Children(int index) const {
  std::vector<int> out;
  for (const Token& t : tokens) {
    if (t.head == index && t.index != index) out.push_back(t.index);
  }
  return out;
}

std::vector<int> SubUtterance::Subtree(int index) const {
  std::vector<int> out;
  std::vector<int> stack = {index};
  std::vector<bool> seen(tokens.size() + 1, false);
  while (!stack.empty()) {
    const int cur = stack.back();
    stack.pop_back();
    if (cur <= 0 || static_cast<std::size_t>(cur) > tokens.size() || seen[cur]) continue;
    seen[cur] = true;
    out.push_back(cur);
    for (int c : Children(cur)) stack.push_back(c);
  }
  std::sort(out.begin(), out.end());
  return out;
}

int SubUtterance::Depth(int index) const {
  int best = 0;
  for (int c : Children(index)) best = std::max(best, Depth(c));
  return best + 1;
}

std::string SubUtterance::FormsText() const {
  std::string out;
  for (const Token& t : tokens) out += t.form;
  return out;
}

std::string ParsedUtterance::Text() const {
  std::string out;
  for (const auto& su : sub_utterances) out += su.text;
  return out;
}

void ValidateTree(const SubUtterance& su) {
  const int n = static_cast<int>(su.tokens.size());
  int roots = 0;
  for (int i = 0; i < n; ++i) {
    const Token& t = su.tokens[static_cast<std::size_t>(i)];
    if (t.index != i + 1) {
      throw ValidationError("ID", "token indices must be contiguous from 1, got " +
                                      std::to_string(t.index) + " at position " +
                                      std::to_string(i + 1));
    }
    if (t.head < 0 || t.head > n) {
      throw ValidationError("HEAD", "head " + std::to_string(t.head) +
                                        " out of range for token " +
                                        std::to_string(t.index));
    }
    if (t.head == t.index) {
      throw ValidationError("HEAD", "token " + std::to_string(t.index) +
                                        " is its own head");
    }
    if (t.head == 0) ++roots;
  }
  if (n > 0 && roots != 1) {
    throw ValidationError("HEAD", "expected exactly one ROOT-attached token, found " +
                                      std::to_string(roots));
  }
  // Every token must reach ROOT within n steps.
  for (const Token& t : su.tokens) {
    int cur = t.index;
    int steps = 0;
    while (cur != 0) {
      cur = su.tokens[static_cast<std::size_t>(cur - 1)].head;
      if (++steps > n) {
        throw ValidationError("HEAD", "dependency cycle through token " +
                                          std::to_string(t.index));
      }
    }
  }
}

const Conversation* Corpus::FindConversation(std::string_view id) const {
  for (const auto& c : conversations) {
    if (c.id == id) return &c;
  }
  return nullptr;
}

const ParsedUtterance* Corpus::FindParse(std::string_view conversation_id,
                                         std::size_t utterance_index) const {
  auto it = parses.find({std::string(conversation_id), utterance_index});
  return it == parses.end() ? nullptr : &it->second;
}

std::size_t Corpus::UtteranceCount() const {
  std::size_t n = 0;
  for (const auto& c : conversations) n += c.utterances.size();
  return n;
}

namespace {

std::string RequireString(const json& obj, const char* key,
                          const std::string& source, std::size_t line,
                          const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(source, line, path + key, "missing");
  if (!it->is_string()) throw ParseError(source, line, path + key, "must be a string");
  std::string value = it->get<std::string>();
  if (!text::IsValidUtf8(value)) {
    throw ParseError(source, line, path + key, "invalid UTF-8");
  }
  return value;
}

Utterance ParseUtterance(const json& u, std::size_t index,
                         const std::string& source, std::size_t line) {
  const std::string path = "utterances[" + std::to_string(index) + "].";
  if (!u.is_object()) throw ParseError(source, line, path, "must be an object");
  Utterance out;
  out.index = index;
  out.speaker = RequireString(u, "speaker", source, line, path);
  out.text = RequireString(u, "text", source, line, path);
  if (auto it = u.find("emotion"); it != u.end() && !it->is_null()) {
    if (!it->is_string()) throw ParseError(source, line, path + "emotion", "must be a string");
    auto e = ParseEmotion(it->get<std::string>());
    if (!e) {
      throw ParseError(source, line, path + "emotion",
                       "unknown emotion label '" + it->get<std::string>() + "'");
    }
    out.emotion = *e;
  }
  if (auto it = u.find("intent"); it != u.end() && !it->is_null()) {
    if (!it->is_string()) throw ParseError(source, line, path + "intent", "must be a string");
    auto i = ParseIntent(it->get<std::string>());
    if (!i) {
      throw ParseError(source, line, path + "intent",
                       "unknown intent label '" + it->get<std::string>() + "'");
    }
    out.intent = *i;
  }
  if (auto it = u.find("cause_spans"); it != u.end() && !it->is_null()) {
    if (!it->is_array()) throw ParseError(source, line, path + "cause_spans", "must be an array");
    for (const auto& span : *it) {
      if (!span.is_array() || span.size() != 2 || !span[0].is_number_unsigned() ||
          !span[1].is_number_unsigned()) {
        throw ParseError(source, line, path + "cause_spans",
                         "each span must be [begin, end] byte offsets");
      }
      CauseSpan cs{span[0].get<std::size_t>(), span[1].get<std::size_t>()};
      if (cs.begin > cs.end || cs.end > out.text.size()) {
        throw ParseError(source, line, path + "cause_spans",
                         "span [" + std::to_string(cs.begin) + ", " +
                             std::to_string(cs.end) + ") outside text of " +
                             std::to_string(out.text.size()) + " bytes");
      }
      if (!text::IsCodePointBoundary(out.text, cs.begin) ||
          !text::IsCodePointBoundary(out.text, cs.end)) {
        throw ParseError(source, line, path + "cause_spans",
                         "span splits a UTF-8 code point");
      }
      out.cause_spans.push_back(cs);
    }
  }
  return out;
}

}  // namespace

void ParseRecord(const json& record, const std::string& source,
                 std::size_t line, Corpus& out) {
  if (!record.is_object()) throw ParseError(source, line, "", "record must be an object");
  const std::string kind = record.value("kind", std::string("conversation"));
  if (kind == "scenario") {
    Scenario s;
    s.id = RequireString(record, "id", source, line, "");
    s.topic = RequireString(record, "topic", source, line, "");
    s.description = RequireString(record, "description", source, line, "");
    if (text::Trim(s.description).empty()) {
      throw ParseError(source, line, "description", "must be non-empty");
    }
    for (const auto& existing : out.scenarios) {
      if (existing.id == s.id) throw ParseError(source, line, "id", "duplicate scenario id '" + s.id + "'");
    }
    out.scenarios.push_back(std::move(s));
    return;
  }
  if (kind != "conversation") {
    throw ParseError(source, line, "kind", "unknown record kind '" + kind + "'");
  }
  Conversation c;
  c.id = RequireString(record, "id", source, line, "");
  c.scenario_id = record.contains("scenario_id")
                      ? RequireString(record, "scenario_id", source, line, "")
                      : std::string();
  auto it = record.find("utterances");
  if (it == record.end() || !it->is_array()) {
    throw ParseError(source, line, "utterances", "missing or not an array");
  }
  for (std::size_t i = 0; i < it->size(); ++i) {
    c.utterances.push_back(ParseUtterance((*it)[i], i, source, line));
  }
  if (c.utterances.size() < 2) {
    throw ParseError(source, line, "utterances", "a conversation needs at least 2 utterances");
  }
  std::set<std::string> speakers;
  for (std::size_t i = 0; i < c.utterances.size(); ++i) {
    speakers.insert(c.utterances[i].speaker);
    if (i > 0 && c.utterances[i].speaker == c.utterances[i - 1].speaker) {
      throw ParseError(source, line,
                       "utterances[" + std::to_string(i) + "].speaker",
                       "speakers must alternate");
    }
  }
  if (speakers.size() != 2) {
    throw ParseError(source, line, "utterances",
                     "expected exactly two speakers, found " + std::to_string(speakers.size()));
  }
  if (out.FindConversation(c.id) != nullptr) {
    throw ParseError(source, line, "id", "duplicate conversation id '" + c.id + "'");
  }
  out.conversations.push_back(std::move(c));
}

Corpus LoadCorpus(const std::filesystem::path& path,
                  const std::optional<std::filesystem::path>& parses) {
  Corpus corpus;
  const auto lines = io::ReadLines(path);
  const std::string source = path.string();
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (text::Trim(lines[i]).empty()) continue;
    json record;
    try {
      record = json::parse(lines[i]);
    } catch (const json::parse_error& e) {
      throw ParseError(source, i + 1, "", e.what());
    }
    ParseRecord(record, source, i + 1, corpus);
  }
  if (!corpus.scenarios.empty()) {
    for (const auto& c : corpus.conversations) {
      if (c.scenario_id.empty()) continue;
      const bool known = std::any_of(corpus.scenarios.begin(), corpus.scenarios.end(),
                                     [&](const Scenario& s) { return s.id == c.scenario_id; });
      if (!known) {
        throw ParseError(source, 0, "scenario_id",
                         "conversation '" + c.id + "' references unknown scenario '" +
                             c.scenario_id + "'");
      }
    }
  }
  if (parses) {
    for (auto& pu : LoadConllu(*parses)) {
      const Conversation* conv = corpus.FindConversation(pu.conversation_id);
      if (conv == nullptr || pu.utterance_index >= conv->utterances.size()) {
        throw ParseError(parses->string(), 0, "ref",
                         "parse references unknown utterance " + pu.conversation_id + "/" +
                             std::to_string(pu.utterance_index));
      }
      auto key = std::make_pair(pu.conversation_id, pu.utterance_index);
      corpus.parses.emplace(std::move(key), std::move(pu));
    }
  }
  return corpus;
}

json ToJson(const Scenario& s) {
  return json{{"kind", "scenario"}, {"id", s.id}, {"topic", s.topic},
              {"description", s.description}};
}

json ToJson(const Conversation& c) {
  json utts = json::array();
  for (const auto& u : c.utterances) {
    json spans = json::array();
    for (const auto& s : u.cause_spans) spans.push_back({s.begin, s.end});
    utts.push_back({{"speaker", u.speaker},
                    {"text", u.text},
                    {"emotion", ToString(u.emotion)},
                    {"intent", ToString(u.intent)},
                    {"cause_spans", spans}});
  }
  return json{{"id", c.id}, {"scenario_id", c.scenario_id}, {"utterances", utts}};
}

std::string SerializeCorpus(const Corpus& corpus) {
  std::string out;
  for (const auto& s : corpus.scenarios) out += io::DumpLine(ToJson(s)) + "\n";
  for (const auto& c : corpus.conversations) out += io::DumpLine(ToJson(c)) + "\n";
  return out;
}

namespace {

std::string StripAllSpace(std::string_view s) {
  std::string out;
  std::string_view rest = s;
  while (!rest.empty()) {
    const auto c = static_cast<unsigned char>(rest.front());
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      rest.remove_prefix(1);
    } else if (rest.substr(0, 3) == "\xE3\x80\x80") {
      rest.remove_prefix(3);
    } else {
      out.push_back(rest.front());
      rest.remove_prefix(1);
    }
  }
  return out;
}

}  // namespace

AlignmentReport ValidateParseAlignment(const Conversation& conv,
                                       const std::vector<ParsedUtterance>& parses) {
  AlignmentReport report;
  for (const auto& u : conv.utterances) {
    const ParsedUtterance* found = nullptr;
    for (const auto& p : parses) {
      if (p.conversation_id == conv.id && p.utterance_index == u.index) {
        found = &p;
        break;
      }
    }
    if (found == nullptr) {
      report.missing.push_back(u.index);
      continue;
    }
    std::string reassembled;
    for (const auto& su : found->sub_utterances) reassembled += su.FormsText();
    if (StripAllSpace(reassembled) != StripAllSpace(u.text)) {
      report.mismatched.push_back({u.index, u.text, reassembled});
    }
  }
  return report;
}

}  // namespace convkg::corpus
