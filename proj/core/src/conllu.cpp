#include <algorithm>
#include <map>

#include "convkg/corpus.hpp"
#include "convkg/error.hpp"
#include "convkg/io.hpp"
#include "convkg/text.hpp"

namespace convkg::corpus {

std::string UposToLtp(std::string_view upos) {
  static const std::map<std::string_view, std::string_view> kMap = {
      {"VERB", "v"}, {"AUX", "v"},   {"NOUN", "n"},  {"PROPN", "nz"},
      {"ADJ", "a"},  {"ADV", "d"},   {"CCONJ", "c"}, {"SCONJ", "c"},
      {"PART", "u"}, {"NUM", "m"},   {"PUNCT", "wp"}, {"SYM", "wp"},
      {"PRON", "r"}, {"ADP", "p"},   {"INTJ", "e"},  {"DET", "r"},
      {"X", "x"},
  };
  auto it = kMap.find(upos);
  return it == kMap.end() ? std::string(upos) : std::string(it->second);
}

namespace {

struct Ref {
  std::string conversation;
  std::size_t utterance = 0;
  std::size_t sub = 0;
};

Ref ParseRef(std::string_view value, const std::string& source, std::size_t line) {
  const auto parts = text::Split(text::Trim(value), '/');
  if (parts.size() != 3 || parts[0].empty()) {
    throw ParseError(source, line, "ref", "expected conv_id/utt_idx/sub_idx");
  }
  Ref ref;
  ref.conversation = parts[0];
  try {
    std::size_t used = 0;
    ref.utterance = std::stoul(parts[1], &used);
    if (used != parts[1].size()) throw std::invalid_argument("trailing");
    ref.sub = std::stoul(parts[2], &used);
    if (used != parts[2].size()) throw std::invalid_argument("trailing");
  } catch (const std::exception&) {
    throw ParseError(source, line, "ref", "utterance and sub-utterance indices must be integers");
  }
  return ref;
}

int ParseInt(const std::string& s, const std::string& source, std::size_t line,
             const char* field) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(s, &used);
    if (used != s.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ParseError(source, line, field, "not an integer: '" + s + "'");
  }
}

}  // namespace

std::vector<ParsedUtterance> ParseConllu(std::string_view data, const std::string& source) {
  const auto lines = io::Lines(std::string(data));
  std::map<std::pair<std::string, std::size_t>, ParsedUtterance> grouped;
  std::vector<std::pair<std::string, std::size_t>> order;

  std::optional<Ref> ref;
  std::optional<std::string> sentence_text;
  SubUtterance current;
  std::size_t sentence_line = 0;

  auto flush = [&]() {
    if (current.tokens.empty()) {
      ref.reset();
      sentence_text.reset();
      sentence_line = 0;
      return;
    }
    if (!ref) throw ParseError(source, sentence_line, "ref", "sentence lacks a '# ref = ' comment");
    try {
      ValidateTree(current);
    } catch (const ValidationError& e) {
      throw ParseError(source, sentence_line, e.field(), e.what());
    }
    current.index = ref->sub;
    current.text = sentence_text ? *sentence_text : current.FormsText();
    auto key = std::make_pair(ref->conversation, ref->utterance);
    auto [it, inserted] = grouped.try_emplace(key);
    if (inserted) {
      order.push_back(key);
      it->second.conversation_id = ref->conversation;
      it->second.utterance_index = ref->utterance;
    }
    for (const auto& su : it->second.sub_utterances) {
      if (su.index == current.index) {
        throw ParseError(source, sentence_line, "ref", "duplicate sub-utterance reference");
      }
    }
    it->second.sub_utterances.push_back(std::move(current));
    current = SubUtterance{};
    ref.reset();
    sentence_text.reset();
    sentence_line = 0;
  };

  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t lineno = i + 1;
    const std::string& raw = lines[i];
    if (text::Trim(raw).empty()) {
      flush();
      continue;
    }
    if (raw[0] == '#') {
      const auto eq = raw.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = text::Trim(std::string_view(raw).substr(1, eq - 1));
      std::string value = std::string(raw.substr(eq + 1));
      if (!value.empty() && value.front() == ' ') value.erase(0, 1);
      if (key == "ref") {
        ref = ParseRef(value, source, lineno);
        sentence_line = lineno;
      } else if (key == "text") {
        sentence_text = value;
      }
      continue;
    }
    const auto cols = text::Split(raw, '\t');
    if (cols.size() < 8) {
      throw ParseError(source, lineno, "", "expected 10 tab-separated columns, got " +
                                               std::to_string(cols.size()));
    }
    // Multiword ranges and empty nodes carry no tree information.
    if (cols[0].find_first_of("-.") != std::string::npos) continue;
    if (current.tokens.empty() && sentence_line == 0) sentence_line = lineno;
    Token tok;
    tok.index = ParseInt(cols[0], source, lineno, "ID");
    tok.form = cols[1];
    if (!text::IsValidUtf8(tok.form)) throw ParseError(source, lineno, "FORM", "invalid UTF-8");
    tok.pos = (cols[4] != "_" && !cols[4].empty()) ? cols[4] : UposToLtp(cols[3]);
    tok.head = ParseInt(cols[6], source, lineno, "HEAD");
    tok.deprel = cols[7];
    current.tokens.push_back(std::move(tok));
  }
  flush();

  std::vector<ParsedUtterance> out;
  out.reserve(order.size());
  for (const auto& key : order) {
    auto& pu = grouped[key];
    std::sort(pu.sub_utterances.begin(), pu.sub_utterances.end(),
              [](const SubUtterance& a, const SubUtterance& b) { return a.index < b.index; });
    out.push_back(std::move(pu));
  }
  return out;
}

std::vector<ParsedUtterance> LoadConllu(const std::filesystem::path& path) {
  return ParseConllu(io::ReadFile(path), path.string());
}

std::string WriteConllu(const std::vector<ParsedUtterance>& parses) {
  std::string out;
  for (const auto& pu : parses) {
    for (const auto& su : pu.sub_utterances) {
      out += "# ref = " + pu.conversation_id + "/" + std::to_string(pu.utterance_index) + "/" +
             std::to_string(su.index) + "\n";
      out += "# text = " + su.text + "\n";
      for (const auto& t : su.tokens) {
        out += std::to_string(t.index) + "\t" + t.form + "\t_\t_\t" + t.pos + "\t_\t" +
               std::to_string(t.head) + "\t" + t.deprel + "\t_\t_\n";
      }
      out += "\n";
    }
  }
  return out;
}

}  // namespace convkg::corpus
