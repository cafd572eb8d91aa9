#ifndef CONVKG_CORPUS_HPP_
#define CONVKG_CORPUS_HPP_

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "convkg/labels.hpp"

namespace convkg::corpus {

struct Scenario {
  std::string id;
  std::string topic;
  std::string description;
};

// Half-open byte range [begin, end) into Utterance::text.
struct CauseSpan {
  std::size_t begin = 0;
  std::size_t end = 0;
  friend bool operator==(const CauseSpan&, const CauseSpan&) = default;
};

struct Utterance {
  std::size_t index = 0;
  std::string speaker;
  std::string text;
  Emotion emotion = Emotion::kOther;
  Intent intent = Intent::kOther;
  std::vector<CauseSpan> cause_spans;
};

struct Conversation {
  std::string id;
  std::string scenario_id;
  std::vector<Utterance> utterances;
};

// One dependency-parsed token. `index` is 1-based and `head` is the
// governor's index, 0 for ROOT.
struct Token {
  int index = 0;
  std::string form;
  std::string pos;
  int head = 0;
  std::string deprel;
};

// A punctuation-delimited clause with its own dependency tree.
struct SubUtterance {
  std::size_t index = 0;
  std::vector<Token> tokens;
  std::string text;

  // Index of the ROOT-attached token, 0 when there is none.
  int RootIndex() const;
  const Token& At(int index) const { return tokens.at(static_cast<std::size_t>(index - 1)); }
  // Direct dependents of `index` in surface order.
  std::vector<int> Children(int index) const;
  // `index` and all its descendants, in surface order.
  std::vector<int> Subtree(int index) const;
  // Height of the subtree rooted at `index`; a leaf has depth 1.
  int Depth(int index) const;
  // Concatenated token forms.
  std::string FormsText() const;
};

struct ParsedUtterance {
  std::string conversation_id;
  std::size_t utterance_index = 0;
  std::vector<SubUtterance> sub_utterances;

  std::string Text() const;
};

// Checks the per-tree invariants: contiguous 1-based indices, heads in range,
// exactly one ROOT-attached token, no cycles. Throws ValidationError.
void ValidateTree(const SubUtterance& su);

struct Corpus {
  std::vector<Scenario> scenarios;
  std::vector<Conversation> conversations;
  // Keyed by (conversation id, utterance index).
  std::map<std::pair<std::string, std::size_t>, ParsedUtterance> parses;

  const Conversation* FindConversation(std::string_view id) const;
  const ParsedUtterance* FindParse(std::string_view conversation_id,
                                   std::size_t utterance_index) const;
  std::size_t UtteranceCount() const;
};

// Parses one corpus record. Conversation records carry `utterances`;
// scenario records carry "kind": "scenario". Throws ParseError.
void ParseRecord(const nlohmann::json& record, const std::string& source,
                 std::size_t line, Corpus& out);

// Loads the line-delimited corpus file and, when given, the CoNLL-U parse
// file. Every record is validated against the type invariants.
Corpus LoadCorpus(const std::filesystem::path& path,
                  const std::optional<std::filesystem::path>& parses = {});

nlohmann::json ToJson(const Scenario& s);
nlohmann::json ToJson(const Conversation& c);

// Writes scenarios first, then conversations, one record per line.
std::string SerializeCorpus(const Corpus& corpus);

// CoNLL-U. Each sentence must carry `# ref = conv_id/utt_idx/sub_idx`.
// The POS tag is read from XPOS when present, otherwise mapped from UPOS.
std::vector<ParsedUtterance> ParseConllu(std::string_view data,
                                         const std::string& source = "");
std::vector<ParsedUtterance> LoadConllu(const std::filesystem::path& path);
std::string WriteConllu(const std::vector<ParsedUtterance>& parses);

// Maps a Universal POS tag to the closest ltp tag.
std::string UposToLtp(std::string_view upos);

struct AlignmentMismatch {
  std::size_t utterance_index = 0;
  std::string expected;
  std::string reassembled;
};

struct AlignmentReport {
  std::vector<std::size_t> missing;  // utterances without a parse
  std::vector<AlignmentMismatch> mismatched;
  bool empty() const { return missing.empty() && mismatched.empty(); }
};

// Whitespace is ignored when comparing the reassembled parse text with the
// utterance text, since tokenizers drop it.
AlignmentReport ValidateParseAlignment(
    const Conversation& conv, const std::vector<ParsedUtterance>& parses);

}  // namespace convkg::corpus

#endif  // CONVKG_CORPUS_HPP_
