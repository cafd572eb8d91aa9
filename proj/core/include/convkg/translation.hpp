#ifndef CONVKG_TRANSLATION_HPP_
#define CONVKG_TRANSLATION_HPP_

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "convkg/kb.hpp"

// Pre/post-processing around a pluggable machine translation client: pattern
// replacement of placeholder tokens, and joint head+tail translation.
namespace convkg::kb {

// Templates use "..." to separate anchors, e.g. "PersonX...PersonY's..." ->
// "Someone...someone else's...". Both sides must have the same number of
// anchors; the i-th original anchor is rewritten to the i-th replaced one.
// Anchors match ASCII case-insensitively. An anchor made only of underscores
// matches any run of at least that many underscores.
struct ReplacementRule {
  std::string original_pattern;
  std::string replaced_pattern;
};

// The placeholder rules used for ATOMIC-style text, longest patterns first,
// followed by single-placeholder fallbacks.
std::vector<ReplacementRule> DefaultReplacementRules();

struct Substitution {
  std::size_t output_offset = 0;  // byte offset in the replaced text
  std::string original;           // matched input text
  std::string replacement;
  std::size_t rule = 0;           // index into the rule list
};

struct ReplacementResult {
  std::string text;
  std::vector<Substitution> log;  // sorted by output_offset
};

// Applies rules in priority order; each rule repeatedly takes its leftmost
// match among not-yet-rewritten bytes. Throws ValidationError for a rule
// whose templates have different anchor counts.
ReplacementResult ApplyReplacements(std::string_view text,
                                    const std::vector<ReplacementRule>& rules);

// Undoes ApplyReplacements using its log.
std::string InvertReplacements(const ReplacementResult& result);

class TranslationClient {
 public:
  virtual ~TranslationClient() = default;
  // Throws RetriableError on transport or service failure. Implementations
  // must tolerate concurrent calls.
  virtual std::string Translate(std::string_view text) = 0;
};

class IdentityTranslationClient final : public TranslationClient {
 public:
  std::string Translate(std::string_view text) override { return std::string(text); }
};

// Exact-match lookup table. Unknown inputs pass through unchanged, or raise
// RetriableError when `strict` is set.
class TableTranslationClient final : public TranslationClient {
 public:
  explicit TableTranslationClient(std::map<std::string, std::string> table, bool strict = false)
      : table_(std::move(table)), strict_(strict) {}
  std::string Translate(std::string_view text) override;

 private:
  std::map<std::string, std::string> table_;
  bool strict_;
};

class FunctionTranslationClient final : public TranslationClient {
 public:
  explicit FunctionTranslationClient(std::function<std::string(std::string_view)> fn)
      : fn_(std::move(fn)) {}
  std::string Translate(std::string_view text) override { return fn_(text); }

 private:
  std::function<std::string(std::string_view)> fn_;
};

// POSTs {"text": ...} to `endpoint` and reads {"translation": ...}. The
// bearer token, when non-empty, is sent in the Authorization header.
class HttpTranslationClient final : public TranslationClient {
 public:
  HttpTranslationClient(std::string endpoint, std::string token, int timeout_seconds = 30);
  std::string Translate(std::string_view text) override;

 private:
  std::string endpoint_;
  std::string token_;
  int timeout_seconds_;
};

// Connector phrase joining head and tail for one relation. When `translated`
// is unset, the client is asked to translate the connector itself.
struct Connector {
  std::string text;
  std::optional<std::string> translated;
};

using ConnectorMap = std::map<Relation, Connector>;

// Bracketed markers such as " ⟦xWant⟧ " that translation services leave
// untouched; `translated` is set to the marker itself.
ConnectorMap DefaultConnectors();
ConnectorMap UniformConnectors(const Connector& connector);

struct TranslatedTriple {
  std::string head;
  Relation relation = Relation::kXIntent;
  std::string tail;
  // The translated connector was not found exactly once in the output, so
  // head and tail were translated separately.
  bool split_failed = false;
};

// Translates head + connector + tail as one sentence and splits the output
// on the translated connector.
TranslatedTriple JointTranslate(std::string_view head, Relation relation, std::string_view tail,
                                const ConnectorMap& connectors, TranslationClient& client);

struct KbTranslation {
  KnowledgeBase kb;
  std::vector<TranslatedTriple> triples;  // input order
  std::size_t split_failures = 0;
};

// Replacement + joint translation for every triple. Calls are issued on up
// to `threads` workers; results are merged in input order. A head translated
// differently by several triples keeps its first translation.
KbTranslation TranslateKb(const KnowledgeBase& source, const std::vector<ReplacementRule>& rules,
                          const ConnectorMap& connectors, TranslationClient& client,
                          std::size_t threads = 1);

struct QualityLabel {
  std::string triple_id;
  int fluency = 0;
  int logic = 0;
};

struct QualityReport {
  double fluency = 0.0;
  double logic = 0.0;
  std::size_t count = 0;
};

// Means of the binary judgements, rounded to 3 decimals. Throws
// ValidationError on an empty set or a label outside {0, 1}.
QualityReport TranslationQualityReport(const std::vector<QualityLabel>& labels);

}  // namespace convkg::kb

#endif  // CONVKG_TRANSLATION_HPP_
