#include "convkg/translation.hpp"

#include <algorithm>
#include <cmath>

#include "convkg/error.hpp"
#include "convkg/io.hpp"
#include "convkg/text.hpp"

namespace convkg::kb {
namespace {

std::vector<std::string> Anchors(std::string_view pattern) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= pattern.size()) {
    std::size_t pos = pattern.find("...", start);
    if (pos == std::string_view::npos) pos = pattern.size();
    std::string piece = text::Trim(pattern.substr(start, pos - start));
    if (!piece.empty()) out.push_back(std::move(piece));
    start = pos + 3;
  }
  return out;
}

bool IsBlankAnchor(std::string_view anchor) {
  return !anchor.empty() && anchor.find_first_not_of('_') == std::string_view::npos;
}

char Lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }

struct Span {
  std::size_t pos = 0;
  std::size_t len = 0;
};

bool Free(const std::vector<bool>& consumed, std::size_t pos, std::size_t len) {
  for (std::size_t i = pos; i < pos + len; ++i) {
    if (consumed[i]) return false;
  }
  return true;
}

std::optional<Span> FindAnchor(std::string_view text, std::string_view anchor, std::size_t from,
                               const std::vector<bool>& consumed) {
  const bool blank = IsBlankAnchor(anchor);
  for (std::size_t pos = from; pos + anchor.size() <= text.size(); ++pos) {
    std::size_t len = 0;
    if (blank) {
      if (text[pos] != '_' || (pos > 0 && text[pos - 1] == '_')) continue;
      std::size_t run = 0;
      while (pos + run < text.size() && text[pos + run] == '_') ++run;
      if (run < anchor.size()) continue;
      len = run;
    } else {
      bool match = true;
      for (std::size_t k = 0; k < anchor.size() && match; ++k) {
        match = Lower(text[pos + k]) == Lower(anchor[k]);
      }
      if (!match) continue;
      len = anchor.size();
    }
    if (Free(consumed, pos, len)) return Span{pos, len};
  }
  return std::nullopt;
}

struct Match {
  Span span;
  std::string replacement;
  std::size_t rule;
};

}  // namespace

std::vector<ReplacementRule> DefaultReplacementRules() {
  return {
      {"PersonX...PersonX's...", "Someone...his..."},
      {"PersonX...PersonY's...", "Someone...someone else's..."},
      {"PersonX...PersonX...", "Someone...himself..."},
      {"PersonX...PersonY...", "Someone...someone else..."},
      {"...___...", "...something..."},
      {"PersonX", "Someone"},
      {"PersonY", "someone else"},
  };
}

ReplacementResult ApplyReplacements(std::string_view input,
                                    const std::vector<ReplacementRule>& rules) {
  std::vector<bool> consumed(input.size(), false);
  std::vector<Match> matches;
  for (std::size_t r = 0; r < rules.size(); ++r) {
    const auto from = Anchors(rules[r].original_pattern);
    const auto to = Anchors(rules[r].replaced_pattern);
    if (from.size() != to.size() || from.empty()) {
      throw ValidationError("rules[" + std::to_string(r) + "]",
                            "original and replaced templates must have the same number of "
                            "non-empty placeholders");
    }
    while (true) {
      std::vector<Span> spans;
      std::size_t cursor = 0;
      for (const auto& anchor : from) {
        auto span = FindAnchor(input, anchor, cursor, consumed);
        if (!span) break;
        spans.push_back(*span);
        cursor = span->pos + span->len;
      }
      if (spans.size() != from.size()) break;
      for (std::size_t k = 0; k < spans.size(); ++k) {
        for (std::size_t i = spans[k].pos; i < spans[k].pos + spans[k].len; ++i) consumed[i] = true;
        matches.push_back({spans[k], to[k], r});
      }
    }
  }
  std::sort(matches.begin(), matches.end(),
            [](const Match& a, const Match& b) { return a.span.pos < b.span.pos; });

  ReplacementResult result;
  std::size_t prev = 0;
  for (const auto& m : matches) {
    result.text.append(input.substr(prev, m.span.pos - prev));
    result.log.push_back({result.text.size(), std::string(input.substr(m.span.pos, m.span.len)),
                          m.replacement, m.rule});
    result.text.append(m.replacement);
    prev = m.span.pos + m.span.len;
  }
  result.text.append(input.substr(prev));
  return result;
}

std::string InvertReplacements(const ReplacementResult& result) {
  std::string out;
  std::size_t prev = 0;
  for (const auto& s : result.log) {
    out.append(result.text, prev, s.output_offset - prev);
    out.append(s.original);
    prev = s.output_offset + s.replacement.size();
  }
  out.append(result.text, prev, std::string::npos);
  return out;
}

std::string TableTranslationClient::Translate(std::string_view text) {
  auto it = table_.find(std::string(text));
  if (it != table_.end()) return it->second;
  if (strict_) throw RetriableError("no translation for '" + std::string(text) + "'");
  return std::string(text);
}

ConnectorMap DefaultConnectors() {
  ConnectorMap map;
  for (Relation r : kAllRelations) {
    const std::string marker = " ⟦" + std::string(ToString(r)) + "⟧ ";
    map[r] = Connector{marker, marker};
  }
  return map;
}

ConnectorMap UniformConnectors(const Connector& connector) {
  ConnectorMap map;
  for (Relation r : kAllRelations) map[r] = connector;
  return map;
}

namespace {

// Occurrences of `needle` in `hay`, overlapping ones included.
std::vector<std::size_t> Occurrences(std::string_view hay, std::string_view needle) {
  std::vector<std::size_t> out;
  if (needle.empty()) return out;
  for (std::size_t pos = hay.find(needle); pos != std::string_view::npos;
       pos = hay.find(needle, pos + 1)) {
    out.push_back(pos);
  }
  return out;
}

}  // namespace

TranslatedTriple JointTranslate(std::string_view head, Relation relation, std::string_view tail,
                                const ConnectorMap& connectors, TranslationClient& client) {
  auto it = connectors.find(relation);
  if (it == connectors.end()) {
    throw ValidationError("connector", "no connector defined for relation " +
                                           std::string(ToString(relation)));
  }
  const Connector& conn = it->second;
  std::string joined(head);
  joined += conn.text;
  joined += tail;
  const std::string translated = client.Translate(joined);
  const std::string conn_tr = conn.translated ? *conn.translated : client.Translate(conn.text);

  TranslatedTriple out;
  out.relation = relation;
  auto hits = Occurrences(translated, conn_tr);
  if (hits.size() == 1) {
    out.head = translated.substr(0, hits[0]);
    out.tail = translated.substr(hits[0] + conn_tr.size());
    return out;
  }
  // Services often normalize whitespace around the connector.
  const std::string trimmed = text::Trim(conn_tr);
  if (!trimmed.empty() && trimmed != conn_tr) {
    hits = Occurrences(translated, trimmed);
    if (hits.size() == 1) {
      out.head = text::Trim(std::string_view(translated).substr(0, hits[0]));
      out.tail = text::Trim(std::string_view(translated).substr(hits[0] + trimmed.size()));
      return out;
    }
  }
  out.head = client.Translate(head);
  out.tail = client.Translate(tail);
  out.split_failed = true;
  return out;
}

KbTranslation TranslateKb(const KnowledgeBase& source, const std::vector<ReplacementRule>& rules,
                          const ConnectorMap& connectors, TranslationClient& client,
                          std::size_t threads) {
  const auto& triples = source.triples();
  std::vector<TranslatedTriple> results(triples.size());
  io::ParallelFor(triples.size(), threads, [&](std::size_t i) {
    const Triple& t = triples[i];
    const Head* h = source.FindHead(t.head_id);
    const auto head = ApplyReplacements(h->text, rules);
    const auto tail = ApplyReplacements(t.tail, rules);
    results[i] = JointTranslate(head.text, t.relation, tail.text, connectors, client);
  });

  KbTranslation out;
  for (std::size_t i = 0; i < triples.size(); ++i) {
    const Triple& t = triples[i];
    const Head* h = source.FindHead(t.head_id);
    if (out.kb.FindHead(h->id) == nullptr) {
      out.kb.AddHead(Head{h->id, text::Trim(results[i].head), h->level});
    }
    out.kb.AddTriple(Triple{h->id, t.relation, text::Trim(results[i].tail)});
    if (results[i].split_failed) ++out.split_failures;
  }
  out.triples = std::move(results);
  return out;
}

QualityReport TranslationQualityReport(const std::vector<QualityLabel>& labels) {
  if (labels.empty()) throw ValidationError("labels", "at least one label is required");
  std::size_t fluent = 0;
  std::size_t logical = 0;
  for (const auto& l : labels) {
    if ((l.fluency != 0 && l.fluency != 1) || (l.logic != 0 && l.logic != 1)) {
      throw ValidationError("labels", "fluency and logic must be 0 or 1 (triple '" +
                                          l.triple_id + "')");
    }
    fluent += static_cast<std::size_t>(l.fluency);
    logical += static_cast<std::size_t>(l.logic);
  }
  const auto round3 = [](double v) { return std::round(v * 1000.0) / 1000.0; };
  const double n = static_cast<double>(labels.size());
  return QualityReport{round3(static_cast<double>(fluent) / n),
                       round3(static_cast<double>(logical) / n), labels.size()};
}

}  // namespace convkg::kb
