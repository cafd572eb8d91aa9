#include "convkg/kb.hpp"

#include "convkg/error.hpp"
#include "convkg/io.hpp"
#include "convkg/text.hpp"

namespace convkg::kb {

std::string_view ToString(Relation r) {
  switch (r) {
    case Relation::kXIntent: return "xIntent";
    case Relation::kXNeed: return "xNeed";
    case Relation::kXAttr: return "xAttr";
    case Relation::kXReact: return "xReact";
    case Relation::kXWant: return "xWant";
    case Relation::kXEffect: return "xEffect";
    case Relation::kOReact: return "oReact";
    case Relation::kOWant: return "oWant";
    case Relation::kOEffect: return "oEffect";
    case Relation::kIsAfter: return "isAfter";
    case Relation::kIsBefore: return "isBefore";
  }
  return "";
}

std::optional<Relation> ParseRelation(std::string_view s) {
  for (Relation r : kAllRelations) {
    if (ToString(r) == s) return r;
  }
  return std::nullopt;
}

std::string_view ToString(TailCategory c) {
  switch (c) {
    case TailCategory::kEmotion: return "Tail_emotion";
    case TailCategory::kBefore: return "Tail_before";
    case TailCategory::kAfter: return "Tail_after";
    case TailCategory::kNone: return "none";
  }
  return "none";
}

TailCategory CategorizeTail(Relation r) {
  switch (r) {
    case Relation::kXAttr:
    case Relation::kXReact:
      return TailCategory::kEmotion;
    case Relation::kIsAfter:
    case Relation::kXNeed:
      return TailCategory::kBefore;
    case Relation::kIsBefore:
    case Relation::kXWant:
    case Relation::kXIntent:
    case Relation::kXEffect:
    case Relation::kOEffect:
      return TailCategory::kAfter;
    case Relation::kOReact:
    case Relation::kOWant:
      return TailCategory::kNone;
  }
  return TailCategory::kNone;
}

std::string_view ToString(HeadLevel l) {
  return l == HeadLevel::kEvent ? "event" : "entity";
}

std::optional<HeadLevel> ParseHeadLevel(std::string_view s) {
  if (s == "event") return HeadLevel::kEvent;
  if (s == "entity") return HeadLevel::kEntity;
  return std::nullopt;
}

const Head& KnowledgeBase::AddHead(Head head) {
  if (text::Trim(head.text).empty()) throw ValidationError("head_text", "must be non-empty");
  if (head.id.empty()) throw ValidationError("head_id", "must be non-empty");
  if (text::StartsWith(head.id, "tail:")) {
    throw ValidationError("head_id", "the 'tail:' prefix is reserved for tail nodes");
  }
  if (auto it = head_index_.find(head.id); it != head_index_.end()) {
    const Head& existing = heads_[it->second];
    if (text::NormalizeWhitespace(existing.text) != text::NormalizeWhitespace(head.text) ||
        existing.level != head.level) {
      throw ValidationError("head_id", "head '" + head.id + "' redefined with different text or level");
    }
    return existing;
  }
  head_index_.emplace(head.id, heads_.size());
  heads_.push_back(std::move(head));
  return heads_.back();
}

bool KnowledgeBase::AddTriple(Triple triple) {
  const Head* head = FindHead(triple.head_id);
  if (head == nullptr) throw ValidationError("head_id", "unknown head '" + triple.head_id + "'");
  if (text::Trim(triple.tail).empty()) throw ValidationError("tail", "must be non-empty");
  std::string key = text::NormalizeWhitespace(head->text);
  key += '\t';
  key += ToString(triple.relation);
  key += '\t';
  key += text::NormalizeWhitespace(triple.tail);
  if (!dedup_.emplace(std::move(key), true).second) return false;
  const std::size_t idx = triples_.size();
  by_head_[triple.head_id].push_back(idx);
  by_relation_[static_cast<std::size_t>(triple.relation)].push_back(idx);
  triples_.push_back(std::move(triple));
  return true;
}

const Head* KnowledgeBase::FindHead(std::string_view id) const {
  auto it = head_index_.find(std::string(id));
  return it == head_index_.end() ? nullptr : &heads_[it->second];
}

std::vector<const Head*> KnowledgeBase::HeadsAt(HeadLevel level) const {
  std::vector<const Head*> out;
  for (const auto& h : heads_) {
    if (h.level == level) out.push_back(&h);
  }
  return out;
}

const std::vector<std::size_t>& KnowledgeBase::TriplesOf(std::string_view head_id) const {
  static const std::vector<std::size_t> kEmpty;
  auto it = by_head_.find(std::string(head_id));
  return it == by_head_.end() ? kEmpty : it->second;
}

const std::vector<std::size_t>& KnowledgeBase::TriplesWith(Relation r) const {
  return by_relation_[static_cast<std::size_t>(r)];
}

KnowledgeBase ParseKb(std::string_view data, const std::string& source) {
  KnowledgeBase kb;
  const auto lines = io::Lines(std::string(data));
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t lineno = i + 1;
    if (text::Trim(lines[i]).empty() || lines[i][0] == '#') continue;
    const auto cols = text::Split(lines[i], '\t');
    if (cols.size() != 5) {
      throw ParseError(source, lineno, "", "expected 5 tab-separated columns, got " +
                                               std::to_string(cols.size()));
    }
    for (const auto& c : cols) {
      if (!text::IsValidUtf8(c)) throw ParseError(source, lineno, "", "invalid UTF-8");
    }
    auto level = ParseHeadLevel(cols[2]);
    if (!level) throw ParseError(source, lineno, "head_level", "unknown level '" + cols[2] + "'");
    auto relation = ParseRelation(cols[3]);
    if (!relation) throw ParseError(source, lineno, "relation", "unknown relation '" + cols[3] + "'");
    try {
      kb.AddHead(Head{cols[0], cols[1], *level});
      kb.AddTriple(Triple{cols[0], *relation, cols[4]});
    } catch (const ValidationError& e) {
      throw ParseError(source, lineno, e.field(), e.what());
    }
  }
  return kb;
}

KnowledgeBase LoadKb(const std::filesystem::path& path) {
  return ParseKb(io::ReadFile(path), path.string());
}

std::string WriteKb(const KnowledgeBase& kb) {
  std::string out;
  for (const auto& t : kb.triples()) {
    const Head* h = kb.FindHead(t.head_id);
    out += h->id + "\t" + h->text + "\t" + std::string(ToString(h->level)) + "\t" +
           std::string(ToString(t.relation)) + "\t" + t.tail + "\n";
  }
  return out;
}

std::string TailNodeId(std::string_view head_id, Relation r, std::string_view tail,
                       TailIdentity mode) {
  const std::string norm = text::NormalizeWhitespace(tail);
  if (mode == TailIdentity::kGraphWide) return "tail:" + norm;
  return "tail:" + std::string(head_id) + "/" + std::string(ToString(r)) + "/" + norm;
}

std::string TailNodeId(const Triple& triple, TailIdentity mode) {
  return TailNodeId(triple.head_id, triple.relation, triple.tail, mode);
}

}  // namespace convkg::kb
