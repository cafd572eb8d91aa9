#ifndef CONVKG_KB_HPP_
#define CONVKG_KB_HPP_

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace convkg::kb {

// The nine inferential relations plus the two event-ordering relations.
enum class Relation {
  kXIntent,
  kXNeed,
  kXAttr,
  kXReact,
  kXWant,
  kXEffect,
  kOReact,
  kOWant,
  kOEffect,
  kIsAfter,
  kIsBefore,
};

inline constexpr std::array<Relation, 11> kAllRelations = {
    Relation::kXIntent, Relation::kXNeed,   Relation::kXAttr,   Relation::kXReact,
    Relation::kXWant,   Relation::kXEffect, Relation::kOReact,  Relation::kOWant,
    Relation::kOEffect, Relation::kIsAfter, Relation::kIsBefore};

std::string_view ToString(Relation r);
std::optional<Relation> ParseRelation(std::string_view s);

// Grouping of tails used when building emotion-based edges.
enum class TailCategory { kEmotion, kBefore, kAfter, kNone };

std::string_view ToString(TailCategory c);

// xAttr, xReact -> emotion; isAfter, xNeed -> before;
// isBefore, xWant, xIntent, xEffect, oEffect -> after; everything else none.
TailCategory CategorizeTail(Relation r);

enum class HeadLevel { kEvent, kEntity };

std::string_view ToString(HeadLevel l);
std::optional<HeadLevel> ParseHeadLevel(std::string_view s);

struct Head {
  std::string id;
  std::string text;
  HeadLevel level = HeadLevel::kEvent;
};

struct Triple {
  std::string head_id;
  Relation relation = Relation::kXIntent;
  std::string tail;
};

// Immutable after loading; safe for concurrent readers.
class KnowledgeBase {
 public:
  KnowledgeBase() = default;

  // Adds a head, or checks consistency with an existing head of the same id.
  // Throws ValidationError on conflicting text/level or empty text.
  const Head& AddHead(Head head);

  // Returns false when the triple is a duplicate (after whitespace
  // normalization of head text and tail). Throws if the head is unknown or
  // the tail is empty.
  bool AddTriple(Triple triple);

  const Head* FindHead(std::string_view id) const;
  const std::vector<Head>& heads() const { return heads_; }
  const std::vector<Triple>& triples() const { return triples_; }

  std::vector<const Head*> HeadsAt(HeadLevel level) const;
  // Indices into triples(), in insertion order.
  const std::vector<std::size_t>& TriplesOf(std::string_view head_id) const;
  const std::vector<std::size_t>& TriplesWith(Relation r) const;

 private:
  std::vector<Head> heads_;
  std::vector<Triple> triples_;
  std::unordered_map<std::string, std::size_t> head_index_;
  std::unordered_map<std::string, std::vector<std::size_t>> by_head_;
  std::array<std::vector<std::size_t>, kAllRelations.size()> by_relation_;
  std::unordered_map<std::string, bool> dedup_;
};

// TSV: head_id, head_text, head_level, relation, tail. Lines starting with
// '#' and blank lines are skipped. Throws ParseError with the line number.
KnowledgeBase LoadKb(const std::filesystem::path& path);
KnowledgeBase ParseKb(std::string_view data, const std::string& source = "");
std::string WriteKb(const KnowledgeBase& kb);

// Node id of a tail. Graph-wide mode shares one node per normalized text;
// per-head mode keys the node by (head, relation, text).
enum class TailIdentity { kGraphWide, kPerHead };

std::string TailNodeId(const Triple& triple, TailIdentity mode);
std::string TailNodeId(std::string_view head_id, Relation r, std::string_view tail,
                       TailIdentity mode);

}  // namespace convkg::kb

#endif  // CONVKG_KB_HPP_
