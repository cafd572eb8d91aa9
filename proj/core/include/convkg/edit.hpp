#ifndef CONVKG_EDIT_HPP_
#define CONVKG_EDIT_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "convkg/graph.hpp"
#include "convkg/kb.hpp"

// Expert edits to an assembled graph.
namespace convkg::edit {

// Payloads by op:
//   add_tail         {head, relation, tail}
//   revise_tail      {head, relation, tail, new_tail}
//   delete_tail      {head, relation, tail}
//   add_flow_edge    {kind, from, to, subkind?, intent_label?, conversation?, utterances?}
//   label_edge       {kind, from, to, intent_label?}
//   delete_flow_edge {kind, from, to, subkind?, intent_label?}
enum class OpKind { kAddTail, kReviseTail, kDeleteTail, kAddFlowEdge, kLabelEdge, kDeleteFlowEdge };

std::string_view ToString(OpKind k);
std::optional<OpKind> ParseOpKind(std::string_view s);

struct EditOp {
  OpKind op = OpKind::kAddTail;
  nlohmann::json payload = nlohmann::json::object();
  std::string author;
  std::string timestamp;
  // Version the edit was prepared against; unset skips the check.
  std::optional<std::uint64_t> base_version;
};

// Throws ValidationError on a missing or malformed field.
EditOp EditOpFromJson(const nlohmann::json& j);
nlohmann::json ToJson(const EditOp& op);

// Applies the edit or throws without touching the graph: NotFoundError for
// an unknown target, ValidationError for a bad payload or an edge that
// would break the endpoint-category rules. Expert provenance is attached to
// every created or relabeled edge. Returns a summary of what changed.
//
// delete_tail drops the triple; a tail left without incoming triples is
// removed with its flow edges. revise_tail moves the triple to the new
// text, and a tail left orphaned hands its flow edges to the new tail.
nlohmann::json ApplyEdit(graph::Graph& g, const EditOp& op,
                         kb::TailIdentity identity = kb::TailIdentity::kGraphWide);

}  // namespace convkg::edit

#endif  // CONVKG_EDIT_HPP_
