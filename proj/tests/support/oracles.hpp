#ifndef CONVKG_TESTS_ORACLES_HPP_
#define CONVKG_TESTS_ORACLES_HPP_

// Independent reference implementations used to check library results.
// Each one is written from the definition, not from the library code.

#include <cstddef>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "convkg/edges.hpp"
#include "convkg/graph.hpp"
#include "convkg/kb.hpp"
#include "convkg/link.hpp"

namespace convkg::oracle {

// (kind, subkind, from, to) -> sorted provenance list.
using FlowKey = std::tuple<std::string, std::string, std::string, std::string>;
using FlowMultiset = std::map<FlowKey, std::vector<std::pair<std::string, std::vector<std::size_t>>>>;

// Enumerates flow edges by testing every ordered pair of mentions in a
// conversation against the adjacency definitions:
//   next_sub_utterance: same utterance, b directly follows a in
//     (sub-utterance, input position) order;
//   next_utterance: b is in utterance u+1, a is the last mention of u and b
//     the first of u+1 (any a, b with cross_product).
// Pairs linking a head to itself are skipped.
FlowMultiset BruteForceFlows(const std::vector<link::MentionHeadMatch>& matches,
                             edges::EdgeKind kind, bool cross_product);

FlowMultiset ToMultiset(const std::vector<edges::FlowEdge>& edges);

// All-pairs shortest hop counts over undirected edges of the given families.
// Result[i][j] is empty when disconnected. Node order is graph id order.
struct AllPairs {
  std::vector<std::string> ids;
  std::vector<std::vector<std::optional<std::size_t>>> dist;
};
AllPairs FloydWarshall(const graph::Graph& g, graph::FamilySet families);

// Plain dot / (|a||b|).
double NaiveCosine(const std::vector<double>& a, const std::vector<double>& b);

// Index of the candidate with the highest cosine; ties go to the smallest id.
std::optional<std::pair<std::size_t, double>> ExhaustiveArgmax(
    const std::vector<double>& query, const std::vector<std::string>& ids,
    const std::vector<std::vector<double>>& candidates);

// head_id -> triple count, straight from TSV text (deduplicated on
// head text, relation and whitespace-normalized tail).
std::map<std::string, std::size_t> GroupTriplesByHead(const std::string& tsv);

// Random graph with event heads e0..e{n-1} joined by event-flow edges.
graph::Graph RandomFlowGraph(std::size_t nodes, std::size_t edges, std::mt19937_64& rng);

}  // namespace convkg::oracle

#endif  // CONVKG_TESTS_ORACLES_HPP_
