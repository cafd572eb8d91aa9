#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace convkg::oracle {

namespace {

struct Item {
  std::size_t position;  // index in the input
  std::size_t utt;
  std::size_t sub;
  const link::MentionHeadMatch* m;
};

bool Before(const Item& a, const Item& b) {
  return std::tie(a.sub, a.position) < std::tie(b.sub, b.position);
}

std::string Words(const std::string& s) {
  std::istringstream in(s);
  std::string w, out;
  while (in >> w) out += (out.empty() ? "" : " ") + w;
  return out;
}

}  // namespace

FlowMultiset BruteForceFlows(const std::vector<link::MentionHeadMatch>& matches,
                             edges::EdgeKind kind, bool cross_product) {
  std::map<std::string, std::vector<Item>> conversations;
  for (std::size_t i = 0; i < matches.size(); ++i) {
    const auto& s = matches[i].mention.source;
    conversations[s.conversation_id].push_back({i, s.utterance_index, s.sub_index, &matches[i]});
  }
  const bool typed = kind == edges::EdgeKind::kEventFlow;
  const std::string kind_name(edges::ToString(kind));
  FlowMultiset out;
  for (const auto& [conv, items] : conversations) {
    auto is_last = [&](const Item& a) {
      return std::none_of(items.begin(), items.end(),
                          [&](const Item& c) { return c.utt == a.utt && Before(a, c); });
    };
    auto is_first = [&](const Item& b) {
      return std::none_of(items.begin(), items.end(),
                          [&](const Item& c) { return c.utt == b.utt && Before(c, b); });
    };
    for (const Item& a : items) {
      for (const Item& b : items) {
        if (a.position == b.position || a.m->head_id == b.m->head_id) continue;
        std::string sub;
        std::vector<std::size_t> utts;
        if (a.utt == b.utt && Before(a, b)) {
          const bool gap = std::any_of(items.begin(), items.end(), [&](const Item& c) {
            return c.utt == a.utt && Before(a, c) && Before(c, b);
          });
          if (gap) continue;
          sub = "next_sub_utterance";
          utts = {a.utt};
        } else if (b.utt == a.utt + 1 && (cross_product || (is_last(a) && is_first(b)))) {
          sub = "next_utterance";
          utts = {a.utt, b.utt};
        } else {
          continue;
        }
        out[{kind_name, typed ? sub : "", a.m->head_id, b.m->head_id}].emplace_back(conv, utts);
      }
    }
  }
  for (auto& [key, prov] : out) std::sort(prov.begin(), prov.end());
  return out;
}

FlowMultiset ToMultiset(const std::vector<edges::FlowEdge>& edges) {
  FlowMultiset out;
  for (const auto& e : edges) {
    auto& prov = out[{std::string(edges::ToString(e.kind)),
                      e.subkind ? std::string(edges::ToString(*e.subkind)) : "", e.from, e.to}];
    for (const auto& p : e.provenance) prov.emplace_back(p.conversation_id, p.utterances);
    std::sort(prov.begin(), prov.end());
  }
  return out;
}

AllPairs FloydWarshall(const graph::Graph& g, graph::FamilySet families) {
  AllPairs r;
  std::map<std::string, std::size_t> index;
  for (const auto& [id, node] : g.nodes()) {
    index[id] = r.ids.size();
    r.ids.push_back(id);
  }
  const std::size_t n = r.ids.size();
  constexpr std::size_t kInf = static_cast<std::size_t>(-1) / 4;
  std::vector<std::vector<std::size_t>> d(n, std::vector<std::size_t>(n, kInf));
  for (std::size_t i = 0; i < n; ++i) d[i][i] = 0;
  for (const graph::Edge* e : g.Edges()) {
    if (!families.Has(e->family)) continue;
    const std::size_t a = index.at(e->from);
    const std::size_t b = index.at(e->to);
    d[a][b] = d[b][a] = std::min<std::size_t>(d[a][b], 1);
  }
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (d[i][k] + d[k][j] < d[i][j]) d[i][j] = d[i][k] + d[k][j];
      }
    }
  }
  r.dist.assign(n, std::vector<std::optional<std::size_t>>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (d[i][j] < kInf) r.dist[i][j] = d[i][j];
    }
  }
  return r;
}

double NaiveCosine(const std::vector<double>& a, const std::vector<double>& b) {
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

std::optional<std::pair<std::size_t, double>> ExhaustiveArgmax(
    const std::vector<double>& query, const std::vector<std::string>& ids,
    const std::vector<std::vector<double>>& candidates) {
  std::optional<std::pair<std::size_t, double>> best;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const double s = NaiveCosine(query, candidates[i]);
    if (!best || s > best->second || (s == best->second && ids[i] < ids[best->first])) {
      best = std::make_pair(i, s);
    }
  }
  return best;
}

std::map<std::string, std::size_t> GroupTriplesByHead(const std::string& tsv) {
  std::set<std::tuple<std::string, std::string, std::string>> seen;
  std::map<std::string, std::size_t> out;
  std::istringstream in(tsv);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cols;
    std::istringstream fields(line);
    std::string col;
    while (std::getline(fields, col, '\t')) cols.push_back(col);
    if (cols.size() != 5) continue;
    if (seen.insert({cols[0], cols[3], Words(cols[4])}).second) ++out[cols[0]];
  }
  return out;
}

graph::Graph RandomFlowGraph(std::size_t nodes, std::size_t edges, std::mt19937_64& rng) {
  graph::Graph g;
  for (std::size_t i = 0; i < nodes; ++i) {
    g.AddNode({"e" + std::to_string(i), graph::NodeKind::kEventHead, "event " + std::to_string(i)});
  }
  if (nodes < 2) return g;
  std::uniform_int_distribution<std::size_t> pick(0, nodes - 1);
  for (std::size_t k = 0; k < edges; ++k) {
    const std::size_t a = pick(rng);
    const std::size_t b = pick(rng);
    if (a == b) continue;
    graph::Edge e;
    e.family = graph::EdgeFamily::kEventFlow;
    e.subkind = edges::FlowSubkind::kNextUtterance;
    e.from = "e" + std::to_string(a);
    e.to = "e" + std::to_string(b);
    e.provenance.push_back({"c" + std::to_string(k), {0, 1}, "pipeline"});
    e.weight = 1;
    g.AddEdge(std::move(e));
  }
  return g;
}

}  // namespace convkg::oracle
