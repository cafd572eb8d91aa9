#include "convkg/service.hpp"

#include <chrono>
#include <ctime>
#include <mutex>

#include "convkg/error.hpp"
#include "convkg/io.hpp"

namespace convkg::service {

using nlohmann::json;

namespace {

std::string UtcNow() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json LogEntry(const edit::EditOp& op, std::uint64_t version) {
  json j = edit::ToJson(op);
  j["version"] = version;
  return j;
}

}  // namespace

std::vector<edit::EditOp> ReadAuditLog(const std::filesystem::path& path) {
  std::vector<edit::EditOp> ops;
  const auto records = io::ReadJsonLines(path);
  for (std::size_t i = 0; i < records.size(); ++i) {
    try {
      if (records[i].value("version", std::uint64_t{0}) != i + 1) {
        throw ValidationError("version", "expected " + std::to_string(i + 1));
      }
      ops.push_back(edit::EditOpFromJson(records[i]));
    } catch (const ValidationError& e) {
      throw ParseError(path.string(), i + 1, e.field(), e.what());
    }
  }
  return ops;
}

void Replay(graph::Graph& g, const std::vector<edit::EditOp>& ops, kb::TailIdentity identity) {
  for (std::size_t i = 0; i < ops.size(); ++i) {
    try {
      edit::ApplyEdit(g, ops[i], identity);
    } catch (const Error& e) {
      throw Error("replaying edit " + std::to_string(i + 1) + " failed: " + e.what());
    }
  }
}

GraphService::GraphService(graph::Graph g, ServiceOptions options)
    : graph_(std::move(g)), options_(std::move(options)) {
  if (!options_.audit_log) return;
  const auto& path = *options_.audit_log;
  if (std::filesystem::exists(path)) {
    const auto ops = ReadAuditLog(path);
    Replay(graph_, ops, options_.tail_identity);
    for (std::size_t i = 0; i < ops.size(); ++i) log_.push_back(LogEntry(ops[i], i + 1));
  }
  log_out_.open(path, std::ios::app | std::ios::binary);
  if (!log_out_) throw Error("cannot open audit log " + path.string());
}

std::uint64_t GraphService::version() const {
  std::shared_lock lock(mu_);
  return log_.size();
}

json GraphService::Health() const {
  std::shared_lock lock(mu_);
  return json{{"status", "ok"}, {"version", log_.size()}, {"nodes", graph_.nodes().size()},
              {"edges", graph_.edge_count()}};
}

json GraphService::GetNode(std::string_view id) const {
  std::shared_lock lock(mu_);
  const graph::Node* n = graph_.FindNode(id);
  if (n == nullptr) throw NotFoundError("unknown node '" + std::string(id) + "'");
  json categories = json::array();
  for (auto c : graph_.TailCategories(id)) categories.push_back(kb::ToString(c));
  const auto out = graph_.Neighbors(id, graph::FamilySet::All(), graph::Direction::kOut).size();
  const auto in = graph_.Neighbors(id, graph::FamilySet::All(), graph::Direction::kIn).size();
  return json{{"node", graph::ToJson(*n)},
              {"tail_categories", std::move(categories)},
              {"degree", {{"out", out}, {"in", in}}},
              {"version", log_.size()}};
}

json GraphService::Neighbors(std::string_view id, graph::FamilySet families,
                             graph::Direction direction) const {
  std::shared_lock lock(mu_);
  if (!graph_.HasNode(id)) throw NotFoundError("unknown node '" + std::string(id) + "'");
  json list = json::array();
  for (const auto& n : graph_.Neighbors(id, families, direction)) {
    list.push_back({{"edge", graph::ToJson(*n.edge)},
                    {"node", graph::ToJson(*n.node)},
                    {"direction", n.outgoing ? "out" : "in"}});
  }
  return json{{"id", std::string(id)}, {"neighbors", std::move(list)}, {"version", log_.size()}};
}

json GraphService::Search(std::string_view query, std::size_t limit) const {
  std::shared_lock lock(mu_);
  json results = json::array();
  for (const graph::Node* n : graph_.Search(query, limit)) results.push_back(graph::ToJson(*n));
  return json{{"query", std::string(query)}, {"results", std::move(results)}};
}

json GraphService::Stats() const {
  std::shared_lock lock(mu_);
  json j = graph::ToJson(graph_.stats());
  j["version"] = log_.size();
  return j;
}

json GraphService::ScenarioGraph(std::string_view scenario_id) const {
  std::shared_lock lock(mu_);
  auto it = options_.scenario_matches.find(std::string(scenario_id));
  if (it == options_.scenario_matches.end()) {
    throw NotFoundError("unknown scenario '" + std::string(scenario_id) + "'");
  }
  return graph::ToJson(
      graph::ScenarioSubgraph(graph_, it->first, it->second, options_.scenario_fraction));
}

json GraphService::Edits(std::uint64_t since) const {
  std::shared_lock lock(mu_);
  json list = json::array();
  for (std::size_t i = static_cast<std::size_t>(std::min<std::uint64_t>(since, log_.size()));
       i < log_.size(); ++i) {
    list.push_back(log_[i]);
  }
  return json{{"version", log_.size()}, {"edits", std::move(list)}};
}

json GraphService::Submit(edit::EditOp op) {
  std::unique_lock lock(mu_);
  const std::uint64_t current = log_.size();
  if (op.base_version && *op.base_version != current) {
    throw ConflictError(current, "edit prepared against version " + std::to_string(*op.base_version) +
                                     ", current version is " + std::to_string(current));
  }
  if (op.timestamp.empty()) op.timestamp = UtcNow();
  if (options_.audit_log && !log_out_) throw Error("audit log is not writable");
  json result = edit::ApplyEdit(graph_, op, options_.tail_identity);
  const std::uint64_t version = current + 1;
  json entry = LogEntry(op, version);
  if (options_.audit_log) {
    log_out_ << io::DumpLine(entry) << '\n';
    log_out_.flush();
    if (!log_out_) throw Error("failed to append to the audit log");
  }
  log_.push_back(std::move(entry));
  return json{{"version", version}, {"result", std::move(result)}};
}

std::string GraphService::Snapshot() const {
  std::shared_lock lock(mu_);
  return graph::Serialize(graph_);
}

}  // namespace convkg::service
