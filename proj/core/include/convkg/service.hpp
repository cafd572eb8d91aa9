#ifndef CONVKG_SERVICE_HPP_
#define CONVKG_SERVICE_HPP_

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "convkg/edit.hpp"
#include "convkg/graph.hpp"
#include "convkg/link.hpp"

// Graph browsing and editing behind a reader/writer lock, with a durable
// audit log. The HTTP layer in HttpServer is a thin adapter over this.
namespace convkg::service {

struct ServiceOptions {
  // Appended to (and flushed) before an edit is acknowledged; replayed on
  // startup when it exists.
  std::optional<std::filesystem::path> audit_log;
  kb::TailIdentity tail_identity = kb::TailIdentity::kGraphWide;
  // Scenario id -> matches, for /scenarios/{id}/graph.
  std::map<std::string, std::vector<link::MentionHeadMatch>> scenario_matches;
  double scenario_fraction = 0.005;
};

class GraphService {
 public:
  // Throws when the audit log cannot be replayed onto `g`.
  GraphService(graph::Graph g, ServiceOptions options = {});

  std::uint64_t version() const;

  nlohmann::json Health() const;
  // NotFoundError for unknown ids.
  nlohmann::json GetNode(std::string_view id) const;
  nlohmann::json Neighbors(std::string_view id, graph::FamilySet families,
                           graph::Direction direction) const;
  nlohmann::json Search(std::string_view query, std::size_t limit = 50) const;
  nlohmann::json Stats() const;
  nlohmann::json ScenarioGraph(std::string_view scenario_id) const;
  // Audit entries with version > since.
  nlohmann::json Edits(std::uint64_t since = 0) const;

  // Applies an edit under the writer lock. ConflictError when base_version
  // is set and stale; otherwise as edit::ApplyEdit. The log entry is
  // flushed before this returns.
  nlohmann::json Submit(edit::EditOp op);

  // Canonical serialization of the current graph.
  std::string Snapshot() const;

 private:
  mutable std::shared_mutex mu_;
  graph::Graph graph_;
  ServiceOptions options_;
  std::vector<nlohmann::json> log_;
  std::ofstream log_out_;
};

// Audit log entry: {version, op, payload, author, timestamp, base_version}.
std::vector<edit::EditOp> ReadAuditLog(const std::filesystem::path& path);

// Replays a log onto a graph; throws on the first failing entry.
void Replay(graph::Graph& g, const std::vector<edit::EditOp>& ops,
            kb::TailIdentity identity = kb::TailIdentity::kGraphWide);

struct HttpOptions {
  // When non-empty, POST /edits requires "Authorization: Bearer <token>".
  std::string token;
};

// GET /health, /nodes/{id}, /nodes/{id}/neighbors?kinds=&direction=,
// /search?q=&limit=, /scenarios/{id}/graph, /stats, /edits?since=;
// POST /edits. Errors are {"error", "field"?, "current_version"?} with
// status 400 (bad JSON), 401, 404, 409 or 422.
class HttpServer {
 public:
  HttpServer(GraphService& service, HttpOptions options = {});
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Binds; port 0 picks a free port. Returns the bound port. Throws Error
  // on bind failure.
  int Bind(const std::string& host, int port);
  // Serves until Stop(). Call after Bind.
  void Listen();
  // Bind + Listen on a background thread.
  int Start(const std::string& host, int port);
  void Stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace convkg::service

#endif  // CONVKG_SERVICE_HPP_
