#include <charconv>
#include <string>
#include <thread>

#include "httplib.h"

#include "convkg/embedding.hpp"
#include "convkg/error.hpp"
#include "convkg/service.hpp"
#include "convkg/translation.hpp"

namespace convkg {

using nlohmann::json;

namespace {

struct Url {
  std::string host;
  int port = 80;
  std::string path;
};

Url ParseUrl(const std::string& endpoint) {
  constexpr std::string_view kScheme = "http://";
  if (endpoint.rfind(kScheme, 0) != 0) {
    throw ValidationError("endpoint", "only http:// endpoints are supported: " + endpoint);
  }
  std::string rest = endpoint.substr(kScheme.size());
  Url url;
  const auto slash = rest.find('/');
  url.path = slash == std::string::npos ? "/" : rest.substr(slash);
  std::string authority = rest.substr(0, slash);
  const auto colon = authority.rfind(':');
  if (colon != std::string::npos) {
    const std::string port = authority.substr(colon + 1);
    auto [p, ec] = std::from_chars(port.data(), port.data() + port.size(), url.port);
    if (ec != std::errc() || p != port.data() + port.size() || url.port <= 0 || url.port > 65535) {
      throw ValidationError("endpoint", "bad port in " + endpoint);
    }
    authority.resize(colon);
  }
  if (authority.empty()) throw ValidationError("endpoint", "missing host in " + endpoint);
  url.host = authority;
  return url;
}

json PostJson(const std::string& endpoint, const std::string& token, int timeout_seconds,
              const json& body) {
  const Url url = ParseUrl(endpoint);
  httplib::Client client(url.host, url.port);
  client.set_connection_timeout(timeout_seconds, 0);
  client.set_read_timeout(timeout_seconds, 0);
  client.set_write_timeout(timeout_seconds, 0);
  httplib::Headers headers;
  if (!token.empty()) headers.emplace("Authorization", "Bearer " + token);
  auto res = client.Post(url.path, headers, body.dump(), "application/json");
  if (!res) {
    throw RetriableError("request to " + endpoint + " failed: " + httplib::to_string(res.error()));
  }
  if (res->status == 429 || res->status >= 500) {
    throw RetriableError("request to " + endpoint + " returned " + std::to_string(res->status));
  }
  if (res->status != 200) {
    throw Error("request to " + endpoint + " returned " + std::to_string(res->status));
  }
  try {
    return json::parse(res->body);
  } catch (const json::exception& e) {
    throw Error("bad JSON from " + endpoint + ": " + e.what());
  }
}

}  // namespace

namespace kb {

HttpTranslationClient::HttpTranslationClient(std::string endpoint, std::string token,
                                             int timeout_seconds)
    : endpoint_(std::move(endpoint)), token_(std::move(token)), timeout_seconds_(timeout_seconds) {
  ParseUrl(endpoint_);
}

std::string HttpTranslationClient::Translate(std::string_view text) {
  const json res = PostJson(endpoint_, token_, timeout_seconds_, json{{"text", text}});
  if (!res.is_object() || !res.contains("translation") || !res["translation"].is_string()) {
    throw Error("translation response from " + endpoint_ + " lacks a 'translation' string");
  }
  return res["translation"].get<std::string>();
}

}  // namespace kb

namespace embed {

HttpEmbeddingProvider::HttpEmbeddingProvider(std::string endpoint, std::size_t dim,
                                             std::string token, int timeout_seconds)
    : endpoint_(std::move(endpoint)),
      dim_(dim),
      token_(std::move(token)),
      timeout_seconds_(timeout_seconds) {
  if (dim_ == 0) throw ValidationError("dim", "must be positive");
  ParseUrl(endpoint_);
}

std::vector<Vector> HttpEmbeddingProvider::Embed(const std::vector<std::string>& texts) {
  if (texts.empty()) return {};
  const json res = PostJson(endpoint_, token_, timeout_seconds_, json{{"texts", texts}});
  if (!res.is_object() || !res.contains("vectors") || !res["vectors"].is_array() ||
      res["vectors"].size() != texts.size()) {
    throw Error("embedding response from " + endpoint_ + " has the wrong number of vectors");
  }
  std::vector<Vector> out;
  out.reserve(texts.size());
  for (const auto& v : res["vectors"]) {
    if (!v.is_array() || v.size() != dim_) {
      throw Error("embedding response from " + endpoint_ + " has a vector of the wrong dimension");
    }
    out.push_back(v.get<Vector>());
  }
  return out;
}

}  // namespace embed

namespace service {

struct HttpServer::Impl {
  GraphService& service;
  HttpOptions options;
  httplib::Server server;
  std::thread thread;
  bool bound = false;

  Impl(GraphService& s, HttpOptions o) : service(s), options(std::move(o)) { Routes(); }

  static void Reply(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
  }

  template <typename Fn>
  static httplib::Server::Handler Guard(Fn fn) {
    return [fn](const httplib::Request& req, httplib::Response& res) {
      try {
        Reply(res, 200, fn(req));
      } catch (const ConflictError& e) {
        Reply(res, 409, {{"error", e.what()}, {"current_version", e.current_version()}});
      } catch (const NotFoundError& e) {
        Reply(res, 404, {{"error", e.what()}});
      } catch (const ValidationError& e) {
        json body{{"error", e.what()}};
        if (!e.field().empty()) body["field"] = e.field();
        Reply(res, 422, body);
      } catch (const json::exception& e) {
        Reply(res, 400, {{"error", std::string("malformed JSON: ") + e.what()}});
      } catch (const std::exception& e) {
        Reply(res, 500, {{"error", e.what()}});
      }
    };
  }

  static std::uint64_t ParseCount(const httplib::Request& req, const char* name,
                                  std::uint64_t fallback) {
    if (!req.has_param(name)) return fallback;
    const std::string v = req.get_param_value(name);
    std::uint64_t n = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), n);
    if (ec != std::errc() || p != v.data() + v.size()) {
      throw ValidationError(name, "expected a non-negative integer");
    }
    return n;
  }

  void Routes() {
    server.Get("/health", Guard([this](const httplib::Request&) { return service.Health(); }));
    server.Get("/stats", Guard([this](const httplib::Request&) { return service.Stats(); }));
    server.Get(R"(/nodes/(.+)/neighbors)", Guard([this](const httplib::Request& req) {
                 auto dir = graph::Direction::kBoth;
                 if (req.has_param("direction")) {
                   auto d = graph::ParseDirection(req.get_param_value("direction"));
                   if (!d) throw ValidationError("direction", "expected out, in or both");
                   dir = *d;
                 }
                 return service.Neighbors(req.matches[1].str(),
                                          graph::FamilySet::Parse(req.get_param_value("kinds")),
                                          dir);
               }));
    server.Get(R"(/nodes/(.+))", Guard([this](const httplib::Request& req) {
                 return service.GetNode(req.matches[1].str());
               }));
    server.Get("/search", Guard([this](const httplib::Request& req) {
                 return service.Search(req.get_param_value("q"), ParseCount(req, "limit", 50));
               }));
    server.Get(R"(/scenarios/([^/]+)/graph)", Guard([this](const httplib::Request& req) {
                 return service.ScenarioGraph(req.matches[1].str());
               }));
    server.Get("/edits", Guard([this](const httplib::Request& req) {
                 return service.Edits(ParseCount(req, "since", 0));
               }));
    server.Post("/edits", [this](const httplib::Request& req, httplib::Response& res) {
      if (!options.token.empty() &&
          req.get_header_value("Authorization") != "Bearer " + options.token) {
        Reply(res, 401, {{"error", "missing or invalid bearer token"}});
        return;
      }
      Guard([this](const httplib::Request& r) {
        return service.Submit(edit::EditOpFromJson(json::parse(r.body)));
      })(req, res);
    });
  }
};

HttpServer::HttpServer(GraphService& service, HttpOptions options)
    : impl_(std::make_unique<Impl>(service, std::move(options))) {}

HttpServer::~HttpServer() { Stop(); }

int HttpServer::Bind(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = impl_->server.bind_to_any_port(host);
  } else if (!impl_->server.bind_to_port(host, port)) {
    bound = -1;
  }
  if (bound < 0) throw Error("cannot bind " + host + ":" + std::to_string(port));
  impl_->bound = true;
  return bound;
}

void HttpServer::Listen() {
  if (!impl_->bound) throw Error("Listen called before Bind");
  impl_->server.listen_after_bind();
}

int HttpServer::Start(const std::string& host, int port) {
  const int bound = Bind(host, port);
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return bound;
}

void HttpServer::Stop() {
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace service
}  // namespace convkg
