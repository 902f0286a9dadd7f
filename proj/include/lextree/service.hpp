#pragma once

#include "lextree/binarize.hpp"
#include "lextree/document.hpp"
#include "lextree/engine.hpp"

#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>

namespace lextree::service {

struct Request {
    std::string method; // GET, POST
    std::string path;
    std::string body;
};

struct Response {
    int status = 200;
    std::string body; // JSON
};

using Clock = std::function<std::chrono::steady_clock::time_point()>;

struct Options {
    std::chrono::seconds idle_timeout = std::chrono::hours(24);
    Clock clock = [] { return std::chrono::steady_clock::now(); };
};

/// JSON API over one read-only compiled tree.
///
///     GET  /api/tree                  compiled tree + stats
///     POST /api/check                 analysis report (needs the source document)
///     POST /api/eval                  {facts, lenient?} -> trace
///     POST /api/session               {replay?} -> {session_id, version, status, answered}
///     GET  /api/session/{id}
///     POST /api/session/{id}/answer   {version, reply}
///     POST /api/session/{id}/undo     {version}
///     POST /api/session/{id}/what_if  {reply} -> preview, no state change
///
/// Updates must name the session's current version; a stale version gets
/// 409. Errors are `{error_code, message}` with 400/404/409/422 statuses.
/// Sessions idle for longer than the timeout are dropped; clients restore
/// them by replaying their answer list.
class Service {
public:
    Service(std::shared_ptr<const binarize::CompiledTree> tree, std::optional<Document> document, Options options = {});

    Response handle(const Request& request);

    std::size_t session_count() const;

private:
    struct Entry {
        engine::Session session;
        std::uint64_t version = 0;
        std::chrono::steady_clock::time_point last_used;
    };

    Response tree_info() const;
    Response check();
    Response eval(const std::string& body) const;
    Response create_session(const std::string& body);
    Response get_session(const std::string& id);
    Response update_session(const std::string& id, const std::string& action, const std::string& body);

    std::string new_session_id();
    void evict_idle();

    std::shared_ptr<const binarize::CompiledTree> tree_;
    std::optional<Document> document_;
    Options options_;

    mutable std::mutex mutex_;
    std::map<std::string, Entry> sessions_;
    std::optional<std::string> cached_report_;
};

/// HTTP status for an error code.
int http_status(ErrorCode code);

struct ServeOptions {
    std::string host = "127.0.0.1";
    int port = 8080;
    std::optional<std::string> cors_origin;
};

/// Blocking HTTP front end; logs one line per request to `log`.
class HttpServer {
public:
    HttpServer(Service& service, ServeOptions options, std::ostream& log);
    ~HttpServer();

    HttpServer(const HttpServer&) = delete;
    HttpServer& operator=(const HttpServer&) = delete;

    /// Binds to options.port (0 picks a free port); returns the bound port or -1.
    int bind();
    /// Serves until stop().
    bool run();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace lextree::service
