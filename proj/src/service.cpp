#include "lextree/service.hpp"

#include "lextree/json_io.hpp"

#include <httplib.h>

#include <iomanip>
#include <random>
#include <sstream>

namespace lextree::service {

using dsl::Json;

int http_status(ErrorCode code) {
    switch (code) {
    case ErrorCode::UnknownSession:
    case ErrorCode::NotFound: return 404;
    case ErrorCode::MethodNotAllowed: return 405;
    case ErrorCode::VersionConflict: return 409;
    case ErrorCode::SessionFinished:
    case ErrorCode::NothingToUndo:
    case ErrorCode::MissingFact:
    case ErrorCode::DocumentUnavailable:
    case ErrorCode::StateSpaceTooLarge:
    case ErrorCode::ConflictDetected: return 422;
    default: return 400;
    }
}

namespace {

Response json_response(const Json& j, int status = 200) { return {status, j.dump() + "\n"}; }

Response error_response(ErrorCode code, const std::string& message) {
    Json j{{"format_version", dsl::kFormatVersion}, {"error_code", to_string(code)}, {"message", message}};
    return json_response(j, http_status(code));
}

[[noreturn]] void bad_request(ErrorCode code, const std::string& message) { throw Error(code, message); }

// Parses a request body, accepting an empty body as `{}`; a present
// format_version must be 1 and only the listed fields may appear.
Json parse_body(const std::string& body, std::initializer_list<std::string_view> allowed) {
    if (body.find_first_not_of(" \t\r\n") == std::string::npos) return Json::object();
    Json j = Json::parse(body, nullptr, false);
    if (j.is_discarded() || !j.is_object()) bad_request(ErrorCode::BadRequest, "request body must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        if (key == "format_version") {
            if (!value.is_number_integer() || value.get<std::int64_t>() != dsl::kFormatVersion)
                bad_request(ErrorCode::BadVersion, "unsupported format_version");
            continue;
        }
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            bad_request(ErrorCode::SchemaViolation, "unknown field '" + key + "'");
    }
    return j;
}

bool parse_reply(const Json& j) {
    if (!j.is_string()) bad_request(ErrorCode::BadRequest, "reply must be \"yes\" or \"no\"");
    auto s = j.get<std::string>();
    if (s != "yes" && s != "no") bad_request(ErrorCode::BadRequest, "reply must be \"yes\" or \"no\"");
    return s == "yes";
}

std::uint64_t parse_version(const Json& body) {
    auto it = body.find("version");
    if (it == body.end() || !it->is_number_unsigned()) bad_request(ErrorCode::BadRequest, "version is required");
    return it->get<std::uint64_t>();
}

std::vector<std::string> split_path(const std::string& path) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : path.substr(0, path.find('?'))) {
        if (c == '/') {
            if (!cur.empty()) parts.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) parts.push_back(std::move(cur));
    return parts;
}

} // namespace

Service::Service(std::shared_ptr<const binarize::CompiledTree> tree, std::optional<Document> document, Options options)
    : tree_(std::move(tree)), document_(std::move(document)), options_(std::move(options)) {}

std::size_t Service::session_count() const {
    std::lock_guard lock(mutex_);
    return sessions_.size();
}

Response Service::handle(const Request& request) {
    try {
        auto parts = split_path(request.path);
        if (parts.size() < 2 || parts[0] != "api") return error_response(ErrorCode::NotFound, "no such endpoint");
        const std::string& m = request.method;
        auto require = [&](std::string_view method) {
            if (m != method) bad_request(ErrorCode::MethodNotAllowed, "use " + std::string(method) + " for this endpoint");
        };

        if (parts.size() == 2 && parts[1] == "tree") {
            require("GET");
            return tree_info();
        }
        if (parts.size() == 2 && parts[1] == "check") {
            require("POST");
            parse_body(request.body, {});
            return check();
        }
        if (parts.size() == 2 && parts[1] == "eval") {
            require("POST");
            return eval(request.body);
        }
        if (parts[1] == "session") {
            if (parts.size() == 2) {
                require("POST");
                return create_session(request.body);
            }
            if (parts.size() == 3) {
                require("GET");
                return get_session(parts[2]);
            }
            if (parts.size() == 4) {
                require("POST");
                return update_session(parts[2], parts[3], request.body);
            }
        }
        return error_response(ErrorCode::NotFound, "no such endpoint");
    } catch (const Error& e) {
        return error_response(e.code(), e.what());
    }
}

Response Service::tree_info() const {
    return json_response(Json{{"format_version", dsl::kFormatVersion},
                              {"tree", dsl::to_json(*tree_)},
                              {"stats", dsl::to_json(tree_->stats())}});
}

Response Service::check() {
    if (!document_) bad_request(ErrorCode::DocumentUnavailable, "server was started from a compiled tree; no document to analyze");
    std::lock_guard lock(mutex_);
    if (!cached_report_) cached_report_ = dsl::to_json(binarize::analyze(*document_)).dump() + "\n";
    return {200, *cached_report_};
}

Response Service::eval(const std::string& body) const {
    Json j = parse_body(body, {"facts", "lenient"});
    auto facts = j.find("facts");
    if (facts == j.end()) bad_request(ErrorCode::BadRequest, "facts are required");
    bool lenient = false;
    if (auto it = j.find("lenient"); it != j.end()) {
        if (!it->is_boolean()) bad_request(ErrorCode::BadRequest, "lenient must be a boolean");
        lenient = it->get<bool>();
    }
    auto trace = engine::evaluate(*tree_, dsl::facts_from_json(*facts),
                                  lenient ? engine::FactMode::Lenient : engine::FactMode::Strict);
    return json_response(dsl::to_json(trace));
}

namespace {

Json session_json(const std::string& id, std::uint64_t version, const engine::Session& s) {
    Json answered = Json::array();
    for (const auto& step : s.answered()) answered.push_back(dsl::to_json(step));
    return Json{{"format_version", dsl::kFormatVersion},
                {"session_id", id},
                {"version", version},
                {"status", dsl::to_json(s.status())},
                {"answered", answered}};
}

// Entries are `{literal, answer, node?}`, the shape of the `answered` list.
std::vector<engine::ReplayStep> parse_replay(const Json& j) {
    if (!j.is_array()) bad_request(ErrorCode::BadRequest, "replay must be an array");
    std::vector<engine::ReplayStep> steps;
    for (const auto& item : j) {
        if (!item.is_object()) bad_request(ErrorCode::BadRequest, "replay entries must be objects");
        for (const auto& [key, _] : item.items())
            if (key != "literal" && key != "answer" && key != "node")
                bad_request(ErrorCode::SchemaViolation, "unknown replay field '" + key + "'");
        if (!item.contains("literal") || !item.contains("answer"))
            bad_request(ErrorCode::BadRequest, "replay entries need literal and answer");
        if (item.contains("node") && !item["node"].is_number_unsigned())
            bad_request(ErrorCode::BadRequest, "node must be an index");
        steps.push_back({dsl::literal_from_json(item["literal"]), parse_reply(item["answer"])});
    }
    return steps;
}

} // namespace

std::string Service::new_session_id() {
    static thread_local std::mt19937_64 rng{std::random_device{}()};
    std::ostringstream out;
    out << std::hex << std::setfill('0') << std::setw(16) << rng() << std::setw(16) << rng();
    return out.str();
}

void Service::evict_idle() {
    auto now = options_.clock();
    for (auto it = sessions_.begin(); it != sessions_.end();) {
        if (now - it->second.last_used > options_.idle_timeout) it = sessions_.erase(it);
        else ++it;
    }
}

Response Service::create_session(const std::string& body) {
    Json j = parse_body(body, {"replay"});
    std::string id = new_session_id();
    engine::Session s = engine::start(tree_, id);
    if (auto it = j.find("replay"); it != j.end()) {
        auto steps = parse_replay(*it);
        s = engine::replay(tree_, steps, id);
        for (std::size_t i = 0; i < steps.size(); ++i) {
            const auto& node = (*it)[i];
            if (node.contains("node") && node["node"].get<binarize::NodeIndex>() != s.answered()[i].node)
                bad_request(ErrorCode::ReplayMismatch, "replay step " + std::to_string(i) + " names the wrong node");
        }
    }
    std::lock_guard lock(mutex_);
    evict_idle();
    sessions_.emplace(id, Entry{s, 0, options_.clock()});
    return json_response(session_json(id, 0, s), 201);
}

Response Service::get_session(const std::string& id) {
    std::lock_guard lock(mutex_);
    evict_idle();
    auto it = sessions_.find(id);
    if (it == sessions_.end()) bad_request(ErrorCode::UnknownSession, "unknown session '" + id + "'");
    it->second.last_used = options_.clock();
    return json_response(session_json(id, it->second.version, it->second.session));
}

Response Service::update_session(const std::string& id, const std::string& action, const std::string& body) {
    if (action != "answer" && action != "undo" && action != "what_if")
        return error_response(ErrorCode::NotFound, "no such endpoint");

    Json j = action == "answer" ? parse_body(body, {"version", "reply"})
             : action == "undo" ? parse_body(body, {"version"})
                                : parse_body(body, {"reply", "version"});

    std::lock_guard lock(mutex_);
    evict_idle();
    auto it = sessions_.find(id);
    if (it == sessions_.end()) bad_request(ErrorCode::UnknownSession, "unknown session '" + id + "'");
    Entry& entry = it->second;
    entry.last_used = options_.clock();

    if (action == "what_if") {
        if (!j.contains("reply")) bad_request(ErrorCode::BadRequest, "reply is required");
        auto preview = engine::what_if(entry.session, parse_reply(j["reply"]));
        return json_response(Json{{"format_version", dsl::kFormatVersion},
                                  {"session_id", id},
                                  {"version", entry.version},
                                  {"preview", dsl::to_json(preview)}});
    }

    std::uint64_t version = parse_version(j);
    if (version != entry.version)
        bad_request(ErrorCode::VersionConflict, "session is at version " + std::to_string(entry.version) +
                                                    ", request names version " + std::to_string(version));
    if (action == "answer") {
        if (!j.contains("reply")) bad_request(ErrorCode::BadRequest, "reply is required");
        entry.session = engine::answer(entry.session, parse_reply(j["reply"]));
    } else {
        entry.session = engine::undo(entry.session);
    }
    ++entry.version;
    return json_response(session_json(id, entry.version, entry.session));
}

struct HttpServer::Impl {
    Service& service;
    ServeOptions options;
    std::ostream& log;
    std::mutex log_mutex;
    httplib::Server server;

    Impl(Service& s, ServeOptions o, std::ostream& l) : service(s), options(std::move(o)), log(l) {}
};

HttpServer::HttpServer(Service& service, ServeOptions options, std::ostream& log)
    : impl_(std::make_unique<Impl>(service, std::move(options), log)) {
    auto& svr = impl_->server;
    Impl* impl = impl_.get();

    if (impl->options.cors_origin) {
        svr.set_default_headers({{"Access-Control-Allow-Origin", *impl->options.cors_origin},
                                 {"Vary", "Origin"}});
        svr.Options(".*", [](const httplib::Request&, httplib::Response& res) {
            res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
            res.set_header("Access-Control-Allow-Headers", "Content-Type");
            res.status = 204;
        });
    }

    auto forward = [impl](const httplib::Request& req, httplib::Response& res) {
        Response r = impl->service.handle({req.method, req.path, req.body});
        res.status = r.status;
        res.set_content(r.body, "application/json");
    };
    svr.Get(".*", forward);
    svr.Post(".*", forward);

    svr.set_logger([impl](const httplib::Request& req, const httplib::Response& res) {
        std::lock_guard lock(impl->log_mutex);
        impl->log << req.method << " " << req.path << " " << res.status << "\n" << std::flush;
    });
}

HttpServer::~HttpServer() = default;

int HttpServer::bind() {
    auto& o = impl_->options;
    if (o.port == 0) return impl_->server.bind_to_any_port(o.host);
    return impl_->server.bind_to_port(o.host, o.port) ? o.port : -1;
}

bool HttpServer::run() { return impl_->server.listen_after_bind(); }

void HttpServer::stop() { impl_->server.stop(); }

} // namespace lextree::service
