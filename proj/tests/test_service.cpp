#include "lextree/json_io.hpp"
#include "lextree/service.hpp"
#include "support.hpp"

#include <doctest.h>
#include <httplib.h>

#include <thread>

using namespace lextree;
using namespace lextree::service;
using Json = dsl::Json;

namespace {

struct Fixture {
    std::chrono::steady_clock::time_point now{};
    Service svc;

    explicit Fixture(const char* name = "vietnam.lex")
        : svc(std::make_shared<const binarize::CompiledTree>(binarize::compile(testing::load_fixture(name))),
              testing::load_fixture(name), Options{std::chrono::hours(24), [this] { return now; }}) {}

    Json call(const std::string& method, const std::string& path, const std::string& body, int expect) {
        auto r = svc.handle({method, path, body});
        CHECK_MESSAGE(r.status == expect, r.body);
        return Json::parse(r.body);
    }
    Json post(const std::string& path, const Json& body, int expect = 200) {
        return call("POST", path, body.dump(), expect);
    }
    Json get(const std::string& path, int expect = 200) { return call("GET", path, "", expect); }
};

Json versioned(Json j) {
    j["format_version"] = 1;
    return j;
}

} // namespace

TEST_CASE("tree endpoint returns the compiled tree and its stats") {
    Fixture f;
    auto j = f.get("/api/tree");
    CHECK(j["format_version"] == 1);
    CHECK(j["tree"]["kind"] == "compiled_tree");
    CHECK(j["stats"]["internal_nodes"] == 3);
    CHECK(j["stats"]["leaves"] == 4);
    CHECK(j["tree"]["nodes"].size() == 7);
}

TEST_CASE("check returns the analysis report") {
    Fixture f;
    auto j = f.post("/api/check", versioned({}));
    CHECK(j["kind"] == "analysis_report");
    CHECK(j["conflicts"].empty());
    CHECK(j["shadowed"].size() == 3);
}

TEST_CASE("check needs the source document") {
    auto tree = std::make_shared<const binarize::CompiledTree>(binarize::compile(testing::load_fixture("vietnam.lex")));
    Service svc(tree, std::nullopt);
    auto r = svc.handle({"POST", "/api/check", ""});
    CHECK(r.status == 422);
    CHECK(Json::parse(r.body)["error_code"] == "DocumentUnavailable");
}

TEST_CASE("eval returns a trace") {
    Fixture f;
    auto j = f.post("/api/eval", versioned({{"facts", {{"natural_person", false}}}}));
    CHECK(j["outcome"]["consequence"] == "NO_WILL_RIGHT");
    CHECK(j["steps"].size() == 1);
    auto missing = f.post("/api/eval", versioned({{"facts", Json::object()}}), 422);
    CHECK(missing["error_code"] == "MissingFact");
    auto typo = f.post("/api/eval", versioned({{"facts", {{"natural_person", false}, {"x", true}}}}), 400);
    CHECK(typo["error_code"] == "UnknownPredicate");
    f.post("/api/eval", versioned({{"facts", {{"natural_person", false}, {"x", true}}}, {"lenient", true}}));
}

TEST_CASE("a consultation with answer, undo and what_if") {
    Fixture f;
    auto created = f.post("/api/session", versioned({}), 201);
    std::string id = created["session_id"];
    CHECK(created["version"] == 0);
    CHECK(created["status"]["state"] == "awaiting_answer");
    CHECK(created["status"]["prompt"] == "Is the testator a natural person?");
    std::string base = "/api/session/" + id;

    auto preview = f.post(base + "/what_if", versioned({{"reply", "no"}}));
    CHECK(preview["preview"]["outcome"]["text"] == "No right to make a will");
    CHECK(f.get(base)["version"] == 0);

    auto answered = f.post(base + "/answer", versioned({{"version", 0}, {"reply", "no"}}));
    CHECK(answered["version"] == 1);
    CHECK(answered["status"]["state"] == "done");
    CHECK(answered["status"]["outcome"]["text"] == "No right to make a will");
    CHECK(answered["answered"].size() == 1);

    auto again = f.post(base + "/answer", versioned({{"version", 1}, {"reply", "yes"}}), 422);
    CHECK(again["error_code"] == "SessionFinished");

    auto undone = f.post(base + "/undo", versioned({{"version", 1}}));
    CHECK(undone["version"] == 2);
    CHECK(undone["status"] == created["status"]);
    CHECK(undone["answered"].empty());

    auto nothing = f.post(base + "/undo", versioned({{"version", 2}}), 422);
    CHECK(nothing["error_code"] == "NothingToUndo");
}

TEST_CASE("stale versions are rejected") {
    Fixture f;
    std::string id = f.post("/api/session", versioned({}), 201)["session_id"];
    std::string base = "/api/session/" + id;
    f.post(base + "/answer", versioned({{"version", 0}, {"reply", "yes"}}));
    auto stale = f.post(base + "/answer", versioned({{"version", 0}, {"reply", "yes"}}), 409);
    CHECK(stale["error_code"] == "VersionConflict");
    CHECK(f.get(base)["version"] == 1);
    f.post(base + "/undo", versioned({}), 400);
}

TEST_CASE("replay restores a session from its answered list") {
    Fixture f;
    std::string id = f.post("/api/session", versioned({}), 201)["session_id"];
    auto s = f.post("/api/session/" + id + "/answer", versioned({{"version", 0}, {"reply", "yes"}}));
    auto restored = f.post("/api/session", versioned({{"replay", s["answered"]}}), 201);
    CHECK(restored["status"] == s["status"]);
    CHECK(restored["answered"] == s["answered"]);
    CHECK(restored["session_id"] != s["session_id"]);

    Json bad = s["answered"];
    bad[0]["literal"]["predicate"] = "age_bracket";
    bad[0]["literal"]["value"] = "over_18";
    CHECK(f.post("/api/session", versioned({{"replay", bad}}), 400)["error_code"] == "ReplayMismatch");
    Json wrong_node = s["answered"];
    wrong_node[0]["node"] = 5;
    CHECK(f.post("/api/session", versioned({{"replay", wrong_node}}), 400)["error_code"] == "ReplayMismatch");
}

TEST_CASE("idle sessions are evicted") {
    Fixture f;
    std::string id = f.post("/api/session", versioned({}), 201)["session_id"];
    f.now += std::chrono::hours(23);
    f.get("/api/session/" + id);
    f.now += std::chrono::hours(23);
    f.get("/api/session/" + id);
    f.now += std::chrono::hours(25);
    CHECK(f.get("/api/session/" + id, 404)["error_code"] == "UnknownSession");
    CHECK(f.svc.session_count() == 0);
}

TEST_CASE("request errors") {
    Fixture f;
    CHECK(f.get("/api/session/none", 404)["error_code"] == "UnknownSession");
    CHECK(f.get("/api/nowhere", 404)["error_code"] == "NotFound");
    CHECK(f.get("/api/eval", 405)["error_code"] == "MethodNotAllowed");
    CHECK(f.call("POST", "/api/eval", "{not json", 400)["error_code"] == "BadRequest");
    CHECK(f.post("/api/eval", {{"format_version", 2}, {"facts", Json::object()}}, 400)["error_code"] == "BadVersion");
    CHECK(f.post("/api/session", versioned({{"bogus", 1}}), 400)["error_code"] == "SchemaViolation");
    std::string id = f.post("/api/session", versioned({}), 201)["session_id"];
    CHECK(f.post("/api/session/" + id + "/answer", versioned({{"version", 0}, {"reply", "maybe"}}), 400)["error_code"] ==
          "BadRequest");
    CHECK(f.post("/api/session/" + id + "/jump", versioned({}), 404)["error_code"] == "NotFound");
}

TEST_CASE("equal requests against an unchanged tree give equal responses") {
    Fixture f;
    for (const char* path : {"/api/tree"}) CHECK(f.svc.handle({"GET", path, ""}).body == f.svc.handle({"GET", path, ""}).body);
    Request check{"POST", "/api/check", "{}"};
    CHECK(f.svc.handle(check).body == f.svc.handle(check).body);
    Request eval{"POST", "/api/eval", R"({"facts":{"natural_person":true,"age_bracket":"under_15"}})"};
    CHECK(f.svc.handle(eval).body == f.svc.handle(eval).body);
}

TEST_CASE("concurrent answers on one session serialize through versions") {
    Fixture f;
    std::string id = f.post("/api/session", versioned({}), 201)["session_id"];
    std::atomic<int> ok{0}, conflicts{0};
    std::vector<std::thread> threads;
    for (int i = 0; i < 8; ++i) {
        threads.emplace_back([&] {
            auto r = f.svc.handle({"POST", "/api/session/" + id + "/answer", R"({"version":0,"reply":"yes"})"});
            if (r.status == 200) ++ok;
            if (r.status == 409) ++conflicts;
        });
    }
    for (auto& t : threads) t.join();
    CHECK(ok == 1);
    CHECK(conflicts == 7);
}

TEST_CASE("HTTP server answers on an ephemeral port and logs each request") {
    auto tree = std::make_shared<const binarize::CompiledTree>(binarize::compile(testing::load_fixture("vietnam.lex")));
    Service svc(tree, testing::load_fixture("vietnam.lex"));
    std::ostringstream log;
    HttpServer server(svc, {"127.0.0.1", 0, std::string("http://localhost:5173")}, log);
    int port = server.bind();
    REQUIRE(port > 0);
    std::thread runner([&] { server.run(); });

    httplib::Client client("127.0.0.1", port);
    auto tree_res = client.Get("/api/tree");
    REQUIRE(tree_res);
    CHECK(tree_res->status == 200);
    CHECK(tree_res->get_header_value("Access-Control-Allow-Origin") == "http://localhost:5173");
    CHECK(Json::parse(tree_res->body)["stats"]["leaves"] == 4);

    auto created = client.Post("/api/session", R"({"format_version":1})", "application/json");
    REQUIRE(created);
    CHECK(created->status == 201);
    std::string id = Json::parse(created->body)["session_id"];
    auto answered = client.Post("/api/session/" + id + "/answer", R"({"version":0,"reply":"no"})", "application/json");
    REQUIRE(answered);
    CHECK(Json::parse(answered->body)["status"]["outcome"]["text"] == "No right to make a will");

    auto preflight = client.Options("/api/session");
    REQUIRE(preflight);
    CHECK(preflight->status == 204);

    server.stop();
    runner.join();
    auto text = log.str();
    CHECK(std::count(text.begin(), text.end(), '\n') == 4);
    CHECK(text.find("GET /api/tree 200") != std::string::npos);
    CHECK(text.find("POST /api/session 201") != std::string::npos);
}

TEST_CASE("CORS headers are absent without an origin") {
    auto tree = std::make_shared<const binarize::CompiledTree>(binarize::compile(testing::load_fixture("vietnam.lex")));
    Service svc(tree, std::nullopt);
    std::ostringstream log;
    HttpServer server(svc, {"127.0.0.1", 0, std::nullopt}, log);
    int port = server.bind();
    REQUIRE(port > 0);
    std::thread runner([&] { server.run(); });
    httplib::Client client("127.0.0.1", port);
    auto res = client.Get("/api/tree");
    REQUIRE(res);
    CHECK_FALSE(res->has_header("Access-Control-Allow-Origin"));
    server.stop();
    runner.join();
}
