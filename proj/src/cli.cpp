#include "lextree/cli.hpp"

#include "lextree/binarize.hpp"
#include "lextree/dot.hpp"
#include "lextree/dsl.hpp"
#include "lextree/engine.hpp"
#include "lextree/json_io.hpp"
#include "lextree/service.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace lextree::cli {

namespace {

struct Failure {
    int exit_code;
};

std::string read_file(const std::string& path, std::ostream& err) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        err << path << ": error[IoError]: cannot read file\n";
        throw Failure{kIo};
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& bytes, std::ostream& err) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << bytes;
    out.flush();
    if (!out) {
        err << path << ": error[IoError]: cannot write file\n";
        throw Failure{kIo};
    }
}

bool looks_like_json(std::string_view text) {
    auto pos = text.find_first_not_of(" \t\r\n");
    return pos != std::string_view::npos && text[pos] == '{';
}

void report_diagnostics(const std::vector<Diagnostic>& diagnostics, const std::string& path, std::ostream& err) {
    for (const auto& d : diagnostics) err << format_diagnostic(d, path) << "\n";
}

[[noreturn]] void fail_with(const Error& e, const std::string& path, std::ostream& err) {
    report_diagnostics({Diagnostic{e.code(), Severity::Error, e.what(), std::nullopt}}, path, err);
    throw Failure{e.code() == ErrorCode::IoError ? kIo : kFindings};
}

// A document or compiled tree read from `.lex` or JSON.
struct Loaded {
    std::optional<Document> document;
    std::optional<binarize::CompiledTree> tree;
};

Loaded load(const std::string& path, std::ostream& err) {
    std::string text = read_file(path, err);
    if (!looks_like_json(text)) {
        auto parsed = dsl::parse(text);
        report_diagnostics(parsed.diagnostics, path, err);
        if (!parsed.ok()) throw Failure{kFindings};
        return {std::move(parsed.document), std::nullopt};
    }
    auto imported = dsl::import_json(text);
    report_diagnostics(imported.diagnostics, path, err);
    if (!imported.ok()) throw Failure{kFindings};
    if (auto* doc = std::get_if<Document>(&imported.value)) return {std::move(*doc), std::nullopt};
    if (auto* tree = std::get_if<binarize::CompiledTree>(&imported.value)) return {std::nullopt, std::move(*tree)};
    err << path << ": error[SchemaViolation]: expected a document or a compiled tree\n";
    throw Failure{kFindings};
}

Document load_document(const std::string& path, std::ostream& err) {
    Loaded l = load(path, err);
    if (!l.document) {
        err << path << ": error[SchemaViolation]: expected a document, found a compiled tree\n";
        throw Failure{kFindings};
    }
    return std::move(*l.document);
}

binarize::CompiledTree compile_or_fail(const Document& doc, const std::string& path, std::ostream& err) {
    try {
        return binarize::compile(doc);
    } catch (const binarize::ConflictError& e) {
        err << path << ": error[ConflictDetected]: " << e.what() << "\n";
        err << binarize::format_report(e.report());
        throw Failure{kFindings};
    } catch (const Error& e) {
        fail_with(e, path, err);
    }
}

// Compiles documents; passes compiled trees through.
std::pair<std::shared_ptr<const binarize::CompiledTree>, std::optional<Document>>
load_tree(const std::string& path, std::ostream& err) {
    Loaded l = load(path, err);
    if (l.tree) return {std::make_shared<const binarize::CompiledTree>(std::move(*l.tree)), std::nullopt};
    auto tree = std::make_shared<const binarize::CompiledTree>(compile_or_fail(*l.document, path, err));
    return {tree, std::move(l.document)};
}

int cmd_compile(const std::string& input, const std::string& out_path, const std::string& format,
                std::ostream& out, std::ostream& err) {
    Document doc = load_document(input, err);
    auto tree = compile_or_fail(doc, input, err);
    std::string bytes = format == "dot" ? dsl::export_dot(tree) : dsl::export_json(tree);
    if (out_path.empty() || out_path == "-") out << bytes;
    else write_file(out_path, bytes, err);
    return kOk;
}

int cmd_check(const std::string& input, const std::string& format, std::ostream& out, std::ostream& err) {
    Document doc = load_document(input, err);
    binarize::AnalysisReport report;
    try {
        report = binarize::analyze(doc);
    } catch (const Error& e) {
        fail_with(e, input, err);
    }
    out << (format == "json" ? dsl::export_json(report) : binarize::format_report(report));
    return report.conflicts.empty() ? kOk : kFindings;
}

int cmd_eval(const std::string& tree_path, const std::string& facts_path, bool lenient, std::ostream& out,
             std::ostream& err) {
    auto [tree, doc] = load_tree(tree_path, err);
    std::string facts_text = read_file(facts_path, err);
    try {
        auto facts = dsl::parse_facts(facts_text);
        auto trace = engine::evaluate(*tree, facts, lenient ? engine::FactMode::Lenient : engine::FactMode::Strict);
        out << dsl::export_json(trace);
    } catch (const Error& e) {
        fail_with(e, facts_path, err);
    }
    return kOk;
}

int cmd_ask(const std::string& tree_path, std::istream& in, std::ostream& out, std::ostream& err) {
    auto [tree, doc] = load_tree(tree_path, err);
    engine::Session session = engine::start(tree);
    std::string line;
    while (true) {
        auto status = session.status();
        if (auto* done = std::get_if<engine::Done>(&status)) {
            out << "Result: " << done->trace.text << " [" << done->trace.consequence << "]\n";
            out << "Path:\n";
            for (const auto& step : done->trace.steps)
                out << "  " << step.question << " -> " << (step.answer ? "yes" : "no") << "\n";
            return kOk;
        }
        const auto& awaiting = std::get<engine::AwaitingAnswer>(status);
        out << awaiting.question << " [yes/no/undo/quit] " << std::flush;
        if (!std::getline(in, line)) {
            out << "\n";
            return kOk;
        }
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line == "y" || line == "yes") {
            session = engine::answer(session, true);
        } else if (line == "n" || line == "no") {
            session = engine::answer(session, false);
        } else if (line == "u" || line == "undo") {
            if (session.answered().empty()) out << "Nothing to undo.\n";
            else session = engine::undo(session);
        } else if (line == "q" || line == "quit") {
            return kOk;
        } else {
            out << "Please answer yes, no, undo or quit.\n";
        }
    }
}

int cmd_serve(const std::string& tree_path, const std::string& host, int port,
              const std::optional<std::string>& cors_origin, std::ostream& err) {
    auto [tree, doc] = load_tree(tree_path, err);
    service::Service svc(tree, std::move(doc));
    service::HttpServer server(svc, {host, port, cors_origin}, err);
    int bound = server.bind();
    if (bound < 0) {
        err << "error[IoError]: cannot listen on " << host << ":" << port << "\n";
        return kIo;
    }
    err << "listening on http://" << host << ":" << bound << "\n" << std::flush;
    return server.run() ? kOk : kIo;
}

} // namespace

int run(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err) {
    CLI::App app{"Compile latent legal trees into binary decision trees and consult them", "lextree"};
    app.require_subcommand(1);

    std::string input, out_path, format = "json", report = "text", facts, tree_path;
    std::string host = "127.0.0.1";
    int port = 8080;
    bool lenient = false;
    std::optional<std::string> cors_origin;

    auto* compile = app.add_subcommand("compile", "Compile a document to a binary tree");
    compile->add_option("input", input, "Document (.lex or JSON)")->required();
    compile->add_option("--out,-o", out_path, "Output file (default stdout)");
    compile->add_option("--format", format, "Output format")->check(CLI::IsMember({"json", "dot"}));

    auto* check = app.add_subcommand("check", "Audit a document for conflicts, shadowed norms and gaps");
    check->add_option("input", input, "Document (.lex or JSON)")->required();
    check->add_option("--report", report, "Report format")->check(CLI::IsMember({"json", "text"}));

    auto* eval = app.add_subcommand("eval", "Evaluate a fact set against a tree");
    eval->add_option("tree", tree_path, "Compiled tree or document")->required();
    eval->add_option("--facts", facts, "Facts JSON file")->required();
    eval->add_flag("--lenient", lenient, "Ignore facts for undeclared predicates");

    auto* ask = app.add_subcommand("ask", "Interactive consultation");
    ask->add_option("tree", tree_path, "Compiled tree or document")->required();

    auto* serve = app.add_subcommand("serve", "Serve the JSON API for one tree");
    serve->add_option("--tree", tree_path, "Compiled tree or document")->required();
    serve->add_option("--port", port, "Port (0 picks a free one)")->check(CLI::Range(0, 65535));
    serve->add_option("--host", host, "Listen address");
    serve->add_option("--cors-origin", cors_origin, "Allowed browser origin");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return e.get_exit_code() == 0 ? kOk : kUsage;
    }

    try {
        if (compile->parsed()) return cmd_compile(input, out_path, format, out, err);
        if (check->parsed()) return cmd_check(input, report, out, err);
        if (eval->parsed()) return cmd_eval(tree_path, facts, lenient, out, err);
        if (ask->parsed()) return cmd_ask(tree_path, in, out, err);
        if (serve->parsed()) return cmd_serve(tree_path, host, port, cors_origin, err);
    } catch (const Failure& f) {
        return f.exit_code;
    }
    return kUsage;
}

} // namespace lextree::cli
