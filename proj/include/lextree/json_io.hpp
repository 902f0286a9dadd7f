#pragma once

#include "lextree/binarize.hpp"
#include "lextree/document.hpp"
#include "lextree/engine.hpp"

#include <json.hpp>

#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace lextree::dsl {

using Json = nlohmann::ordered_json;

inline constexpr int kFormatVersion = 1;

// Every exported object carries `format_version: 1` and a `kind` tag
// (`document`, `compiled_tree`, `analysis_report`, `trace`). Source spans
// are never exported. Output is pretty-printed with a trailing newline and
// is byte-identical for equal inputs.

Json to_json(const Document& doc);
Json to_json(const binarize::CompiledTree& tree);
Json to_json(const binarize::AnalysisReport& report);
Json to_json(const engine::Trace& trace);

Json to_json(const Value& v);
Json to_json(const Literal& l);
Json to_json(const Assignment& a);
Json to_json(const binarize::TreeStats& s);

/// `{state: awaiting_answer, node, prompt, question, literal}` or
/// `{state: done, outcome, trace}`.
Json to_json(const engine::SessionStatus& status);
/// `{literal, node, answer: yes|no}`
Json to_json(const engine::AnsweredStep& step);

std::string export_json(const Document& doc);
std::string export_json(const binarize::CompiledTree& tree);
std::string export_json(const binarize::AnalysisReport& report);
std::string export_json(const engine::Trace& trace);

using Imported = std::variant<std::monostate, Document, binarize::CompiledTree, binarize::AnalysisReport, engine::Trace>;

struct ImportResult {
    Imported value;
    std::vector<Diagnostic> diagnostics;

    bool ok() const { return value.index() != 0; }
};

/// Strict import: unknown fields are a SchemaViolation, any version other
/// than 1 is BadVersion. Imported documents and trees are fully validated.
ImportResult import_json(std::string_view bytes);

/// Facts files are a plain object of predicate id to boolean or option.
/// Throws Error(SchemaViolation) for anything else.
Assignment facts_from_json(const Json& j);
Assignment parse_facts(std::string_view bytes);

/// Throws Error(SchemaViolation) for a malformed literal `{predicate, value}`.
Literal literal_from_json(const Json& j);

} // namespace lextree::dsl
