#include "lextree/json_io.hpp"

#include <algorithm>
#include <limits>
#include <set>

namespace lextree::dsl {

using binarize::AnalysisReport;
using binarize::CompiledTree;
using binarize::LeafOutcome;
using binarize::TestNode;

Json to_json(const Value& v) {
    if (v.is_bool()) return v.as_bool();
    return v.as_symbol();
}

Json to_json(const Literal& l) { return Json{{"predicate", l.predicate}, {"value", to_json(l.value)}}; }

Json to_json(const Assignment& a) {
    Json j = Json::object();
    for (const auto& [pred, value] : a) j[pred] = to_json(value);
    return j;
}

Json to_json(const binarize::TreeStats& s) {
    return Json{{"internal_nodes", s.internal_nodes}, {"leaves", s.leaves}, {"depth", s.depth}};
}

namespace {

Json header(std::string_view kind) { return Json{{"format_version", kFormatVersion}, {"kind", kind}}; }

Json predicate_json(const Predicate& p) {
    Json j{{"id", p.id}, {"prompt", p.prompt}};
    if (p.is_boolean()) {
        j["type"] = "bool";
    } else {
        j["type"] = "options";
        j["values"] = std::get<Predicate::Enumerated>(p.domain).values;
    }
    j["gate"] = p.gate;
    j["rank"] = p.rank;
    return j;
}

Json consequence_json(const Consequence& c) {
    return Json{{"id", c.id}, {"text", c.text}, {"priority", c.priority}};
}

void declarations(Json& j, const std::optional<std::string>& fallback, const std::vector<Predicate>& predicates,
                  const std::vector<Consequence>& consequences) {
    if (fallback) j["default_consequence"] = *fallback;
    j["predicates"] = Json::array();
    for (const auto& p : predicates) j["predicates"].push_back(predicate_json(p));
    j["consequences"] = Json::array();
    for (const auto& c : consequences) j["consequences"].push_back(consequence_json(c));
}

Json node_json(const LatentNode& n) {
    Json j{{"id", n.id}};
    if (const auto* cat = std::get_if<CategoryNode>(&n.payload)) {
        j["kind"] = "category";
        j["category"] = to_string(cat->category.kind);
        j["label"] = cat->label;
        j["children"] = Json::array();
        for (const auto& child : cat->children) j["children"].push_back(node_json(child));
    } else if (const auto* ask = std::get_if<AskNode>(&n.payload)) {
        j["kind"] = "ask";
        j["predicate"] = ask->predicate;
        j["branches"] = Json::array();
        for (const auto& br : ask->branches)
            j["branches"].push_back(Json{{"answer", to_json(br.answer)}, {"node", node_json(br.child)}});
    } else {
        j["kind"] = "leaf";
        j["consequence"] = std::get<LeafNode>(n.payload).consequence;
    }
    return j;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

} // namespace

Json to_json(const Document& doc) {
    Json j = header("document");
    j["title"] = doc.title;
    declarations(j, doc.default_consequence, doc.predicates, doc.consequences);
    j["root"] = node_json(doc.root);
    return j;
}

Json to_json(const CompiledTree& tree) {
    Json j = header("compiled_tree");
    j["source_title"] = tree.source_title;
    declarations(j, tree.default_consequence, tree.predicates, tree.consequences);
    j["root"] = tree.root;
    j["nodes"] = Json::array();
    for (const auto& node : tree.nodes) {
        if (const auto* t = std::get_if<TestNode>(&node)) {
            j["nodes"].push_back(Json{{"kind", "test"},
                                      {"predicate", t->literal.predicate},
                                      {"value", to_json(t->literal.value)},
                                      {"yes", t->yes},
                                      {"no", t->no}});
        } else {
            const auto& leaf = std::get<LeafOutcome>(node);
            j["nodes"].push_back(Json{{"kind", "leaf"},
                                      {"consequence", leaf.consequence},
                                      {"winning_norm", leaf.winning_norm ? Json(*leaf.winning_norm) : Json(nullptr)}});
        }
    }
    return j;
}

Json to_json(const AnalysisReport& r) {
    Json j = header("analysis_report");
    j["title"] = r.title;
    j["exhaustive"] = r.exhaustive;
    j["norm_count"] = r.norm_count;
    j["assignments_checked"] = r.assignments_checked;
    j["stats"] = to_json(r.stats);
    j["conflicts"] = Json::array();
    for (const auto& c : r.conflicts) j["conflicts"].push_back(Json{{"norms", c.norms}, {"witness", to_json(c.witness)}});
    j["shadowed"] = r.shadowed;
    j["unregulated_regions"] = Json::array();
    for (const auto& region : r.unregulated_regions) j["unregulated_regions"].push_back(to_json(region));
    j["warnings"] = Json::array();
    for (const auto& w : r.warnings)
        j["warnings"].push_back(Json{{"code", to_string(w.code)}, {"message", w.message}, {"node", w.node}});
    return j;
}

Json to_json(const engine::Trace& t) {
    Json j = header("trace");
    j["steps"] = Json::array();
    for (const auto& s : t.steps)
        j["steps"].push_back(Json{{"prompt", s.prompt},
                                  {"question", s.question},
                                  {"literal", to_json(s.literal)},
                                  {"answer", s.answer ? "yes" : "no"}});
    j["outcome"] = Json{{"consequence", t.consequence}, {"text", t.text}};
    j["winning_norm"] = t.winning_norm ? Json(*t.winning_norm) : Json(nullptr);
    return j;
}

Json to_json(const engine::SessionStatus& status) {
    if (const auto* w = std::get_if<engine::AwaitingAnswer>(&status)) {
        return Json{{"state", "awaiting_answer"},
                    {"node", w->node},
                    {"prompt", w->prompt},
                    {"question", w->question},
                    {"literal", to_json(w->literal)}};
    }
    const auto& done = std::get<engine::Done>(status);
    Json trace = to_json(done.trace);
    return Json{{"state", "done"}, {"outcome", trace["outcome"]}, {"trace", trace}};
}

Json to_json(const engine::AnsweredStep& step) {
    return Json{{"literal", to_json(step.literal)}, {"node", step.node}, {"answer", step.reply ? "yes" : "no"}};
}

std::string export_json(const Document& doc) { return dump(to_json(doc)); }
std::string export_json(const CompiledTree& tree) { return dump(to_json(tree)); }
std::string export_json(const AnalysisReport& report) { return dump(to_json(report)); }
std::string export_json(const engine::Trace& trace) { return dump(to_json(trace)); }

namespace {

[[noreturn]] void schema(const std::string& message) { throw Error(ErrorCode::SchemaViolation, message); }

// Field access on one JSON object; finish() rejects keys nobody read.
class Fields {
public:
    Fields(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j.is_object()) schema(path_ + " must be an object");
    }

    const Json& required(const std::string& key) {
        const Json* v = optional(key);
        if (!v) schema(path_ + "." + key + " is required");
        return *v;
    }

    const Json* optional(const std::string& key) {
        seen_.insert(key);
        auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }

    std::string string(const std::string& key) {
        const Json& v = required(key);
        if (!v.is_string()) schema(path_ + "." + key + " must be a string");
        return v.get<std::string>();
    }

    bool boolean(const std::string& key) {
        const Json& v = required(key);
        if (!v.is_boolean()) schema(path_ + "." + key + " must be a boolean");
        return v.get<bool>();
    }

    std::int64_t integer(const std::string& key, std::int64_t min, std::int64_t max) {
        const Json& v = required(key);
        if (!v.is_number_integer()) schema(path_ + "." + key + " must be an integer");
        auto n = v.get<std::int64_t>();
        if (n < min || n > max) schema(path_ + "." + key + " is out of range");
        return n;
    }

    const Json& array(const std::string& key) {
        const Json& v = required(key);
        if (!v.is_array()) schema(path_ + "." + key + " must be an array");
        return v;
    }

    std::vector<std::string> strings(const std::string& key) {
        std::vector<std::string> out;
        for (const auto& item : array(key)) {
            if (!item.is_string()) schema(path_ + "." + key + " must contain strings");
            out.push_back(item.get<std::string>());
        }
        return out;
    }

    std::string path(const std::string& key) const { return path_ + "." + key; }

    void finish() const {
        for (const auto& [key, _] : j_.items())
            if (!seen_.contains(key)) schema(path_ + " has unknown field '" + key + "'");
    }

private:
    const Json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

constexpr std::int64_t kIntMax = std::numeric_limits<int>::max();

Value value_from_json(const Json& j, const std::string& path) {
    if (j.is_boolean()) return Value(j.get<bool>());
    if (j.is_string()) return Value(j.get<std::string>());
    schema(path + " must be a boolean or a string");
}

Predicate predicate_from_json(const Json& j, const std::string& path) {
    Fields f(j, path);
    Predicate p;
    p.id = f.string("id");
    p.prompt = f.string("prompt");
    std::string type = f.string("type");
    if (type == "bool") {
        p.domain = Predicate::Boolean{};
    } else if (type == "options") {
        p.domain = Predicate::Enumerated{f.strings("values")};
    } else {
        schema(f.path("type") + " must be 'bool' or 'options'");
    }
    p.gate = f.boolean("gate");
    p.rank = static_cast<int>(f.integer("rank", 0, kIntMax));
    f.finish();
    return p;
}

Consequence consequence_from_json(const Json& j, const std::string& path) {
    Fields f(j, path);
    Consequence c;
    c.id = f.string("id");
    c.text = f.string("text");
    c.priority = static_cast<int>(f.integer("priority", 0, kIntMax));
    f.finish();
    return c;
}

struct Declarations {
    std::optional<std::string> fallback;
    std::vector<Predicate> predicates;
    std::vector<Consequence> consequences;
};

Declarations declarations_from(Fields& f, const std::string& path) {
    Declarations d;
    if (const Json* v = f.optional("default_consequence")) {
        if (!v->is_string()) schema(path + ".default_consequence must be a string");
        d.fallback = v->get<std::string>();
    }
    const Json& preds = f.array("predicates");
    for (std::size_t i = 0; i < preds.size(); ++i)
        d.predicates.push_back(predicate_from_json(preds[i], path + ".predicates[" + std::to_string(i) + "]"));
    const Json& cons = f.array("consequences");
    for (std::size_t i = 0; i < cons.size(); ++i)
        d.consequences.push_back(consequence_from_json(cons[i], path + ".consequences[" + std::to_string(i) + "]"));
    return d;
}

LatentNode node_from_json(const Json& j, const std::string& path, const std::vector<Predicate>& predicates) {
    Fields f(j, path);
    LatentNode n;
    n.id = f.string("id");
    std::string kind = f.string("kind");
    if (kind == "category") {
        CategoryNode cat;
        auto k = category_kind_from_string(f.string("category"));
        if (!k) schema(f.path("category") + " is not a category kind");
        cat.category.kind = *k;
        cat.label = f.string("label");
        if (*k == CategoryKind::Custom) cat.category.custom_label = cat.label;
        const Json& children = f.array("children");
        for (std::size_t i = 0; i < children.size(); ++i)
            cat.children.push_back(node_from_json(children[i], path + ".children[" + std::to_string(i) + "]", predicates));
        n.payload = std::move(cat);
    } else if (kind == "ask") {
        AskNode ask;
        ask.predicate = f.string("predicate");
        const Json& branches = f.array("branches");
        for (std::size_t i = 0; i < branches.size(); ++i) {
            std::string bpath = path + ".branches[" + std::to_string(i) + "]";
            Fields bf(branches[i], bpath);
            Value answer = value_from_json(bf.required("answer"), bpath + ".answer");
            LatentNode child = node_from_json(bf.required("node"), bpath + ".node", predicates);
            bf.finish();
            ask.branches.push_back({std::move(answer), std::move(child), {}});
        }
        auto pred = std::find_if(predicates.begin(), predicates.end(),
                                 [&](const Predicate& p) { return p.id == ask.predicate; });
        if (pred != predicates.end()) {
            auto order = [&](const Branch& b) {
                return pred->index_of(b.answer).value_or(std::numeric_limits<std::size_t>::max());
            };
            std::stable_sort(ask.branches.begin(), ask.branches.end(),
                             [&](const Branch& a, const Branch& b) { return order(a) < order(b); });
        }
        n.payload = std::move(ask);
    } else if (kind == "leaf") {
        n.payload = LeafNode{f.string("consequence")};
    } else {
        schema(f.path("kind") + " must be 'category', 'ask' or 'leaf'");
    }
    f.finish();
    return n;
}

Document document_from(Fields& f) {
    Document doc;
    doc.title = f.string("title");
    Declarations d = declarations_from(f, "$");
    doc.default_consequence = std::move(d.fallback);
    doc.predicates = std::move(d.predicates);
    doc.consequences = std::move(d.consequences);
    doc.root = node_from_json(f.required("root"), "$.root", doc.predicates);
    return doc;
}

CompiledTree tree_from(Fields& f, std::vector<Diagnostic>& diagnostics) {
    CompiledTree tree;
    tree.source_title = f.string("source_title");
    Declarations d = declarations_from(f, "$");
    tree.default_consequence = std::move(d.fallback);
    tree.predicates = std::move(d.predicates);
    tree.consequences = std::move(d.consequences);
    tree.root = static_cast<binarize::NodeIndex>(f.integer("root", 0, std::numeric_limits<binarize::NodeIndex>::max()));
    const Json& nodes = f.array("nodes");
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        std::string path = "$.nodes[" + std::to_string(i) + "]";
        Fields nf(nodes[i], path);
        std::string kind = nf.string("kind");
        constexpr std::int64_t kMaxIndex = std::numeric_limits<binarize::NodeIndex>::max();
        if (kind == "test") {
            TestNode t;
            t.literal.predicate = nf.string("predicate");
            t.literal.value = value_from_json(nf.required("value"), path + ".value");
            t.yes = static_cast<binarize::NodeIndex>(nf.integer("yes", 0, kMaxIndex));
            t.no = static_cast<binarize::NodeIndex>(nf.integer("no", 0, kMaxIndex));
            tree.nodes.emplace_back(std::move(t));
        } else if (kind == "leaf") {
            LeafOutcome leaf;
            leaf.consequence = nf.string("consequence");
            const Json& w = nf.required("winning_norm");
            if (w.is_string()) leaf.winning_norm = w.get<std::string>();
            else if (!w.is_null()) schema(path + ".winning_norm must be a string or null");
            tree.nodes.emplace_back(std::move(leaf));
        } else {
            schema(path + ".kind must be 'test' or 'leaf'");
        }
        nf.finish();
    }
    diagnostics = validate_declarations(tree.predicates, tree.consequences, tree.default_consequence);
    for (const auto& problem : binarize::check_structure(tree))
        diagnostics.push_back({ErrorCode::SchemaViolation, Severity::Error, problem, std::nullopt});
    return tree;
}

Assignment assignment_from(const Json& j, const std::string& path) {
    if (!j.is_object()) schema(path + " must be an object");
    Assignment a;
    for (const auto& [key, value] : j.items()) a[key] = value_from_json(value, path + "." + key);
    return a;
}

binarize::TreeStats stats_from(const Json& j) {
    Fields f(j, "$.stats");
    binarize::TreeStats s;
    constexpr auto kMax = std::numeric_limits<std::int64_t>::max();
    s.internal_nodes = static_cast<std::size_t>(f.integer("internal_nodes", 0, kMax));
    s.leaves = static_cast<std::size_t>(f.integer("leaves", 0, kMax));
    s.depth = static_cast<std::size_t>(f.integer("depth", 0, kMax));
    f.finish();
    return s;
}

AnalysisReport report_from(Fields& f) {
    constexpr auto kMax = std::numeric_limits<std::int64_t>::max();
    AnalysisReport r;
    r.title = f.string("title");
    r.exhaustive = f.boolean("exhaustive");
    r.norm_count = static_cast<std::size_t>(f.integer("norm_count", 0, kMax));
    r.assignments_checked = static_cast<std::size_t>(f.integer("assignments_checked", 0, kMax));
    r.stats = stats_from(f.required("stats"));
    const Json& conflicts = f.array("conflicts");
    for (std::size_t i = 0; i < conflicts.size(); ++i) {
        std::string path = "$.conflicts[" + std::to_string(i) + "]";
        Fields cf(conflicts[i], path);
        binarize::ConflictFinding c{cf.strings("norms"), assignment_from(cf.required("witness"), path + ".witness")};
        cf.finish();
        r.conflicts.push_back(std::move(c));
    }
    r.shadowed = f.strings("shadowed");
    const Json& regions = f.array("unregulated_regions");
    for (std::size_t i = 0; i < regions.size(); ++i)
        r.unregulated_regions.push_back(assignment_from(regions[i], "$.unregulated_regions[" + std::to_string(i) + "]"));
    const Json& warnings = f.array("warnings");
    for (std::size_t i = 0; i < warnings.size(); ++i) {
        Fields wf(warnings[i], "$.warnings[" + std::to_string(i) + "]");
        if (wf.string("code") != to_string(ErrorCode::UnsatisfiablePath)) schema("unknown warning code");
        r.warnings.push_back({ErrorCode::UnsatisfiablePath, wf.string("message"), wf.string("node")});
        wf.finish();
    }
    return r;
}

engine::Trace trace_from(Fields& f) {
    engine::Trace t;
    const Json& steps = f.array("steps");
    for (std::size_t i = 0; i < steps.size(); ++i) {
        Fields sf(steps[i], "$.steps[" + std::to_string(i) + "]");
        engine::TraceStep s;
        s.prompt = sf.string("prompt");
        s.question = sf.string("question");
        s.literal = literal_from_json(sf.required("literal"));
        std::string answer = sf.string("answer");
        if (answer != "yes" && answer != "no") schema(sf.path("answer") + " must be 'yes' or 'no'");
        s.answer = answer == "yes";
        sf.finish();
        t.steps.push_back(std::move(s));
    }
    Fields of(f.required("outcome"), "$.outcome");
    t.consequence = of.string("consequence");
    t.text = of.string("text");
    of.finish();
    const Json& w = f.required("winning_norm");
    if (w.is_string()) t.winning_norm = w.get<std::string>();
    else if (!w.is_null()) schema("$.winning_norm must be a string or null");
    return t;
}

} // namespace

Literal literal_from_json(const Json& j) {
    Fields f(j, "literal");
    Literal l{f.string("predicate"), value_from_json(f.required("value"), "literal.value")};
    f.finish();
    return l;
}

Assignment facts_from_json(const Json& j) { return assignment_from(j, "facts"); }

Assignment parse_facts(std::string_view bytes) {
    Json j = Json::parse(bytes, nullptr, false);
    if (j.is_discarded()) schema("facts are not valid JSON");
    return facts_from_json(j);
}

ImportResult import_json(std::string_view bytes) {
    ImportResult result;
    auto diag = [&](ErrorCode code, std::string message) {
        result.diagnostics.push_back({code, Severity::Error, std::move(message), std::nullopt});
    };

    Json j = Json::parse(bytes, nullptr, false);
    if (j.is_discarded()) {
        diag(ErrorCode::SchemaViolation, "input is not valid JSON");
        return result;
    }
    if (!j.is_object()) {
        diag(ErrorCode::SchemaViolation, "top level must be an object");
        return result;
    }
    auto version = j.find("format_version");
    if (version == j.end() || !version->is_number_integer()) {
        diag(ErrorCode::BadVersion, "missing integer format_version");
        return result;
    }
    if (version->get<std::int64_t>() != kFormatVersion) {
        diag(ErrorCode::BadVersion, "unsupported format_version " + version->dump() + " (expected 1)");
        return result;
    }

    try {
        Fields f(j, "$");
        f.required("format_version");
        std::string kind = f.string("kind");
        if (kind == "document") {
            Document doc = document_from(f);
            f.finish();
            result.diagnostics = validate(doc);
            if (result.diagnostics.empty()) result.value = std::move(doc);
        } else if (kind == "compiled_tree") {
            std::vector<Diagnostic> diagnostics;
            CompiledTree tree = tree_from(f, diagnostics);
            f.finish();
            result.diagnostics = std::move(diagnostics);
            if (result.diagnostics.empty()) result.value = std::move(tree);
        } else if (kind == "analysis_report") {
            AnalysisReport r = report_from(f);
            f.finish();
            result.value = std::move(r);
        } else if (kind == "trace") {
            engine::Trace t = trace_from(f);
            f.finish();
            result.value = std::move(t);
        } else {
            schema("$.kind '" + kind + "' is not a known kind");
        }
    } catch (const Error& e) {
        result.value = std::monostate{};
        diag(e.code(), e.what());
    }
    return result;
}

} // namespace lextree::dsl
