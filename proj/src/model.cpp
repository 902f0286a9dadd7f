#include "lextree/model.hpp"

#include <algorithm>
#include <functional>

namespace lextree {

std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::UnknownPredicate: return "UnknownPredicate";
    case ErrorCode::UnknownConsequence: return "UnknownConsequence";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::NonExhaustiveBranches: return "NonExhaustiveBranches";
    case ErrorCode::DuplicateBranch: return "DuplicateBranch";
    case ErrorCode::DomainMismatch: return "DomainMismatch";
    case ErrorCode::BadVersion: return "BadVersion";
    case ErrorCode::SchemaViolation: return "SchemaViolation";
    case ErrorCode::IncompleteAssignment: return "IncompleteAssignment";
    case ErrorCode::ConflictDetected: return "ConflictDetected";
    case ErrorCode::NoNorms: return "NoNorms";
    case ErrorCode::StateSpaceTooLarge: return "StateSpaceTooLarge";
    case ErrorCode::MissingFact: return "MissingFact";
    case ErrorCode::SessionFinished: return "SessionFinished";
    case ErrorCode::NothingToUndo: return "NothingToUndo";
    case ErrorCode::ReplayMismatch: return "ReplayMismatch";
    case ErrorCode::UnknownSession: return "UnknownSession";
    case ErrorCode::VersionConflict: return "VersionConflict";
    case ErrorCode::DocumentUnavailable: return "DocumentUnavailable";
    case ErrorCode::BadRequest: return "BadRequest";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::MethodNotAllowed: return "MethodNotAllowed";
    case ErrorCode::UnsatisfiablePath: return "UnsatisfiablePath";
    case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

std::string format_diagnostic(const Diagnostic& d, std::string_view file) {
    std::string out;
    if (!file.empty()) {
        out += file;
        out += ':';
    }
    if (d.span) {
        out += std::to_string(d.span->line) + ":" + std::to_string(d.span->column) + ": ";
    } else if (!file.empty()) {
        out += ' ';
    }
    out += d.severity == Severity::Error ? "error[" : "warning[";
    out += to_string(d.code);
    out += "]: ";
    out += d.message;
    return out;
}

std::string Value::to_string() const {
    if (is_bool()) return as_bool() ? "yes" : "no";
    return as_symbol();
}

std::string_view to_string(CategoryKind kind) {
    switch (kind) {
    case CategoryKind::Subject: return "subject";
    case CategoryKind::Object: return "object";
    case CategoryKind::Contents: return "contents";
    case CategoryKind::Lifecycle: return "lifecycle";
    case CategoryKind::Custom: return "custom";
    }
    return "custom";
}

std::optional<CategoryKind> category_kind_from_string(std::string_view s) {
    if (s == "subject") return CategoryKind::Subject;
    if (s == "object") return CategoryKind::Object;
    if (s == "contents") return CategoryKind::Contents;
    if (s == "lifecycle") return CategoryKind::Lifecycle;
    if (s == "custom") return CategoryKind::Custom;
    return std::nullopt;
}

std::size_t Predicate::domain_size() const {
    if (is_boolean()) return 2;
    return std::get<Enumerated>(domain).values.size();
}

Value Predicate::value_at(std::size_t index) const {
    if (is_boolean()) return Value(index == 0);
    return Value(std::get<Enumerated>(domain).values.at(index));
}

std::optional<std::size_t> Predicate::index_of(const Value& v) const {
    if (is_boolean()) {
        if (!v.is_bool()) return std::nullopt;
        return v.as_bool() ? 0 : 1;
    }
    if (v.is_bool()) return std::nullopt;
    const auto& values = std::get<Enumerated>(domain).values;
    auto it = std::find(values.begin(), values.end(), v.as_symbol());
    if (it == values.end()) return std::nullopt;
    return static_cast<std::size_t>(it - values.begin());
}

std::vector<Value> Predicate::values() const {
    std::vector<Value> out;
    for (std::size_t i = 0; i < domain_size(); ++i) out.push_back(value_at(i));
    return out;
}

std::string Literal::to_string() const { return predicate + "=" + value.to_string(); }

std::string to_string(const Assignment& a) {
    std::string out = "{";
    bool first = true;
    for (const auto& [pred, value] : a) {
        if (!first) out += ", ";
        first = false;
        out += pred + "=" + value.to_string();
    }
    return out + "}";
}

LatentNode make_leaf(std::string id, std::string consequence) {
    return LatentNode{std::move(id), LeafNode{std::move(consequence)}, {}};
}

LatentNode make_ask(std::string id, std::string predicate, std::vector<Branch> branches) {
    return LatentNode{std::move(id), AskNode{std::move(predicate), std::move(branches)}, {}};
}

LatentNode make_category(std::string id, TaxonomyCategory category, std::string label,
                         std::vector<LatentNode> children) {
    if (category.kind == CategoryKind::Custom) category.custom_label = label;
    return LatentNode{std::move(id),
                      CategoryNode{std::move(category), std::move(label), std::move(children)}, {}};
}

namespace {

void assign_ids_from(LatentNode& node, const std::string& id) {
    node.id = id;
    if (auto* cat = std::get_if<CategoryNode>(&node.payload)) {
        for (std::size_t i = 0; i < cat->children.size(); ++i)
            assign_ids_from(cat->children[i], id + "/" + std::to_string(i));
    } else if (auto* ask = std::get_if<AskNode>(&node.payload)) {
        // Repeated answers only occur in invalid input; keep their ids distinct
        // so validation reports the repeated branch rather than a repeated id.
        std::map<std::string, int> seen;
        for (auto& br : ask->branches) {
            std::string key = br.answer.to_string();
            int n = seen[key]++;
            assign_ids_from(br.child, id + "/" + key + (n ? "~" + std::to_string(n) : ""));
        }
    }
}

template <class F>
void visit_preorder(const LatentNode& node, F&& f) {
    f(node);
    if (const auto* cat = std::get_if<CategoryNode>(&node.payload)) {
        for (const auto& child : cat->children) visit_preorder(child, f);
    } else if (const auto* ask = std::get_if<AskNode>(&node.payload)) {
        for (const auto& br : ask->branches) visit_preorder(br.child, f);
    }
}

} // namespace

void assign_path_ids(LatentNode& root) { assign_ids_from(root, "root"); }

std::size_t count_nodes(const LatentNode& root) {
    std::size_t n = 0;
    visit_preorder(root, [&](const LatentNode&) { ++n; });
    return n;
}

std::size_t count_leaves(const LatentNode& root) {
    std::size_t n = 0;
    visit_preorder(root, [&](const LatentNode& node) { n += node.is_leaf() ? 1 : 0; });
    return n;
}

bool more_specific(const Norm& n1, const Norm& n2) {
    if (n1.condition.size() <= n2.condition.size()) return false;
    return std::includes(n1.condition.begin(), n1.condition.end(), n2.condition.begin(),
                         n2.condition.end());
}

namespace {

struct PathState {
    std::vector<Literal> literals;
    std::vector<std::string> origin;
    std::optional<std::string> contradiction; // first clashing predicate on the path
};

void extract_from(const LatentNode& node, PathState& path, ExtractedNorms& out) {
    path.origin.push_back(node.id);
    std::visit(
        [&](const auto& payload) {
            using T = std::decay_t<decltype(payload)>;
            if constexpr (std::is_same_v<T, LeafNode>) {
                if (path.contradiction) {
                    out.warnings.push_back(
                        {ErrorCode::UnsatisfiablePath,
                         "path to leaf '" + node.id + "' requires two values of predicate '" +
                             *path.contradiction + "'; norm dropped",
                         node.id});
                } else {
                    Norm n{node.id, path.literals, payload.consequence, path.origin};
                    std::sort(n.condition.begin(), n.condition.end());
                    out.norms.push_back(std::move(n));
                }
            } else if constexpr (std::is_same_v<T, CategoryNode>) {
                for (const auto& child : payload.children) extract_from(child, path, out);
            } else {
                auto existing = std::find_if(path.literals.begin(), path.literals.end(),
                                             [&](const Literal& l) { return l.predicate == payload.predicate; });
                std::optional<Value> fixed;
                if (existing != path.literals.end()) fixed = existing->value;
                for (const auto& br : payload.branches) {
                    if (fixed) {
                        bool clash = !(*fixed == br.answer);
                        std::optional<std::string> saved = path.contradiction;
                        if (clash && !path.contradiction) path.contradiction = payload.predicate;
                        extract_from(br.child, path, out);
                        path.contradiction = saved;
                    } else {
                        path.literals.push_back({payload.predicate, br.answer});
                        extract_from(br.child, path, out);
                        path.literals.pop_back();
                    }
                }
            }
        },
        node.payload);
    path.origin.pop_back();
}

} // namespace

ExtractedNorms extract_norms(const LatentNode& root) {
    ExtractedNorms out;
    PathState path;
    extract_from(root, path, out);
    return out;
}

ConsequenceTable::ConsequenceTable(std::span<const Consequence> consequences) {
    for (const auto& c : consequences) by_id_.emplace(c.id, c);
}

const Consequence* ConsequenceTable::find(std::string_view id) const {
    auto it = by_id_.find(id);
    return it == by_id_.end() ? nullptr : &it->second;
}

int ConsequenceTable::priority(std::string_view id) const {
    const auto* c = find(id);
    return c ? c->priority : kDefaultPriority;
}

bool satisfies(const Assignment& a, const Norm& n) {
    for (const auto& lit : n.condition) {
        auto it = a.find(lit.predicate);
        if (it == a.end() || !(it->second == lit.value)) return false;
    }
    return true;
}

Resolution resolve_applicable(std::span<const Norm* const> applicable,
                              const ConsequenceTable& consequences) {
    if (applicable.empty()) return Unregulated{};

    std::vector<const Norm*> maximal;
    for (const Norm* n : applicable) {
        bool beaten = std::any_of(applicable.begin(), applicable.end(),
                                  [&](const Norm* other) { return more_specific(*other, *n); });
        if (!beaten) maximal.push_back(n);
    }

    int best = consequences.priority(maximal.front()->consequence);
    for (const Norm* n : maximal) best = std::min(best, consequences.priority(n->consequence));

    std::vector<const Norm*> survivors;
    for (const Norm* n : maximal)
        if (consequences.priority(n->consequence) == best) survivors.push_back(n);

    const std::string& first = survivors.front()->consequence;
    bool unique = std::all_of(survivors.begin(), survivors.end(),
                              [&](const Norm* n) { return n->consequence == first; });
    std::vector<std::string> ids;
    for (const Norm* n : survivors) ids.push_back(n->id);
    if (unique) return Decided{first, std::move(ids)};
    return Conflict{std::move(ids)};
}

Resolution resolve(std::span<const Norm> norms, const ConsequenceTable& consequences,
                   const Assignment& a) {
    for (const auto& n : norms)
        for (const auto& lit : n.condition)
            if (!a.contains(lit.predicate))
                throw Error(ErrorCode::IncompleteAssignment,
                            "assignment has no fact for predicate '" + lit.predicate + "'");

    std::vector<const Norm*> applicable;
    for (const auto& n : norms)
        if (satisfies(a, n)) applicable.push_back(&n);
    return resolve_applicable(applicable, consequences);
}

} // namespace lextree
