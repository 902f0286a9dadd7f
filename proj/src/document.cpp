#include "lextree/document.hpp"

#include <algorithm>
#include <set>

namespace lextree {

const Predicate* Document::find_predicate(std::string_view id) const {
    auto it = std::find_if(predicates.begin(), predicates.end(),
                           [&](const Predicate& p) { return p.id == id; });
    return it == predicates.end() ? nullptr : &*it;
}

const Consequence* Document::find_consequence(std::string_view id) const {
    auto it = std::find_if(consequences.begin(), consequences.end(),
                           [&](const Consequence& c) { return c.id == id; });
    return it == consequences.end() ? nullptr : &*it;
}

namespace {

bool is_identifier(std::string_view s) {
    if (s.empty()) return false;
    auto head = [](char c) { return c == '_' || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); };
    auto tail = [&](char c) { return head(c) || (c >= '0' && c <= '9'); };
    if (!head(s.front())) return false;
    return std::all_of(s.begin() + 1, s.end(), tail);
}

class Validator {
public:
    explicit Validator(const Document& doc) : doc_(doc) {}

    std::vector<Diagnostic> run(bool with_tree) {
        check_declarations();
        if (with_tree) check_node(doc_.root);
        return std::move(out_);
    }

private:
    void error(ErrorCode code, std::string message, const SpanInfo& span) {
        out_.push_back({code, Severity::Error, std::move(message), span.span});
    }

    void check_declarations() {
        std::set<std::string, std::less<>> seen;
        for (const auto& p : doc_.predicates) {
            if (!is_identifier(p.id)) error(ErrorCode::SchemaViolation, "invalid predicate id '" + p.id + "'", p.span);
            if (!seen.insert(p.id).second) error(ErrorCode::DuplicateId, "predicate '" + p.id + "' declared twice", p.span);
            if (p.rank < 0) error(ErrorCode::SchemaViolation, "predicate '" + p.id + "' has a negative rank", p.span);
            if (const auto* e = std::get_if<Predicate::Enumerated>(&p.domain)) {
                if (e->values.size() < 2)
                    error(ErrorCode::DomainMismatch, "predicate '" + p.id + "' needs at least two options", p.span);
                std::set<std::string> values;
                for (const auto& v : e->values) {
                    if (!is_identifier(v)) error(ErrorCode::SchemaViolation, "invalid option '" + v + "'", p.span);
                    if (!values.insert(v).second)
                        error(ErrorCode::DuplicateId, "option '" + v + "' repeated in predicate '" + p.id + "'", p.span);
                }
            }
        }

        std::set<std::string, std::less<>> consequences;
        for (const auto& c : doc_.consequences) {
            if (!is_identifier(c.id)) error(ErrorCode::SchemaViolation, "invalid consequence id '" + c.id + "'", c.span);
            if (c.id == kUnregulatedId)
                error(ErrorCode::DuplicateId, "consequence id 'UNREGULATED' is reserved", c.span);
            if (!consequences.insert(c.id).second)
                error(ErrorCode::DuplicateId, "consequence '" + c.id + "' declared twice", c.span);
            if (c.text.empty()) error(ErrorCode::SchemaViolation, "consequence '" + c.id + "' has empty text", c.span);
            if (c.priority < 0) error(ErrorCode::SchemaViolation, "consequence '" + c.id + "' has a negative priority", c.span);
        }

        if (doc_.default_consequence) {
            if (doc_.consequences.empty() || doc_.consequences.front().id != *doc_.default_consequence)
                error(ErrorCode::UnknownConsequence,
                      "default consequence '" + *doc_.default_consequence + "' must be the first declared consequence",
                      {});
        }
    }

    void check_node(const LatentNode& node) {
        if (!node_ids_.insert(node.id).second)
            error(ErrorCode::DuplicateId, "node id '" + node.id + "' used twice", node.span);
        if (const auto* cat = std::get_if<CategoryNode>(&node.payload)) {
            if (cat->children.empty()) error(ErrorCode::SchemaViolation, "category '" + cat->label + "' has no children", node.span);
            if (cat->category.kind == CategoryKind::Custom &&
                (cat->category.custom_label.empty() || cat->category.custom_label != cat->label))
                error(ErrorCode::SchemaViolation, "custom category needs a non-empty label", node.span);
            for (const auto& child : cat->children) check_node(child);
        } else if (const auto* ask = std::get_if<AskNode>(&node.payload)) {
            check_ask(node, *ask);
        } else {
            const auto& leaf = std::get<LeafNode>(node.payload);
            if (!doc_.find_consequence(leaf.consequence))
                error(ErrorCode::UnknownConsequence, "unknown consequence '" + leaf.consequence + "'", node.span);
        }
    }

    void check_ask(const LatentNode& node, const AskNode& ask) {
        const Predicate* pred = doc_.find_predicate(ask.predicate);
        if (!pred) {
            error(ErrorCode::UnknownPredicate, "unknown predicate '" + ask.predicate + "'", node.span);
            for (const auto& br : ask.branches) check_node(br.child);
            return;
        }
        std::vector<bool> covered(pred->domain_size(), false);
        std::optional<std::size_t> last;
        for (const auto& br : ask.branches) {
            auto idx = pred->index_of(br.answer);
            if (!idx) {
                error(ErrorCode::DomainMismatch,
                      "answer '" + br.answer.to_string() + "' is not in the domain of '" + pred->id + "'", br.span);
            } else if (covered[*idx]) {
                error(ErrorCode::DuplicateBranch,
                      "answer '" + br.answer.to_string() + "' appears twice for '" + pred->id + "'", br.span);
            } else {
                covered[*idx] = true;
                if (last && *idx < *last)
                    error(ErrorCode::SchemaViolation, "branches of '" + pred->id + "' are not in domain order", br.span);
                last = idx;
            }
            check_node(br.child);
        }
        std::vector<std::string> missing;
        for (std::size_t i = 0; i < covered.size(); ++i)
            if (!covered[i]) missing.push_back(pred->value_at(i).to_string());
        if (!missing.empty()) {
            std::string list;
            for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
            error(ErrorCode::NonExhaustiveBranches, "ask '" + pred->id + "' is missing branches for: " + list, node.span);
        }
    }

    const Document& doc_;
    std::set<std::string> node_ids_;
    std::vector<Diagnostic> out_;
};

} // namespace

std::vector<Diagnostic> validate(const Document& doc) { return Validator(doc).run(true); }

std::vector<Diagnostic> validate_declarations(const std::vector<Predicate>& predicates,
                                              const std::vector<Consequence>& consequences,
                                              const std::optional<std::string>& default_consequence) {
    Document decls;
    decls.predicates = predicates;
    decls.consequences = consequences;
    decls.default_consequence = default_consequence;
    return Validator(decls).run(false);
}

std::size_t assignment_space(std::span<const Predicate> predicates, std::size_t cap) {
    std::size_t total = 1;
    for (const auto& p : predicates) {
        total *= p.domain_size();
        if (total > cap) return cap + 1;
    }
    return total;
}

} // namespace lextree
