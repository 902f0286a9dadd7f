#pragma once

#include "lextree/error.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace lextree {

/// Answer to a predicate: a boolean, or one value of an enumerated domain.
class Value {
public:
    Value() = default;
    Value(bool b) : v_(b) {}
    Value(std::string s) : v_(std::move(s)) {}
    Value(const char* s) : v_(std::string(s)) {}

    bool is_bool() const { return std::holds_alternative<bool>(v_); }
    bool as_bool() const { return std::get<bool>(v_); }
    const std::string& as_symbol() const { return std::get<std::string>(v_); }

    /// `yes`/`no` for booleans, the symbol otherwise.
    std::string to_string() const;

    friend bool operator==(const Value&, const Value&) = default;
    friend auto operator<=>(const Value&, const Value&) = default;

private:
    std::variant<bool, std::string> v_ = false;
};

enum class CategoryKind { Subject, Object, Contents, Lifecycle, Custom };

struct TaxonomyCategory {
    CategoryKind kind = CategoryKind::Custom;
    std::string custom_label; // non-empty iff kind == Custom

    static TaxonomyCategory subject() { return {CategoryKind::Subject, {}}; }
    static TaxonomyCategory object() { return {CategoryKind::Object, {}}; }
    static TaxonomyCategory contents() { return {CategoryKind::Contents, {}}; }
    static TaxonomyCategory lifecycle() { return {CategoryKind::Lifecycle, {}}; }
    static TaxonomyCategory custom(std::string label) { return {CategoryKind::Custom, std::move(label)}; }

    friend bool operator==(const TaxonomyCategory&, const TaxonomyCategory&) = default;
};

/// `subject`, `object`, `contents`, `lifecycle` or `custom`.
std::string_view to_string(CategoryKind kind);
std::optional<CategoryKind> category_kind_from_string(std::string_view s);

inline constexpr int kDefaultRank = 100;
inline constexpr int kDefaultPriority = 100;

struct Predicate {
    struct Boolean {
        friend bool operator==(const Boolean&, const Boolean&) = default;
    };
    struct Enumerated {
        std::vector<std::string> values;
        friend bool operator==(const Enumerated&, const Enumerated&) = default;
    };

    std::string id;
    std::string prompt;
    std::variant<Boolean, Enumerated> domain;
    bool gate = false;
    int rank = kDefaultRank;
    SpanInfo span;

    bool is_boolean() const { return std::holds_alternative<Boolean>(domain); }
    /// Boolean domains are ordered {true, false}.
    std::size_t domain_size() const;
    Value value_at(std::size_t index) const;
    std::optional<std::size_t> index_of(const Value& v) const;
    bool accepts(const Value& v) const { return index_of(v).has_value(); }
    std::vector<Value> values() const;

    friend bool operator==(const Predicate&, const Predicate&) = default;
};

struct Literal {
    std::string predicate;
    Value value;

    /// `natural_person=no`
    std::string to_string() const;

    friend bool operator==(const Literal&, const Literal&) = default;
    friend auto operator<=>(const Literal&, const Literal&) = default;
};

struct Consequence {
    std::string id;
    std::string text;
    int priority = kDefaultPriority; // lower wins
    SpanInfo span;

    friend bool operator==(const Consequence&, const Consequence&) = default;
};

inline constexpr std::string_view kUnregulatedId = "UNREGULATED";
inline constexpr std::string_view kUnregulatedText = "No norm regulates this case";

struct LatentNode;
struct Branch;

struct CategoryNode {
    TaxonomyCategory category;
    std::string label;
    std::vector<LatentNode> children;

    friend bool operator==(const CategoryNode&, const CategoryNode&) = default;
};

struct AskNode {
    std::string predicate;
    std::vector<Branch> branches; // one per domain value, in domain order

    friend bool operator==(const AskNode&, const AskNode&) = default;
};

struct LeafNode {
    std::string consequence;

    friend bool operator==(const LeafNode&, const LeafNode&) = default;
};

struct LatentNode {
    std::string id;
    std::variant<CategoryNode, AskNode, LeafNode> payload;
    SpanInfo span;

    bool is_category() const { return std::holds_alternative<CategoryNode>(payload); }
    bool is_ask() const { return std::holds_alternative<AskNode>(payload); }
    bool is_leaf() const { return std::holds_alternative<LeafNode>(payload); }

    friend bool operator==(const LatentNode&, const LatentNode&) = default;
};

struct Branch {
    Value answer;
    LatentNode child;
    SpanInfo span;

    friend bool operator==(const Branch&, const Branch&) = default;
};

LatentNode make_leaf(std::string id, std::string consequence);
LatentNode make_ask(std::string id, std::string predicate, std::vector<Branch> branches);
LatentNode make_category(std::string id, TaxonomyCategory category, std::string label,
                         std::vector<LatentNode> children);

/// Rewrites every node id from its position: the root is `root`, a category
/// child is `<parent>/<index>`, a branch child is `<parent>/<answer>`.
void assign_path_ids(LatentNode& root);

/// Pre-order node count.
std::size_t count_nodes(const LatentNode& root);
std::size_t count_leaves(const LatentNode& root);

struct Norm {
    std::string id;
    std::vector<Literal> condition; // sorted by predicate id, one literal per predicate
    std::string consequence;
    std::vector<std::string> origin; // root-to-leaf node ids

    friend bool operator==(const Norm&, const Norm&) = default;
};

/// n1 is more specific than n2 iff condition(n2) is a strict subset of condition(n1).
bool more_specific(const Norm& n1, const Norm& n2);

using Assignment = std::map<std::string, Value>;

/// Text form `{a=yes, b=under_15}` used in reports and diagnostics.
std::string to_string(const Assignment& a);

struct Warning {
    ErrorCode code; // UnsatisfiablePath
    std::string message;
    std::string node; // leaf id

    friend bool operator==(const Warning&, const Warning&) = default;
};

struct ExtractedNorms {
    std::vector<Norm> norms;
    std::vector<Warning> warnings;
};

/// One norm per satisfiable root-to-leaf path, in pre-order of leaves.
ExtractedNorms extract_norms(const LatentNode& root);

struct Decided {
    std::string consequence;
    std::vector<std::string> winners; // surviving norm ids, in input order

    friend bool operator==(const Decided&, const Decided&) = default;
};
struct Unregulated {
    friend bool operator==(const Unregulated&, const Unregulated&) = default;
};
struct Conflict {
    std::vector<std::string> norms; // in input order

    friend bool operator==(const Conflict&, const Conflict&) = default;
};

using Resolution = std::variant<Decided, Unregulated, Conflict>;

/// Consequence lookup by id, for priorities.
class ConsequenceTable {
public:
    ConsequenceTable() = default;
    explicit ConsequenceTable(std::span<const Consequence> consequences);

    const Consequence* find(std::string_view id) const;
    int priority(std::string_view id) const;

private:
    std::map<std::string, Consequence, std::less<>> by_id_;
};

/// Reference priority resolution. Applicable norms are filtered to the most
/// specific ones, then to the strongest consequence priority; a unique
/// remaining consequence is Decided, several are a Conflict.
///
/// Throws Error(IncompleteAssignment) if a literal's predicate has no fact.
Resolution resolve(std::span<const Norm> norms, const ConsequenceTable& consequences,
                   const Assignment& a);

/// Same selection over norms already known to apply.
Resolution resolve_applicable(std::span<const Norm* const> applicable,
                              const ConsequenceTable& consequences);

bool satisfies(const Assignment& a, const Norm& n);

} // namespace lextree
