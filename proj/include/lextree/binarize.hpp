#pragma once

#include "lextree/document.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace lextree::binarize {

using NodeIndex = std::uint32_t;

struct TestNode {
    Literal literal;
    NodeIndex yes;
    NodeIndex no;

    friend bool operator==(const TestNode&, const TestNode&) = default;
};

struct LeafOutcome {
    std::string consequence;
    std::optional<std::string> winning_norm;

    friend bool operator==(const LeafOutcome&, const LeafOutcome&) = default;
};

using BinNode = std::variant<TestNode, LeafOutcome>;

struct TreeStats {
    std::size_t internal_nodes = 0;
    std::size_t leaves = 0;
    std::size_t depth = 0; // edges on the longest root-to-leaf path

    std::size_t node_count() const { return internal_nodes + leaves; }
    friend bool operator==(const TreeStats&, const TreeStats&) = default;
};

/// Executable decision tree. Nodes are stored in pre-order (yes subtree
/// before no subtree), so the root is normally index 0.
struct CompiledTree {
    std::vector<BinNode> nodes;
    NodeIndex root = 0;
    std::string source_title;
    std::optional<std::string> default_consequence;
    std::vector<Predicate> predicates;
    std::vector<Consequence> consequences;

    const Predicate* find_predicate(std::string_view id) const;
    /// Declared text, or the built-in text for UNREGULATED.
    std::string consequence_text(std::string_view id) const;

    bool is_leaf(NodeIndex i) const { return std::holds_alternative<LeafOutcome>(nodes.at(i)); }
    const TestNode& test(NodeIndex i) const { return std::get<TestNode>(nodes.at(i)); }
    const LeafOutcome& leaf(NodeIndex i) const { return std::get<LeafOutcome>(nodes.at(i)); }

    TreeStats stats() const;

    /// Walks from the root to a leaf. Throws Error(MissingFact) naming the
    /// first tested predicate absent from `facts`.
    NodeIndex locate(const Assignment& facts) const;

    friend bool operator==(const CompiledTree&, const CompiledTree&) = default;
};

/// Structural problems (wrong child count, cycles, unreachable nodes, dangling
/// indices, undeclared literals); empty when the tree is well formed.
std::vector<std::string> check_structure(const CompiledTree& tree);

struct ConflictFinding {
    std::vector<std::string> norms;
    Assignment witness; // complete; resolve() yields Conflict on it

    friend bool operator==(const ConflictFinding&, const ConflictFinding&) = default;
};

struct AnalysisReport {
    std::string title;
    std::vector<ConflictFinding> conflicts;
    std::vector<std::string> shadowed;         // norm ids that never win
    std::vector<Assignment> unregulated_regions; // partial assignments; omitted predicates are don't-care
    TreeStats stats;
    std::vector<Warning> warnings;
    std::size_t norm_count = 0;
    std::size_t assignments_checked = 0;
    /// False for reports produced by a failed compile, which only carry the
    /// conflicts met while building the tree.
    bool exhaustive = true;

    friend bool operator==(const AnalysisReport&, const AnalysisReport&) = default;
};

class ConflictError : public Error {
public:
    explicit ConflictError(AnalysisReport report);
    const AnalysisReport& report() const noexcept { return report_; }

private:
    AnalysisReport report_;
};

inline constexpr std::size_t kDefaultStateCap = 1'000'000;

/// Lowers the document's norms into a binary decision tree by splitting the
/// space of partial assignments. At each region the next test is taken from
/// the predicates still distinguishing live norms, ordered gate first, then
/// by rank, then by declaration order; enumerated predicates lower to a
/// cascade of equality tests in domain order. Regions where no norm applies
/// become leaves carrying the default consequence (or UNREGULATED).
///
/// Throws ConflictError when some region has no unique winner, and
/// Error(NoNorms) when the tree yields no satisfiable norm.
CompiledTree compile(const Document& doc);

/// Exhaustive audit over every complete assignment of the declared
/// predicates. Throws Error(StateSpaceTooLarge) beyond `cap`.
AnalysisReport analyze(const Document& doc, std::size_t cap = kDefaultStateCap);

/// Compares tree traversal with reference resolution on every complete
/// assignment; returns the first disagreeing assignment in canonical order.
std::optional<Assignment> equivalence_check(const CompiledTree& tree, const Document& doc,
                                            std::size_t cap = kDefaultStateCap);

/// Calls `f(const Assignment&)` for every complete assignment, first declared
/// predicate most significant, values in domain order.
template <class F>
void for_each_assignment(std::span<const Predicate> predicates, F&& f) {
    std::vector<std::size_t> digits(predicates.size(), 0);
    Assignment a;
    for (const auto& p : predicates) a[p.id] = p.value_at(0);
    for (;;) {
        f(static_cast<const Assignment&>(a));
        std::size_t i = predicates.size();
        while (i > 0) {
            --i;
            if (++digits[i] < predicates[i].domain_size()) {
                a[predicates[i].id] = predicates[i].value_at(digits[i]);
                break;
            }
            digits[i] = 0;
            a[predicates[i].id] = predicates[i].value_at(0);
            if (i == 0) return;
        }
        if (predicates.empty()) return;
    }
}

/// Human-readable report for terminals.
std::string format_report(const AnalysisReport& report);

} // namespace lextree::binarize
