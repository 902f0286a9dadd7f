#include "lextree/binarize.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <tuple>

namespace lextree::binarize {

const Predicate* CompiledTree::find_predicate(std::string_view id) const {
    auto it = std::find_if(predicates.begin(), predicates.end(),
                           [&](const Predicate& p) { return p.id == id; });
    return it == predicates.end() ? nullptr : &*it;
}

std::string CompiledTree::consequence_text(std::string_view id) const {
    if (id == kUnregulatedId) return std::string(kUnregulatedText);
    for (const auto& c : consequences)
        if (c.id == id) return c.text;
    return {};
}

TreeStats CompiledTree::stats() const {
    TreeStats s;
    if (nodes.empty()) return s;
    std::vector<std::pair<NodeIndex, std::size_t>> stack{{root, 0}};
    while (!stack.empty()) {
        auto [i, depth] = stack.back();
        stack.pop_back();
        if (const auto* t = std::get_if<TestNode>(&nodes.at(i))) {
            ++s.internal_nodes;
            stack.push_back({t->no, depth + 1});
            stack.push_back({t->yes, depth + 1});
        } else {
            ++s.leaves;
            s.depth = std::max(s.depth, depth);
        }
    }
    return s;
}

NodeIndex CompiledTree::locate(const Assignment& facts) const {
    NodeIndex i = root;
    while (const auto* t = std::get_if<TestNode>(&nodes.at(i))) {
        auto it = facts.find(t->literal.predicate);
        if (it == facts.end())
            throw Error(ErrorCode::MissingFact, "no fact given for predicate '" + t->literal.predicate + "'");
        i = it->second == t->literal.value ? t->yes : t->no;
    }
    return i;
}

std::vector<std::string> check_structure(const CompiledTree& tree) {
    std::vector<std::string> problems;
    if (tree.nodes.empty()) return {"tree has no nodes"};
    if (tree.root >= tree.nodes.size()) return {"root index out of range"};

    std::vector<int> parents(tree.nodes.size(), 0);
    std::size_t leaves = 0;
    for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
        if (const auto* t = std::get_if<TestNode>(&tree.nodes[i])) {
            for (NodeIndex child : {t->yes, t->no}) {
                if (child >= tree.nodes.size()) {
                    problems.push_back("node " + std::to_string(i) + " points outside the arena");
                    continue;
                }
                ++parents[child];
            }
            if (t->yes == t->no) problems.push_back("node " + std::to_string(i) + " has identical yes/no children");
            const Predicate* p = tree.find_predicate(t->literal.predicate);
            if (!p || !p->accepts(t->literal.value))
                problems.push_back("node " + std::to_string(i) + " tests undeclared literal " + t->literal.to_string());
        } else {
            ++leaves;
            const auto& leaf = std::get<LeafOutcome>(tree.nodes[i]);
            if (leaf.consequence != kUnregulatedId &&
                std::none_of(tree.consequences.begin(), tree.consequences.end(),
                             [&](const Consequence& c) { return c.id == leaf.consequence; }))
                problems.push_back("leaf " + std::to_string(i) + " names undeclared consequence " + leaf.consequence);
        }
    }
    if (!problems.empty()) return problems;

    for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
        int expected = i == tree.root ? 0 : 1;
        if (parents[i] != expected)
            problems.push_back("node " + std::to_string(i) + " has " + std::to_string(parents[i]) + " parents");
    }
    // With unique parents and a parentless root, reachability is a count check.
    TreeStats s = tree.stats();
    if (problems.empty() && s.node_count() != tree.nodes.size())
        problems.push_back("unreachable nodes in arena");
    if (problems.empty() && tree.nodes.size() != 2 * leaves - 1)
        problems.push_back("node count is not 2*leaves-1");
    return problems;
}

ConflictError::ConflictError(AnalysisReport report)
    : Error(ErrorCode::ConflictDetected,
            std::to_string(report.conflicts.size()) + " conflict(s) between norms; first witness " +
                (report.conflicts.empty() ? std::string("{}") : to_string(report.conflicts.front().witness))),
      report_(std::move(report)) {}

namespace {

struct IndexedLiteral {
    std::size_t predicate;
    std::size_t value;
};

struct IndexedNorm {
    const Norm* norm;
    std::vector<IndexedLiteral> literals;
};

std::vector<IndexedNorm> index_norms(const std::vector<Norm>& norms, const std::vector<Predicate>& predicates) {
    std::map<std::string, std::size_t, std::less<>> pos;
    for (std::size_t i = 0; i < predicates.size(); ++i) pos[predicates[i].id] = i;
    std::vector<IndexedNorm> out;
    for (const auto& n : norms) {
        IndexedNorm in{&n, {}};
        for (const auto& lit : n.condition) {
            std::size_t p = pos.at(lit.predicate);
            in.literals.push_back({p, *predicates[p].index_of(lit.value)});
        }
        out.push_back(std::move(in));
    }
    return out;
}

// Candidate values per predicate; a predicate is fixed when one remains.
using Region = std::vector<std::vector<bool>>;

std::size_t candidate_count(const std::vector<bool>& c) {
    return static_cast<std::size_t>(std::count(c.begin(), c.end(), true));
}

class Builder {
public:
    Builder(const Document& doc, const std::vector<Norm>& norms)
        : doc_(doc), norms_(index_norms(norms, doc.predicates)), table_(doc.consequences) {
        for (std::size_t i = 0; i < doc.predicates.size(); ++i) order_.push_back(i);
        std::stable_sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) {
            const auto& pa = doc.predicates[a];
            const auto& pb = doc.predicates[b];
            return std::make_tuple(!pa.gate, pa.rank) < std::make_tuple(!pb.gate, pb.rank);
        });
    }

    CompiledTree build() {
        Region region;
        for (const auto& p : doc_.predicates) region.emplace_back(p.domain_size(), true);
        std::vector<std::size_t> live(norms_.size());
        for (std::size_t i = 0; i < live.size(); ++i) live[i] = i;
        tree_.root = split(region, live, {});
        tree_.source_title = doc_.title;
        tree_.default_consequence = doc_.default_consequence;
        tree_.predicates = doc_.predicates;
        tree_.consequences = doc_.consequences;
        return std::move(tree_);
    }

    const std::vector<ConflictFinding>& conflicts() const { return conflicts_; }

private:
    enum class State { Falsified, Entailed, Live };

    State state(const IndexedNorm& n, const Region& region) const {
        bool entailed = true;
        for (const auto& lit : n.literals) {
            const auto& cand = region[lit.predicate];
            if (!cand[lit.value]) return State::Falsified;
            if (candidate_count(cand) > 1) entailed = false;
        }
        return entailed ? State::Entailed : State::Live;
    }

    NodeIndex emit(BinNode node) {
        tree_.nodes.push_back(std::move(node));
        return static_cast<NodeIndex>(tree_.nodes.size() - 1);
    }

    // `candidates` holds norms not falsified by any enclosing region.
    NodeIndex split(Region& region, const std::vector<std::size_t>& candidates, std::vector<std::size_t> entailed) {
        std::vector<std::size_t> live;
        for (std::size_t i : candidates) {
            switch (state(norms_[i], region)) {
            case State::Falsified: break;
            case State::Entailed: entailed.push_back(i); break;
            case State::Live: live.push_back(i); break;
            }
        }
        if (live.empty()) return leaf(region, entailed);

        std::size_t next = pick_predicate(region, live);
        std::size_t value = 0;
        while (!region[next][value]) ++value;

        NodeIndex self = emit(TestNode{{doc_.predicates[next].id, doc_.predicates[next].value_at(value)}, 0, 0});
        std::vector<bool> saved = region[next];

        region[next].assign(saved.size(), false);
        region[next][value] = true;
        NodeIndex yes = split(region, live, entailed);

        region[next] = saved;
        region[next][value] = false;
        NodeIndex no = split(region, live, entailed);

        region[next] = saved;
        auto& t = std::get<TestNode>(tree_.nodes[self]);
        t.yes = yes;
        t.no = no;
        return self;
    }

    std::size_t pick_predicate(const Region& region, const std::vector<std::size_t>& live) const {
        std::vector<bool> open(region.size(), false);
        for (std::size_t i : live)
            for (const auto& lit : norms_[i].literals)
                if (candidate_count(region[lit.predicate]) > 1) open[lit.predicate] = true;
        for (std::size_t p : order_)
            if (open[p]) return p;
        return order_.front(); // unreachable: a live norm has an undecided literal
    }

    NodeIndex leaf(const Region& region, std::vector<std::size_t> entailed) {
        std::sort(entailed.begin(), entailed.end());
        std::vector<const Norm*> applicable;
        for (std::size_t i : entailed) applicable.push_back(norms_[i].norm);
        Resolution r = resolve_applicable(applicable, table_);

        if (const auto* d = std::get_if<Decided>(&r)) return emit(LeafOutcome{d->consequence, d->winners.front()});
        if (std::holds_alternative<Unregulated>(r))
            return emit(LeafOutcome{doc_.default_consequence.value_or(std::string(kUnregulatedId)), std::nullopt});

        const auto& c = std::get<Conflict>(r);
        Assignment witness;
        for (std::size_t p = 0; p < region.size(); ++p) {
            std::size_t v = 0;
            while (!region[p][v]) ++v;
            witness[doc_.predicates[p].id] = doc_.predicates[p].value_at(v);
        }
        conflicts_.push_back({c.norms, std::move(witness)});
        // Placeholder so analysis can still measure the tree.
        return emit(LeafOutcome{applicable.front()->consequence, std::nullopt});
    }

    const Document& doc_;
    std::vector<IndexedNorm> norms_;
    ConsequenceTable table_;
    std::vector<std::size_t> order_;
    CompiledTree tree_;
    std::vector<ConflictFinding> conflicts_;
};

struct Built {
    CompiledTree tree;
    std::vector<ConflictFinding> conflicts;
    ExtractedNorms extracted;
};

Built build(const Document& doc) {
    Built out;
    out.extracted = extract_norms(doc.root);
    if (out.extracted.norms.empty()) throw Error(ErrorCode::NoNorms, "document '" + doc.title + "' yields no norms");
    Builder b(doc, out.extracted.norms);
    out.tree = b.build();
    out.conflicts = b.conflicts();
    auto problems = check_structure(out.tree);
    if (!problems.empty()) throw std::logic_error("compiled tree is malformed: " + problems.front());
    return out;
}

void to_indices(const Assignment& a, const std::vector<Predicate>& predicates, std::vector<std::size_t>& out) {
    out.clear();
    for (const auto& p : predicates) out.push_back(*p.index_of(a.at(p.id)));
}

} // namespace

CompiledTree compile(const Document& doc) {
    Built b = build(doc);
    if (!b.conflicts.empty()) {
        AnalysisReport report;
        report.title = doc.title;
        report.conflicts = std::move(b.conflicts);
        report.stats = b.tree.stats();
        report.warnings = std::move(b.extracted.warnings);
        report.norm_count = b.extracted.norms.size();
        report.exhaustive = false;
        throw ConflictError(std::move(report));
    }
    return std::move(b.tree);
}

namespace {

std::uint64_t exact_space(std::span<const Predicate> predicates) {
    std::uint64_t total = 1;
    for (const auto& p : predicates) {
        std::uint64_t d = p.domain_size();
        if (total > UINT64_MAX / d) return UINT64_MAX;
        total *= d;
    }
    return total;
}

void check_cap(std::span<const Predicate> predicates, std::size_t cap) {
    std::uint64_t space = exact_space(predicates);
    if (space > cap)
        throw Error(ErrorCode::StateSpaceTooLarge,
                    "assignment space of " + (space == UINT64_MAX ? std::string("more than 2^64") : std::to_string(space)) +
                        " exceeds the cap of " + std::to_string(cap));
}

// Merges complete unregulated assignments into cubes (-1 = don't care),
// taking predicates in declaration order.
std::vector<std::vector<int>> merge_cubes(std::vector<std::vector<int>> cubes, const std::vector<Predicate>& predicates) {
    for (std::size_t p = 0; p < predicates.size(); ++p) {
        std::vector<std::vector<int>> keys;
        std::map<std::vector<int>, std::vector<int>> values;
        for (const auto& cube : cubes) {
            std::vector<int> key = cube;
            key[p] = -1;
            auto [it, inserted] = values.try_emplace(key);
            if (inserted) keys.push_back(key);
            it->second.push_back(cube[p]);
        }
        std::vector<std::vector<int>> merged;
        for (const auto& key : keys) {
            const auto& vals = values[key];
            std::set<int> distinct(vals.begin(), vals.end());
            bool full = !distinct.contains(-1) && distinct.size() == predicates[p].domain_size();
            if (full) {
                merged.push_back(key);
            } else {
                for (int v : vals) {
                    auto cube = key;
                    cube[p] = v;
                    merged.push_back(std::move(cube));
                }
            }
        }
        cubes = std::move(merged);
    }
    return cubes;
}

} // namespace

AnalysisReport analyze(const Document& doc, std::size_t cap) {
    check_cap(doc.predicates, cap);
    Built b = build(doc);
    const auto& norms = b.extracted.norms;
    auto indexed = index_norms(norms, doc.predicates);
    ConsequenceTable table(doc.consequences);

    AnalysisReport report;
    report.title = doc.title;
    report.stats = b.tree.stats();
    report.warnings = b.extracted.warnings;
    report.norm_count = norms.size();

    std::vector<bool> won(norms.size(), false);
    std::map<std::vector<std::string>, std::size_t> conflict_index;
    std::vector<std::vector<int>> unregulated;
    std::vector<std::size_t> values;
    std::map<std::string, std::size_t, std::less<>> norm_pos;
    for (std::size_t i = 0; i < norms.size(); ++i) norm_pos[norms[i].id] = i;

    for_each_assignment(doc.predicates, [&](const Assignment& a) {
        ++report.assignments_checked;
        to_indices(a, doc.predicates, values);
        std::vector<const Norm*> applicable;
        for (const auto& n : indexed) {
            bool ok = std::all_of(n.literals.begin(), n.literals.end(),
                                  [&](const IndexedLiteral& l) { return values[l.predicate] == l.value; });
            if (ok) applicable.push_back(n.norm);
        }
        Resolution r = resolve_applicable(applicable, table);
        if (const auto* d = std::get_if<Decided>(&r)) {
            for (const auto& id : d->winners) won[norm_pos.at(id)] = true;
        } else if (const auto* c = std::get_if<Conflict>(&r)) {
            if (conflict_index.try_emplace(c->norms, report.conflicts.size()).second)
                report.conflicts.push_back({c->norms, a});
        } else {
            unregulated.emplace_back(values.begin(), values.end());
        }
    });

    for (std::size_t i = 0; i < norms.size(); ++i)
        if (!won[i]) report.shadowed.push_back(norms[i].id);

    for (const auto& cube : merge_cubes(std::move(unregulated), doc.predicates)) {
        Assignment region;
        for (std::size_t p = 0; p < cube.size(); ++p)
            if (cube[p] >= 0) region[doc.predicates[p].id] = doc.predicates[p].value_at(static_cast<std::size_t>(cube[p]));
        report.unregulated_regions.push_back(std::move(region));
    }
    return report;
}

std::optional<Assignment> equivalence_check(const CompiledTree& tree, const Document& doc, std::size_t cap) {
    check_cap(doc.predicates, cap);
    auto norms = extract_norms(doc.root).norms;
    ConsequenceTable table(doc.consequences);
    std::string fallback = doc.default_consequence.value_or(std::string(kUnregulatedId));

    std::optional<Assignment> counterexample;
    for_each_assignment(doc.predicates, [&](const Assignment& a) {
        if (counterexample) return;
        Resolution r = resolve(norms, table, a);
        std::optional<std::string> expected;
        if (const auto* d = std::get_if<Decided>(&r)) expected = d->consequence;
        else if (std::holds_alternative<Unregulated>(r)) expected = fallback;
        const auto& actual = tree.leaf(tree.locate(a)).consequence;
        if (!expected || *expected != actual) counterexample = a;
    });
    return counterexample;
}

} // namespace lextree::binarize
