#pragma once

// Shared test helpers: fixture loading, a random document generator and
// brute-force oracles written independently of the library's resolver.

#include "lextree/binarize.hpp"
#include "lextree/dsl.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace testing {

using namespace lextree;

inline std::string fixture_path(const std::string& name) { return std::string(LEXTREE_FIXTURES) + "/" + name; }

inline std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline Document load_fixture(const std::string& name) {
    auto r = dsl::parse(read_text(fixture_path(name)));
    if (!r.ok()) {
        std::string msg = name + " failed to parse:";
        for (const auto& d : r.diagnostics) msg += "\n  " + format_diagnostic(d);
        throw std::runtime_error(msg);
    }
    return *r.document;
}

inline const std::vector<std::string>& lex_fixtures() {
    static const std::vector<std::string> names{"vietnam.lex", "china.lex", "specialis.lex", "conflicting.lex",
                                                "minimal.lex"};
    return names;
}

// ---- oracles ---------------------------------------------------------------

using Facts = std::map<std::string, Value>;

struct OracleNorm {
    std::string leaf;
    Facts condition;
    std::string consequence;
};

inline void walk_paths(const LatentNode& node, Facts& path, bool clash, std::vector<OracleNorm>& out) {
    if (const auto* leaf = std::get_if<LeafNode>(&node.payload)) {
        if (!clash) out.push_back({node.id, path, leaf->consequence});
        return;
    }
    if (const auto* cat = std::get_if<CategoryNode>(&node.payload)) {
        for (const auto& child : cat->children) walk_paths(child, path, clash, out);
        return;
    }
    const auto& ask = std::get<AskNode>(node.payload);
    for (const auto& br : ask.branches) {
        auto it = path.find(ask.predicate);
        if (it != path.end()) {
            walk_paths(br.child, path, clash || !(it->second == br.answer), out);
        } else {
            path[ask.predicate] = br.answer;
            walk_paths(br.child, path, clash, out);
            path.erase(ask.predicate);
        }
    }
}

/// Every consistent root-to-leaf path as a norm.
inline std::vector<OracleNorm> oracle_norms(const Document& doc) {
    std::vector<OracleNorm> out;
    Facts path;
    walk_paths(doc.root, path, false, out);
    return out;
}

inline bool applies(const OracleNorm& n, const Facts& a) {
    for (const auto& [p, v] : n.condition) {
        auto it = a.find(p);
        if (it == a.end() || !(it->second == v)) return false;
    }
    return true;
}

inline bool strict_subset(const Facts& small, const Facts& big) {
    if (small.size() >= big.size()) return false;
    for (const auto& [p, v] : small) {
        auto it = big.find(p);
        if (it == big.end() || !(it->second == v)) return false;
    }
    return true;
}

inline constexpr const char* kOracleConflict = "<conflict>";

/// Outcome id by brute force: the consequence, the default or UNREGULATED
/// when nothing applies, or kOracleConflict.
inline std::string oracle_outcome(const Document& doc, const std::vector<OracleNorm>& norms, const Facts& a) {
    std::vector<const OracleNorm*> applicable;
    for (const auto& n : norms)
        if (applies(n, a)) applicable.push_back(&n);
    if (applicable.empty()) return doc.default_consequence.value_or(std::string(kUnregulatedId));

    std::vector<const OracleNorm*> maximal;
    for (const auto* n : applicable) {
        bool beaten = false;
        for (const auto* m : applicable) beaten = beaten || strict_subset(n->condition, m->condition);
        if (!beaten) maximal.push_back(n);
    }
    auto priority = [&](const std::string& id) {
        for (const auto& c : doc.consequences)
            if (c.id == id) return c.priority;
        throw std::logic_error("undeclared consequence " + id);
    };
    int best = 1 << 30;
    for (const auto* n : maximal) best = std::min(best, priority(n->consequence));
    std::vector<std::string> ids;
    for (const auto* n : maximal)
        if (priority(n->consequence) == best) ids.push_back(n->consequence);
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    return ids.size() == 1 ? ids[0] : kOracleConflict;
}

/// All complete assignments, first predicate varying slowest.
inline std::vector<Facts> all_assignments(const std::vector<Predicate>& preds) {
    std::vector<Facts> out{Facts{}};
    for (const auto& p : preds) {
        std::vector<Facts> next;
        for (const auto& partial : out) {
            for (const auto& v : p.values()) {
                Facts f = partial;
                f[p.id] = v;
                next.push_back(std::move(f));
            }
        }
        out = std::move(next);
    }
    return out;
}

/// Outcome of walking the compiled tree, without the library's locate().
inline std::string walk_tree(const binarize::CompiledTree& tree, const Facts& a) {
    binarize::NodeIndex i = tree.root;
    for (std::size_t guard = 0; guard <= tree.nodes.size(); ++guard) {
        if (const auto* leaf = std::get_if<binarize::LeafOutcome>(&tree.nodes[i])) return leaf->consequence;
        const auto& t = std::get<binarize::TestNode>(tree.nodes[i]);
        i = a.at(t.literal.predicate) == t.literal.value ? t.yes : t.no;
    }
    throw std::logic_error("cycle in compiled tree");
}

// ---- generator -------------------------------------------------------------

struct GenOptions {
    int max_predicates = 8;
    int max_domain = 3;
    int max_depth = 5;
    /// Distinct consequence priorities rule out conflicts.
    bool distinct_priorities = true;
};

class DocGen {
public:
    explicit DocGen(std::uint64_t seed, GenOptions options = {}) : rng_(seed), opt_(options) {}

    Document next() {
        Document doc;
        doc.title = "generated " + std::to_string(counter_++);

        int npred = uniform(1, opt_.max_predicates);
        for (int i = 0; i < npred; ++i) {
            Predicate p;
            p.id = "p" + std::to_string(i);
            p.prompt = "Question " + std::to_string(i) + "?";
            if (chance(0.5)) {
                p.domain = Predicate::Boolean{};
            } else {
                std::vector<std::string> values;
                int size = uniform(2, std::max(2, opt_.max_domain));
                for (int v = 0; v < size; ++v) values.push_back(std::string(1, char('a' + v)));
                p.domain = Predicate::Enumerated{values};
            }
            p.gate = chance(0.25);
            static const int ranks[] = {0, 10, 20, 100, 100};
            p.rank = ranks[uniform(0, 4)];
            doc.predicates.push_back(p);
        }

        int ncons = uniform(2, 6);
        std::vector<int> priorities;
        for (int i = 0; i < ncons; ++i) priorities.push_back(opt_.distinct_priorities ? 10 * (i + 1) : (chance(0.5) ? 50 : 100));
        std::shuffle(priorities.begin(), priorities.end(), rng_);
        for (int i = 0; i < ncons; ++i)
            doc.consequences.push_back({"C" + std::to_string(i), "Consequence " + std::to_string(i), priorities[i], {}});
        if (chance(0.3)) doc.default_consequence = doc.consequences[0].id;

        doc.root = chance(0.5) ? category(doc, opt_.max_depth) : ask(doc, opt_.max_depth);
        assign_path_ids(doc.root);
        return doc;
    }

    std::mt19937_64& rng() { return rng_; }

private:
    int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
    bool chance(double p) { return std::bernoulli_distribution(p)(rng_); }

    LatentNode node(const Document& doc, int depth) {
        if (depth <= 0 || chance(0.3)) return leaf(doc);
        return chance(0.15) ? category(doc, depth) : ask(doc, depth);
    }

    LatentNode leaf(const Document& doc) {
        return make_leaf("", doc.consequences[uniform(0, int(doc.consequences.size()) - 1)].id);
    }

    LatentNode ask(const Document& doc, int depth) {
        const auto& p = doc.predicates[uniform(0, int(doc.predicates.size()) - 1)];
        std::vector<Branch> branches;
        for (const auto& v : p.values()) branches.push_back({v, node(doc, depth - 1), {}});
        return make_ask("", p.id, std::move(branches));
    }

    LatentNode category(const Document& doc, int depth) {
        static const TaxonomyCategory kinds[] = {TaxonomyCategory::subject(), TaxonomyCategory::object(),
                                                 TaxonomyCategory::contents(), TaxonomyCategory::lifecycle()};
        std::vector<LatentNode> children;
        int n = uniform(1, 3);
        for (int i = 0; i < n; ++i) children.push_back(node(doc, depth - 1));
        std::string label = "Group " + std::to_string(uniform(0, 99));
        if (chance(0.3)) return make_category("", TaxonomyCategory::custom(label), label, std::move(children));
        return make_category("", kinds[uniform(0, 3)], label, std::move(children));
    }

    std::mt19937_64 rng_;
    GenOptions opt_;
    int counter_ = 0;
};

} // namespace testing
