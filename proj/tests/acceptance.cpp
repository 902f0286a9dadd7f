// Acceptance checks: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "lextree/dot.hpp"
#include "lextree/engine.hpp"
#include "lextree/json_io.hpp"
#include "support.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sys/wait.h>

using namespace lextree;
using binarize::CompiledTree;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

struct Criterion {
    std::string name;
    std::chrono::milliseconds limit;
    std::function<Outcome()> check;
};

constexpr int kRandomDocuments = 200;
constexpr std::uint64_t kSeed = 20240601;

// The 200 generated documents shared by the binary-invariant and oracle checks.
const std::vector<Document>& generated() {
    static const std::vector<Document> docs = [] {
        testing::DocGen gen(kSeed, {.max_predicates = 8, .max_domain = 3, .max_depth = 5, .distinct_priorities = true});
        std::vector<Document> out;
        for (int i = 0; i < kRandomDocuments; ++i) out.push_back(gen.next());
        return out;
    }();
    return docs;
}

Outcome case_study() {
    auto tree = binarize::compile(testing::load_fixture("vietnam.lex"));
    auto trace = engine::evaluate(tree, {{"natural_person", false}});
    bool ok = trace.text == "No right to make a will" && trace.consequence == "NO_WILL_RIGHT" && trace.steps.size() == 1;
    return {ok, "outcome \"" + trace.text + "\", " + std::to_string(trace.steps.size()) + " step(s)"};
}

Outcome age_brackets() {
    auto doc = testing::load_fixture("vietnam.lex");
    auto tree = binarize::compile(doc);
    std::set<binarize::NodeIndex> leaves;
    std::set<std::string> outcomes;
    std::size_t checked = 0;
    for (const auto& a : testing::all_assignments(doc.predicates)) {
        if (!a.at("natural_person").as_bool()) continue;
        ++checked;
        auto leaf = tree.locate(a);
        leaves.insert(leaf);
        outcomes.insert(tree.leaf(leaf).consequence);
    }
    bool ok = leaves.size() == 3 && outcomes.size() == 3 && checked == 3;
    return {ok, std::to_string(leaves.size()) + " leaves, " + std::to_string(outcomes.size()) +
                    " outcomes over " + std::to_string(checked) + " assignments"};
}

// Independent structural count: reachable nodes, children per internal node.
Outcome binary_invariant() {
    std::size_t total_nodes = 0;
    for (const auto& doc : generated()) {
        auto tree = binarize::compile(doc);
        std::vector<int> parents(tree.nodes.size(), 0);
        std::size_t reachable = 0, leaves = 0;
        std::vector<binarize::NodeIndex> stack{tree.root};
        while (!stack.empty()) {
            auto i = stack.back();
            stack.pop_back();
            if (i >= tree.nodes.size()) return {false, doc.title + ": dangling child index"};
            ++reachable;
            if (tree.is_leaf(i)) {
                ++leaves;
                continue;
            }
            const auto& t = tree.test(i);
            if (t.yes == t.no) return {false, doc.title + ": internal node with one distinct child"};
            for (auto c : {t.yes, t.no}) {
                if (c >= tree.nodes.size() || ++parents[c] > 1) return {false, doc.title + ": shared or bad child"};
                stack.push_back(c);
            }
        }
        if (reachable != tree.nodes.size()) return {false, doc.title + ": unreachable nodes"};
        if (reachable != 2 * leaves - 1) return {false, doc.title + ": node count != 2*leaves-1"};
        total_nodes += reachable;
    }
    return {true, std::to_string(generated().size()) + " documents, " + std::to_string(total_nodes) + " nodes"};
}

Outcome oracle_equivalence() {
    std::size_t assignments = 0, max_space = 0;
    for (const auto& doc : generated()) {
        auto tree = binarize::compile(doc);
        if (auto bad = binarize::equivalence_check(tree, doc))
            return {false, doc.title + ": equivalence_check failed at " + to_string(*bad)};
        auto norms = testing::oracle_norms(doc);
        auto all = testing::all_assignments(doc.predicates);
        for (const auto& a : all)
            if (testing::walk_tree(tree, a) != testing::oracle_outcome(doc, norms, a))
                return {false, doc.title + ": brute-force oracle disagrees at " + to_string(a)};
        assignments += all.size();
        max_space = std::max(max_space, all.size());
    }
    return {max_space <= 6561, std::to_string(generated().size()) + " documents, " + std::to_string(assignments) +
                                   " assignments, largest space " + std::to_string(max_space)};
}

Outcome lex_specialis() {
    auto doc = testing::load_fixture("specialis.lex");
    auto norms = extract_norms(doc.root).norms;
    const Norm* general = nullptr;
    const Norm* particular = nullptr;
    for (const auto& n : norms) {
        if (n.consequence == "GENERAL_RULE") general = &n;
        if (n.consequence == "PARTICULAR_RULE") particular = &n;
    }
    if (!general || !particular || !more_specific(*particular, *general))
        return {false, "fixture lacks a general norm specialized by a particular norm"};
    Assignment overlap{{"sale_contract", true}, {"consumer_sale", true}};
    auto tree = binarize::compile(doc);
    auto via_tree = engine::evaluate(tree, overlap).consequence;
    auto r = resolve(norms, ConsequenceTable(doc.consequences), overlap);
    auto* d = std::get_if<Decided>(&r);
    bool ok = via_tree == "PARTICULAR_RULE" && d && d->consequence == "PARTICULAR_RULE";
    return {ok, "overlapping facts decide " + via_tree};
}

Outcome contradiction() {
    auto path = testing::fixture_path("conflicting.lex");
    std::string cmd = std::string(LEXTREE_CLI) + " compile " + path + " 2>&1 >/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return {false, "cannot run the command line tool"};
    std::string err;
    char buf[512];
    while (auto n = fread(buf, 1, sizeof buf, pipe)) err.append(buf, n);
    int status = pclose(pipe);
    int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;

    auto doc = testing::load_fixture("conflicting.lex");
    Assignment witness;
    try {
        binarize::compile(doc);
        return {false, "compile accepted the conflicting fixture"};
    } catch (const binarize::ConflictError& e) {
        if (e.report().conflicts.empty()) return {false, "conflict report without findings"};
        witness = e.report().conflicts[0].witness;
    }
    auto r = resolve(extract_norms(doc.root).norms, ConsequenceTable(doc.consequences), witness);
    bool reproduces = std::holds_alternative<Conflict>(r);
    bool printed = err.find(to_string(witness)) != std::string::npos;
    bool ok = code == 1 && reproduces && printed && witness.size() == doc.predicates.size();
    return {ok, "exit " + std::to_string(code) + ", witness " + to_string(witness) +
                    (reproduces ? " reproduces" : " does not reproduce") + (printed ? "" : ", witness not on stderr")};
}

Outcome round_trips() {
    int checked = 0;
    for (const auto& name : testing::lex_fixtures()) {
        auto text = testing::read_text(testing::fixture_path(name));
        auto doc = testing::load_fixture(name);
        auto once = dsl::serialize(doc);
        auto again = dsl::parse(once);
        if (!again.ok() || !(*again.document == doc) || dsl::serialize(*again.document) != once)
            return {false, name + ": serialize is not a fixpoint"};

        auto bytes = dsl::export_json(doc);
        auto back = dsl::import_json(bytes);
        if (!back.ok() || !(std::get<Document>(back.value) == doc)) return {false, name + ": document JSON round trip"};

        auto report = binarize::analyze(doc);
        auto rback = dsl::import_json(dsl::export_json(report));
        if (!rback.ok() || !(std::get<binarize::AnalysisReport>(rback.value) == report))
            return {false, name + ": report JSON round trip"};

        std::vector<std::string> outputs{once, bytes, dsl::export_json(report), dsl::export_dot(doc)};
        if (report.conflicts.empty()) {
            auto tree = binarize::compile(doc);
            auto tbytes = dsl::export_json(tree);
            auto tback = dsl::import_json(tbytes);
            if (!tback.ok() || !(std::get<CompiledTree>(tback.value) == tree))
                return {false, name + ": compiled tree JSON round trip"};
            outputs.push_back(tbytes);
            outputs.push_back(dsl::export_dot(tree));
        }
        // Second independent run from the raw source.
        auto doc2 = *dsl::parse(text).document;
        auto report2 = binarize::analyze(doc2);
        std::vector<std::string> repeat{dsl::serialize(doc2), dsl::export_json(doc2), dsl::export_json(report2),
                                        dsl::export_dot(doc2)};
        if (report2.conflicts.empty()) {
            auto tree2 = binarize::compile(doc2);
            repeat.push_back(dsl::export_json(tree2));
            repeat.push_back(dsl::export_dot(tree2));
        }
        if (outputs != repeat) return {false, name + ": repeated run differs"};
        ++checked;
    }
    return {true, std::to_string(checked) + " fixtures"};
}

Outcome session_agreement() {
    auto doc = testing::load_fixture("vietnam.lex");
    auto tree = std::make_shared<const CompiledTree>(binarize::compile(doc));
    int n = 0;
    for (const auto& a : testing::all_assignments(doc.predicates)) {
        auto s = engine::start(tree);
        while (!s.done()) {
            auto lit = std::get<engine::AwaitingAnswer>(s.status()).literal;
            s = engine::answer(s, a.at(lit.predicate) == lit.value);
        }
        auto trace = std::get<engine::Done>(s.status()).trace;
        auto expected = engine::evaluate(*tree, a);
        if (!(trace == expected)) return {false, "disagreement at " + to_string(a)};
        ++n;
    }
    return {n == 6, std::to_string(n) + " assignments agree"};
}

} // namespace

int main() {
    using namespace std::chrono_literals;
    const std::vector<Criterion> criteria{
        {"case-study-reproduction", 1000ms, case_study},
        {"age-bracket-structure", 1000ms, age_brackets},
        {"binary-invariant", 30000ms, binary_invariant},
        {"oracle-equivalence", 60000ms, oracle_equivalence},
        {"lex-specialis", 1000ms, lex_specialis},
        {"contradiction-detection", 1000ms, contradiction},
        {"round-trips", 5000ms, round_trips},
        {"session-evaluate-agreement", 5000ms, session_agreement},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        auto ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        bool in_time = ms <= double(c.limit.count());
        bool pass = o.pass && in_time;
        failures += !pass;
        char timing[96];
        std::snprintf(timing, sizeof timing, "%.1f ms (limit %lld ms)", ms, static_cast<long long>(c.limit.count()));
        std::cout << (pass ? "PASS" : "FAIL") << "  " << c.name << "  " << timing << "  " << o.detail
                  << (in_time ? "" : "  [over time limit]") << "\n";
    }
    std::cout << (failures ? "FAILED " : "ALL PASSED ") << criteria.size() - failures << "/" << criteria.size() << "\n";
    return failures ? 1 : 0;
}
