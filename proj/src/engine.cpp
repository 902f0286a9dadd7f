#include "lextree/engine.hpp"

namespace lextree::engine {

std::string question_text(const Predicate& predicate, const Literal& literal) {
    if (predicate.is_boolean()) return predicate.prompt;
    return predicate.prompt + " [" + literal.value.to_string() + "]";
}

namespace {

TraceStep make_step(const CompiledTree& tree, const Literal& literal, bool reply) {
    const Predicate* p = tree.find_predicate(literal.predicate);
    std::string prompt = p ? p->prompt : literal.predicate;
    std::string question = p ? question_text(*p, literal) : literal.to_string();
    return {std::move(prompt), std::move(question), literal, reply};
}

Done finish(const CompiledTree& tree, NodeIndex leaf, std::vector<TraceStep> steps) {
    const auto& outcome = tree.leaf(leaf);
    return Done{Trace{std::move(steps), outcome.consequence, tree.consequence_text(outcome.consequence),
                      outcome.winning_norm}};
}

AwaitingAnswer awaiting(const CompiledTree& tree, NodeIndex node) {
    const auto& t = tree.test(node);
    TraceStep s = make_step(tree, t.literal, false);
    return {node, std::move(s.prompt), std::move(s.question), t.literal};
}

SessionStatus status_at(const CompiledTree& tree, NodeIndex node, const std::vector<AnsweredStep>& answered,
                        std::optional<bool> extra = std::nullopt, std::optional<NodeIndex> extra_from = std::nullopt) {
    if (!tree.is_leaf(node)) return awaiting(tree, node);
    std::vector<TraceStep> steps;
    for (const auto& a : answered) steps.push_back(make_step(tree, a.literal, a.reply));
    if (extra) steps.push_back(make_step(tree, tree.test(*extra_from).literal, *extra));
    return finish(tree, node, std::move(steps));
}

} // namespace

Trace evaluate(const CompiledTree& tree, const Assignment& facts, FactMode mode) {
    for (const auto& [pred, value] : facts) {
        const Predicate* p = tree.find_predicate(pred);
        if (!p) {
            if (mode == FactMode::Strict)
                throw Error(ErrorCode::UnknownPredicate, "fact names undeclared predicate '" + pred + "'");
            continue;
        }
        if (!p->accepts(value))
            throw Error(ErrorCode::DomainMismatch,
                        "value '" + value.to_string() + "' is not in the domain of '" + pred + "'");
    }

    std::vector<TraceStep> steps;
    NodeIndex i = tree.root;
    while (!tree.is_leaf(i)) {
        const auto& t = tree.test(i);
        auto it = facts.find(t.literal.predicate);
        if (it == facts.end())
            throw Error(ErrorCode::MissingFact, "no fact given for predicate '" + t.literal.predicate + "'");
        bool yes = it->second == t.literal.value;
        steps.push_back(make_step(tree, t.literal, yes));
        i = yes ? t.yes : t.no;
    }
    return finish(tree, i, std::move(steps)).trace;
}

SessionStatus Session::status() const { return status_at(*tree_, cursor_, answered_); }

Session start(std::shared_ptr<const CompiledTree> tree, std::string id) {
    Session s;
    s.cursor_ = tree->root;
    s.tree_ = std::move(tree);
    s.id_ = std::move(id);
    return s;
}

Session answer(const Session& s, bool reply) {
    if (s.done()) throw Error(ErrorCode::SessionFinished, "consultation already reached a consequence");
    const auto& t = s.tree().test(s.cursor_);
    Session next = s;
    next.answered_.push_back({t.literal, s.cursor_, reply});
    next.cursor_ = reply ? t.yes : t.no;
    return next;
}

Session undo(const Session& s) {
    if (s.answered_.empty()) throw Error(ErrorCode::NothingToUndo, "no answer to undo");
    Session prev = s;
    prev.cursor_ = prev.answered_.back().node;
    prev.answered_.pop_back();
    return prev;
}

SessionStatus what_if(const Session& s, bool reply) {
    if (s.done()) throw Error(ErrorCode::SessionFinished, "consultation already reached a consequence");
    const auto& t = s.tree().test(s.cursor());
    return status_at(s.tree(), reply ? t.yes : t.no, s.answered(), reply, s.cursor());
}

Session replay(std::shared_ptr<const CompiledTree> tree, const std::vector<ReplayStep>& steps, std::string id) {
    Session s = start(std::move(tree), std::move(id));
    for (std::size_t i = 0; i < steps.size(); ++i) {
        if (s.done())
            throw Error(ErrorCode::ReplayMismatch, "replay step " + std::to_string(i) + " comes after the outcome");
        const auto& asked = s.tree().test(s.cursor()).literal;
        if (!(asked == steps[i].literal))
            throw Error(ErrorCode::ReplayMismatch, "replay step " + std::to_string(i) + " answers " +
                                                       steps[i].literal.to_string() + " but the tree asks " +
                                                       asked.to_string());
        s = answer(s, steps[i].reply);
    }
    return s;
}

} // namespace lextree::engine
