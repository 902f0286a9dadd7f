#pragma once

#include "lextree/binarize.hpp"

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace lextree::engine {

using binarize::CompiledTree;
using binarize::NodeIndex;

struct TraceStep {
    std::string prompt;
    std::string question;
    Literal literal;
    bool answer = false;

    friend bool operator==(const TraceStep&, const TraceStep&) = default;
};

struct Trace {
    std::vector<TraceStep> steps;
    std::string consequence;
    std::string text;
    std::optional<std::string> winning_norm;

    friend bool operator==(const Trace&, const Trace&) = default;
};

/// Yes/no question for a tested literal: the prompt itself for booleans,
/// `prompt [value]` for enumerated values.
std::string question_text(const Predicate& predicate, const Literal& literal);

enum class FactMode {
    Strict,  // facts naming undeclared predicates are rejected
    Lenient, // ... or ignored
};

/// Root-to-leaf walk; only facts on the path are consulted.
///
/// Throws Error(MissingFact) for the first unanswered predicate on the path,
/// Error(UnknownPredicate) for undeclared facts in strict mode, and
/// Error(DomainMismatch) for values outside a predicate's domain.
Trace evaluate(const CompiledTree& tree, const Assignment& facts, FactMode mode = FactMode::Strict);

struct AwaitingAnswer {
    NodeIndex node = 0;
    std::string prompt;
    std::string question;
    Literal literal;

    friend bool operator==(const AwaitingAnswer&, const AwaitingAnswer&) = default;
};

struct Done {
    Trace trace;

    friend bool operator==(const Done&, const Done&) = default;
};

using SessionStatus = std::variant<AwaitingAnswer, Done>;

struct AnsweredStep {
    Literal literal;
    NodeIndex node = 0;
    bool reply = false;

    friend bool operator==(const AnsweredStep&, const AnsweredStep&) = default;
};

/// Persistent consultation state. Every operation returns a new value and
/// leaves the receiver untouched, so earlier states stay valid.
class Session {
public:
    const std::string& id() const { return id_; }
    const CompiledTree& tree() const { return *tree_; }
    const std::shared_ptr<const CompiledTree>& tree_ptr() const { return tree_; }
    NodeIndex cursor() const { return cursor_; }
    const std::vector<AnsweredStep>& answered() const { return answered_; }
    bool done() const { return tree_->is_leaf(cursor_); }
    SessionStatus status() const;

    friend bool operator==(const Session& a, const Session& b) {
        return a.tree_ == b.tree_ && a.id_ == b.id_ && a.cursor_ == b.cursor_ && a.answered_ == b.answered_;
    }

private:
    friend Session start(std::shared_ptr<const CompiledTree> tree, std::string id);
    friend Session answer(const Session& s, bool reply);
    friend Session undo(const Session& s);

    std::shared_ptr<const CompiledTree> tree_;
    std::string id_;
    NodeIndex cursor_ = 0;
    std::vector<AnsweredStep> answered_;
};

Session start(std::shared_ptr<const CompiledTree> tree, std::string id = {});

/// Throws Error(SessionFinished) once the cursor is a leaf.
Session answer(const Session& s, bool reply);

/// Throws Error(NothingToUndo) at the root.
Session undo(const Session& s);

/// Status the session would have after `reply`, without creating it.
SessionStatus what_if(const Session& s, bool reply);

struct ReplayStep {
    Literal literal;
    bool reply = false;
};

/// Rebuilds a session from a client-held answer list. Throws
/// Error(ReplayMismatch) when a step's literal is not the one asked there.
Session replay(std::shared_ptr<const CompiledTree> tree, const std::vector<ReplayStep>& steps, std::string id = {});

} // namespace lextree::engine
