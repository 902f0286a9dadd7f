#pragma once

#include "lextree/model.hpp"

#include <optional>
#include <string>
#include <vector>

namespace lextree {

/// A machine-readable latent tree with its declarations. Declaration order
/// is semantic: it breaks ties when ordering tests during compilation.
struct Document {
    std::string title;
    std::optional<std::string> default_consequence; // always consequences[0] when set
    std::vector<Predicate> predicates;
    std::vector<Consequence> consequences;
    LatentNode root;

    const Predicate* find_predicate(std::string_view id) const;
    const Consequence* find_consequence(std::string_view id) const;

    friend bool operator==(const Document&, const Document&) = default;
};

/// Checks every structural invariant of a document: unique ids, well-formed
/// domains, declared references, exhaustive non-duplicated branches.
/// Returns an empty list for a valid document.
std::vector<Diagnostic> validate(const Document& doc);

/// The declaration part of validate(), for compiled trees which carry
/// declarations but no latent tree.
std::vector<Diagnostic> validate_declarations(const std::vector<Predicate>& predicates,
                                              const std::vector<Consequence>& consequences,
                                              const std::optional<std::string>& default_consequence);

/// Product of all predicate domain sizes, saturating at `cap + 1`.
std::size_t assignment_space(std::span<const Predicate> predicates, std::size_t cap);

} // namespace lextree
