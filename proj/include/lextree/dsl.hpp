#pragma once

#include "lextree/document.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lextree::dsl {

struct ParseResult {
    std::optional<Document> document;
    std::vector<Diagnostic> diagnostics;

    bool ok() const { return document.has_value(); }
};

/// Parses `.lex` authoring source. Syntax errors stop at the first one;
/// semantic errors (unknown references, duplicate ids, branch coverage) are
/// all reported. Node ids are assigned from tree positions.
///
/// Grammar:
///
///     document := 'tree' STRING default? decl* node
///     default  := 'default' 'consequence' IDENT STRING ('priority' INT)?
///     decl     := 'predicate' IDENT STRING domain tag*
///               | 'consequence' IDENT STRING ('priority' INT)?
///     domain   := 'bool' | 'options' '[' IDENT (',' IDENT)* ']'
///     tag      := 'gate' | 'rank' INT
///     node     := 'category' CATKIND? STRING '{' node+ '}'
///               | 'ask' IDENT '{' branch+ '}'
///               | 'leaf' IDENT
///     branch   := answer '->' node
///     answer   := 'yes' | 'no' | IDENT
///     CATKIND  := 'subject' | 'object' | 'contents' | 'lifecycle'
ParseResult parse(std::string_view text);

/// Canonical source: declarations first, 2-space indentation, branches in
/// domain order, LF line endings.
std::string serialize(const Document& doc);

} // namespace lextree::dsl
