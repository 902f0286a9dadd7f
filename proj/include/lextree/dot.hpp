#pragma once

#include "lextree/binarize.hpp"
#include "lextree/document.hpp"

#include <string>

namespace lextree::dsl {

// Graphviz digraphs. Nodes are emitted in pre-order as n0, n1, ...; leaves are
// double-bordered and labelled with the consequence text.

/// Latent tree: categories as folders, questions labelled with prompts,
/// edges labelled with the branch answer.
std::string export_dot(const Document& doc);

/// Compiled tree: tests labelled with their yes/no question, edges `yes`/`no`.
std::string export_dot(const binarize::CompiledTree& tree);

} // namespace lextree::dsl
