#include "lextree/binarize.hpp"

namespace lextree::binarize {

std::string format_report(const AnalysisReport& r) {
    std::string out;
    auto line = [&](const std::string& s) { out += s + "\n"; };

    line("document: " + r.title);
    line("norms: " + std::to_string(r.norm_count));
    line("tree: " + std::to_string(r.stats.internal_nodes) + " tests, " + std::to_string(r.stats.leaves) +
         " leaves, depth " + std::to_string(r.stats.depth));
    if (r.exhaustive) line("assignments checked: " + std::to_string(r.assignments_checked));

    line("conflicts: " + std::to_string(r.conflicts.size()));
    for (const auto& c : r.conflicts) {
        std::string norms;
        for (const auto& n : c.norms) norms += (norms.empty() ? "" : ", ") + n;
        line("  - norms [" + norms + "]");
        line("    witness " + to_string(c.witness));
    }

    if (r.exhaustive) {
        line("shadowed norms: " + std::to_string(r.shadowed.size()));
        for (const auto& n : r.shadowed) line("  - " + n);
        line("unregulated regions: " + std::to_string(r.unregulated_regions.size()));
        for (const auto& region : r.unregulated_regions) line("  - " + to_string(region));
    }

    if (!r.warnings.empty()) {
        line("warnings: " + std::to_string(r.warnings.size()));
        for (const auto& w : r.warnings) line("  - " + std::string(to_string(w.code)) + ": " + w.message);
    }
    return out;
}

} // namespace lextree::binarize
