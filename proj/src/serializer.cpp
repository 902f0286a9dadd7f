#include "lextree/dsl.hpp"

namespace lextree::dsl {

namespace {

std::string quote(std::string_view s) {
    std::string out = "\"";
    for (char c : s) {
        switch (c) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\t': out += "\\t"; break;
        default: out += c;
        }
    }
    return out + "\"";
}

void consequence_tail(std::string& out, const Consequence& c) {
    out += c.id + " " + quote(c.text);
    if (c.priority != kDefaultPriority) out += " priority " + std::to_string(c.priority);
    out += '\n';
}

void write_node(std::string& out, const LatentNode& node, int depth);

void indent(std::string& out, int depth) { out.append(static_cast<std::size_t>(depth) * 2, ' '); }

// The node header goes on the current line; children follow one level deeper.
void write_node(std::string& out, const LatentNode& node, int depth) {
    if (const auto* leaf = std::get_if<LeafNode>(&node.payload)) {
        out += "leaf " + leaf->consequence + "\n";
    } else if (const auto* cat = std::get_if<CategoryNode>(&node.payload)) {
        out += "category ";
        if (cat->category.kind != CategoryKind::Custom) {
            out += to_string(cat->category.kind);
            out += ' ';
        }
        out += quote(cat->label) + " {\n";
        for (const auto& child : cat->children) {
            indent(out, depth + 1);
            write_node(out, child, depth + 1);
        }
        indent(out, depth);
        out += "}\n";
    } else {
        const auto& ask = std::get<AskNode>(node.payload);
        out += "ask " + ask.predicate + " {\n";
        for (const auto& br : ask.branches) {
            indent(out, depth + 1);
            out += br.answer.to_string() + " -> ";
            write_node(out, br.child, depth + 1);
        }
        indent(out, depth);
        out += "}\n";
    }
}

} // namespace

std::string serialize(const Document& doc) {
    std::string out = "tree " + quote(doc.title) + "\n";
    const Consequence* fallback = doc.default_consequence ? doc.find_consequence(*doc.default_consequence) : nullptr;
    if (fallback) {
        out += "default consequence ";
        consequence_tail(out, *fallback);
    }
    for (const auto& p : doc.predicates) {
        out += "predicate " + p.id + " " + quote(p.prompt) + " ";
        if (p.is_boolean()) {
            out += "bool";
        } else {
            out += "options [";
            const auto& values = std::get<Predicate::Enumerated>(p.domain).values;
            for (std::size_t i = 0; i < values.size(); ++i) out += (i ? ", " : "") + values[i];
            out += "]";
        }
        if (p.gate) out += " gate";
        if (p.rank != kDefaultRank) out += " rank " + std::to_string(p.rank);
        out += '\n';
    }
    for (const auto& c : doc.consequences) {
        if (&c == fallback) continue;
        out += "consequence ";
        consequence_tail(out, c);
    }
    out += '\n';
    write_node(out, doc.root, 0);
    return out;
}

} // namespace lextree::dsl
