#include "lextree/dot.hpp"

#include "lextree/engine.hpp"

namespace lextree::dsl {

namespace {

std::string escape(std::string_view s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        if (c == '\n') {
            out += "\\n";
            continue;
        }
        out += c;
    }
    return out + "\"";
}

class DotWriter {
public:
    explicit DotWriter(std::string_view title) { out_ = "digraph lextree {\n  label=" + escape(title) + ";\n"; }

    int node(const std::string& label, bool leaf, std::string_view shape) {
        int id = next_++;
        out_ += "  n" + std::to_string(id) + " [label=" + escape(label) + ", shape=" + std::string(shape);
        if (leaf) out_ += ", peripheries=2";
        out_ += "];\n";
        return id;
    }

    void edge(int from, int to, std::string_view label) {
        out_ += "  n" + std::to_string(from) + " -> n" + std::to_string(to);
        if (!label.empty()) out_ += " [label=" + escape(label) + "]";
        out_ += ";\n";
    }

    std::string finish() { return out_ + "}\n"; }

private:
    std::string out_;
    int next_ = 0;
};

int latent(DotWriter& w, const Document& doc, const LatentNode& n) {
    if (const auto* cat = std::get_if<CategoryNode>(&n.payload)) {
        std::string label = cat->label;
        if (cat->category.kind != CategoryKind::Custom) label = "[" + std::string(to_string(cat->category.kind)) + "] " + label;
        int self = w.node(label, false, "folder");
        for (const auto& child : cat->children) w.edge(self, latent(w, doc, child), {});
        return self;
    }
    if (const auto* ask = std::get_if<AskNode>(&n.payload)) {
        const Predicate* p = doc.find_predicate(ask->predicate);
        int self = w.node(p ? p->prompt : ask->predicate, false, "box");
        for (const auto& br : ask->branches) w.edge(self, latent(w, doc, br.child), br.answer.to_string());
        return self;
    }
    const auto& leaf = std::get<LeafNode>(n.payload);
    const Consequence* c = doc.find_consequence(leaf.consequence);
    return w.node(c ? c->text : leaf.consequence, true, "ellipse");
}

int compiled(DotWriter& w, const binarize::CompiledTree& tree, binarize::NodeIndex i) {
    if (tree.is_leaf(i)) return w.node(tree.consequence_text(tree.leaf(i).consequence), true, "ellipse");
    const auto& t = tree.test(i);
    const Predicate* p = tree.find_predicate(t.literal.predicate);
    int self = w.node(p ? engine::question_text(*p, t.literal) : t.literal.to_string(), false, "box");
    w.edge(self, compiled(w, tree, t.yes), "yes");
    w.edge(self, compiled(w, tree, t.no), "no");
    return self;
}

} // namespace

std::string export_dot(const Document& doc) {
    DotWriter w(doc.title);
    latent(w, doc, doc.root);
    return w.finish();
}

std::string export_dot(const binarize::CompiledTree& tree) {
    DotWriter w(tree.source_title);
    compiled(w, tree, tree.root);
    return w.finish();
}

} // namespace lextree::dsl
