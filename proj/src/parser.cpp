#include "lextree/dsl.hpp"

#include <algorithm>
#include <charconv>
#include <limits>

namespace lextree::dsl {

namespace {

enum class Tok { Ident, String, Int, LBrace, RBrace, LBracket, RBracket, Comma, Arrow, End };

struct Token {
    Tok kind;
    std::string text; // identifier, decoded string, or digits
    SourceSpan span;
};

std::string describe(const Token& t) {
    switch (t.kind) {
    case Tok::Ident: return "'" + t.text + "'";
    case Tok::String: return "string";
    case Tok::Int: return "integer " + t.text;
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::LBracket: return "'['";
    case Tok::RBracket: return "']'";
    case Tok::Comma: return "','";
    case Tok::Arrow: return "'->'";
    case Tok::End: return "end of input";
    }
    return "token";
}

struct SyntaxFailure {
    Diagnostic diagnostic;
};

[[noreturn]] void fail(SourceSpan span, std::string message) {
    throw SyntaxFailure{{ErrorCode::SyntaxError, Severity::Error, std::move(message), span}};
}

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        for (;;) {
            skip_space();
            SourceSpan start{line_, col_, 0};
            if (pos_ >= src_.size()) {
                out.push_back({Tok::End, {}, start});
                return out;
            }
            std::size_t begin = pos_;
            char c = src_[pos_];
            Token t{Tok::End, {}, start};
            if (is_ident_head(c)) {
                while (pos_ < src_.size() && is_ident_tail(src_[pos_])) advance();
                t = {Tok::Ident, std::string(src_.substr(begin, pos_ - begin)), start};
            } else if (c >= '0' && c <= '9') {
                while (pos_ < src_.size() && src_[pos_] >= '0' && src_[pos_] <= '9') advance();
                t = {Tok::Int, std::string(src_.substr(begin, pos_ - begin)), start};
            } else if (c == '"') {
                t = {Tok::String, read_string(start), start};
            } else if (c == '-' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '>') {
                advance();
                advance();
                t.kind = Tok::Arrow;
            } else {
                switch (c) {
                case '{': t.kind = Tok::LBrace; break;
                case '}': t.kind = Tok::RBrace; break;
                case '[': t.kind = Tok::LBracket; break;
                case ']': t.kind = Tok::RBracket; break;
                case ',': t.kind = Tok::Comma; break;
                default: fail({line_, col_, 1}, "unexpected character '" + std::string(1, c) + "'");
                }
                advance();
            }
            t.span.length = static_cast<int>(pos_ - begin);
            out.push_back(std::move(t));
        }
    }

private:
    static bool is_ident_head(char c) {
        return c == '_' || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
    }
    static bool is_ident_tail(char c) { return is_ident_head(c) || (c >= '0' && c <= '9'); }

    void advance() {
        char c = src_[pos_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) {
            ++col_; // count code points, not UTF-8 continuation bytes
        }
    }

    void skip_space() {
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                advance();
            } else if (c == '#') {
                while (pos_ < src_.size() && src_[pos_] != '\n') advance();
            } else {
                break;
            }
        }
    }

    std::string read_string(SourceSpan start) {
        std::string out;
        advance(); // opening quote
        for (;;) {
            if (pos_ >= src_.size() || src_[pos_] == '\n' || src_[pos_] == '\r')
                fail({start.line, start.column, 1}, "unterminated string");
            char c = src_[pos_];
            if (c == '"') {
                advance();
                return out;
            }
            if (c == '\\') {
                SourceSpan esc{line_, col_, 2};
                advance();
                if (pos_ >= src_.size()) fail({start.line, start.column, 1}, "unterminated string");
                char e = src_[pos_];
                switch (e) {
                case '"': out += '"'; break;
                case '\\': out += '\\'; break;
                case 'n': out += '\n'; break;
                case 't': out += '\t'; break;
                default: fail(esc, "unknown escape '\\" + std::string(1, e) + "'");
                }
                advance();
                continue;
            }
            out += c;
            advance();
        }
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

class Parser {
public:
    explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

    Document run() {
        Document doc;
        if (!is_word("tree")) fail(peek().span, "expected 'tree' header");
        next();
        doc.title = expect(Tok::String, "document title").text;

        if (is_word("default")) {
            Token kw = next();
            expect_word("consequence");
            Consequence c = consequence_body(kw.span);
            doc.default_consequence = c.id;
            doc.consequences.push_back(std::move(c));
        }

        for (;;) {
            if (is_word("predicate")) {
                doc.predicates.push_back(predicate_decl());
            } else if (is_word("consequence")) {
                Token kw = next();
                doc.consequences.push_back(consequence_body(kw.span));
            } else {
                break;
            }
        }
        predicates_ = &doc.predicates;

        doc.root = node();
        if (peek().kind != Tok::End) fail(peek().span, "expected end of input, found " + describe(peek()));
        assign_path_ids(doc.root);
        return doc;
    }

private:
    const Token& peek() const { return toks_[pos_]; }
    Token next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

    bool is_word(std::string_view w) const { return peek().kind == Tok::Ident && peek().text == w; }

    Token expect(Tok kind, std::string_view what) {
        if (peek().kind != kind) fail(peek().span, "expected " + std::string(what) + ", found " + describe(peek()));
        return next();
    }

    void expect_word(std::string_view w) {
        if (!is_word(w)) fail(peek().span, "expected '" + std::string(w) + "', found " + describe(peek()));
        next();
    }

    int integer() {
        Token t = expect(Tok::Int, "integer");
        int value = 0;
        auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), value);
        if (ec != std::errc{}) fail(t.span, "integer out of range");
        return value;
    }

    static SourceSpan cover(SourceSpan from, SourceSpan to) {
        if (from.line != to.line) return from;
        return {from.line, from.column, to.column + to.length - from.column};
    }

    Consequence consequence_body(SourceSpan start) {
        Consequence c;
        Token id = expect(Tok::Ident, "consequence id");
        c.id = id.text;
        Token text = expect(Tok::String, "consequence text");
        c.text = text.text;
        SourceSpan end = text.span;
        if (is_word("priority")) {
            next();
            end = peek().span;
            c.priority = integer();
        }
        c.span.span = cover(start, end);
        return c;
    }

    Predicate predicate_decl() {
        Token kw = next();
        Predicate p;
        p.id = expect(Tok::Ident, "predicate id").text;
        p.prompt = expect(Tok::String, "predicate prompt").text;
        SourceSpan end = peek().span;
        if (is_word("bool")) {
            next();
            p.domain = Predicate::Boolean{};
        } else if (is_word("options")) {
            next();
            expect(Tok::LBracket, "'['");
            Predicate::Enumerated e;
            e.values.push_back(expect(Tok::Ident, "option").text);
            while (peek().kind == Tok::Comma) {
                next();
                e.values.push_back(expect(Tok::Ident, "option").text);
            }
            end = expect(Tok::RBracket, "']'").span;
            p.domain = std::move(e);
        } else {
            fail(peek().span, "expected 'bool' or 'options', found " + describe(peek()));
        }
        for (;;) {
            if (is_word("gate")) {
                end = next().span;
                p.gate = true;
            } else if (is_word("rank")) {
                next();
                end = peek().span;
                p.rank = integer();
            } else {
                break;
            }
        }
        p.span.span = cover(kw.span, end);
        return p;
    }

    LatentNode node() {
        const Token& t = peek();
        if (is_word("category")) return category();
        if (is_word("ask")) return ask();
        if (is_word("leaf")) {
            Token kw = next();
            Token id = expect(Tok::Ident, "consequence id");
            LatentNode n = make_leaf({}, id.text);
            n.span.span = cover(kw.span, id.span);
            return n;
        }
        fail(t.span, "expected 'category', 'ask' or 'leaf', found " + describe(t));
    }

    LatentNode category() {
        Token kw = next();
        TaxonomyCategory kind;
        if (peek().kind == Tok::Ident) {
            Token k = next();
            auto parsed = category_kind_from_string(k.text);
            if (!parsed || *parsed == CategoryKind::Custom)
                fail(k.span, "expected category kind (subject, object, contents, lifecycle) or label, found '" +
                                 k.text + "'");
            kind.kind = *parsed;
        }
        Token label = expect(Tok::String, "category label");
        expect(Tok::LBrace, "'{'");
        std::vector<LatentNode> children;
        do {
            children.push_back(node());
        } while (peek().kind != Tok::RBrace);
        next();
        LatentNode n = make_category({}, kind, label.text, std::move(children));
        n.span.span = cover(kw.span, label.span);
        return n;
    }

    LatentNode ask() {
        Token kw = next();
        Token pred_tok = expect(Tok::Ident, "predicate id");
        const Predicate* pred = nullptr;
        for (const auto& p : *predicates_)
            if (p.id == pred_tok.text) pred = &p;

        expect(Tok::LBrace, "'{'");
        std::vector<Branch> branches;
        do {
            Token answer = expect(Tok::Ident, "answer");
            expect(Tok::Arrow, "'->'");
            Branch br{answer_value(pred, answer.text), node(), {}};
            br.span.span = answer.span;
            branches.push_back(std::move(br));
        } while (peek().kind != Tok::RBrace);
        next();

        if (pred) {
            auto order = [&](const Branch& b) {
                return pred->index_of(b.answer).value_or(std::numeric_limits<std::size_t>::max());
            };
            std::stable_sort(branches.begin(), branches.end(),
                             [&](const Branch& a, const Branch& b) { return order(a) < order(b); });
        }
        LatentNode n = make_ask({}, pred_tok.text, std::move(branches));
        n.span.span = cover(kw.span, pred_tok.span);
        return n;
    }

    static Value answer_value(const Predicate* pred, const std::string& text) {
        if (pred && pred->is_boolean()) {
            if (text == "yes") return Value(true);
            if (text == "no") return Value(false);
        }
        return Value(text);
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    const std::vector<Predicate>* predicates_ = nullptr;
};

} // namespace

ParseResult parse(std::string_view text) {
    ParseResult result;
    try {
        Parser parser(Lexer(text).run());
        Document doc = parser.run();
        result.diagnostics = validate(doc);
        if (result.diagnostics.empty()) result.document = std::move(doc);
    } catch (const SyntaxFailure& f) {
        result.diagnostics.push_back(f.diagnostic);
    }
    return result;
}

} // namespace lextree::dsl
