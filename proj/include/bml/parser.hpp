#pragma once

#include <cctype>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "bml/context.hpp"
#include "bml/lambox_syntax.hpp"
#include "bml/syntax.hpp"

namespace bml {

class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, std::size_t column, std::vector<std::string> expected, std::string found)
        : std::runtime_error(render(line, column, expected, found)),
          line(line),
          column(column),
          expected(std::move(expected)),
          found(std::move(found)) {}

    std::size_t line;
    std::size_t column;
    std::vector<std::string> expected;
    std::string found;

private:
    static std::string render(std::size_t line, std::size_t column, const std::vector<std::string>& expected,
                              const std::string& found) {
        std::string out = std::to_string(line) + ":" + std::to_string(column) + ": expected ";
        if (expected.size() > 1)
            out += "one of ";
        for (std::size_t i = 0; i < expected.size(); ++i) {
            if (i)
                out += ", ";
            out += expected[i];
        }
        return out + " but found " + found;
    }
};

struct Judgment {
    Context context;
    Term term;
    std::optional<Formula> type;
};

struct RelQuery {
    RelKind kind;
    Classifier lhs;
    Classifier rhs;
};

struct BoxJudgment {
    ContextStack stack;
    BoxTerm term;
    std::optional<BoxType> type;
};

namespace detail {

enum class Tok {
    Ident, Bang, Arrow, LBrack, RBrack, Geq, Dot, LParen, RParen, Backslash, Colon, At,
    LBrace, RBrace, Comma, Turnstile, Leq, SqLeq, Semi, Hash, End
};

struct Token {
    Tok kind;
    std::string text;
    std::size_t line;
    std::size_t column;
};

inline std::string describe(Tok t) {
    switch (t) {
    case Tok::Ident: return "identifier";
    case Tok::Bang: return "'!'";
    case Tok::Arrow: return "'->'";
    case Tok::LBrack: return "'['";
    case Tok::RBrack: return "']'";
    case Tok::Geq: return "'>='";
    case Tok::Dot: return "'.'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::Backslash: return "'\\'";
    case Tok::Colon: return "':'";
    case Tok::At: return "'@'";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::Comma: return "','";
    case Tok::Turnstile: return "'|-'";
    case Tok::Leq: return "'<='";
    case Tok::SqLeq: return "'[='";
    case Tok::Semi: return "';'";
    case Tok::Hash: return "'#'";
    case Tok::End: return "end of input";
    }
    return "?";
}

// In the box language '#' is the box type former, so only a '#' followed by
// whitespace or end of line starts a comment there.
inline std::vector<Token> lex(std::string_view src, bool box_language) {
    std::vector<Token> out;
    std::size_t i = 0, line = 1, col = 1;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n; ++k) {
            if (src[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
            ++i;
        }
    };
    auto at = [&](std::size_t k) { return i + k < src.size() ? src[i + k] : '\0'; };
    while (i < src.size()) {
        char c = src[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        if (c == '#') {
            char next = at(1);
            bool comment = !box_language || next == '\0' || std::isspace(static_cast<unsigned char>(next));
            if (comment) {
                while (i < src.size() && src[i] != '\n')
                    advance(1);
                continue;
            }
        }
        Token tok{Tok::End, {}, line, col};
        if (std::isalpha(static_cast<unsigned char>(c))) {
            std::size_t j = i;
            while (j < src.size()) {
                char d = src[j];
                if (std::isalnum(static_cast<unsigned char>(d)) || d == '_') {
                    ++j;
                } else if (d == '#' && j + 1 < src.size() && std::isdigit(static_cast<unsigned char>(src[j + 1]))) {
                    j += 2;
                } else {
                    break;
                }
            }
            tok.kind = Tok::Ident;
            tok.text = std::string(src.substr(i, j - i));
            advance(j - i);
            out.push_back(std::move(tok));
            continue;
        }
        struct Sym {
            const char* text;
            Tok kind;
        };
        static const Sym syms[] = {
            {"->", Tok::Arrow}, {">=", Tok::Geq}, {"|-", Tok::Turnstile}, {"<=", Tok::Leq}, {"[=", Tok::SqLeq},
            {"!", Tok::Bang},   {"[", Tok::LBrack}, {"]", Tok::RBrack},   {".", Tok::Dot},   {"(", Tok::LParen},
            {")", Tok::RParen}, {"\\", Tok::Backslash}, {":", Tok::Colon}, {"@", Tok::At},   {"{", Tok::LBrace},
            {"}", Tok::RBrace}, {",", Tok::Comma}, {";", Tok::Semi},      {"#", Tok::Hash},
        };
        bool matched = false;
        for (const auto& s : syms) {
            std::string_view t(s.text);
            if (src.substr(i, t.size()) == t) {
                tok.kind = s.kind;
                tok.text = std::string(t);
                advance(t.size());
                matched = true;
                break;
            }
        }
        if (!matched)
            throw ParseError(line, col, {"a token"}, std::string("'") + c + "'");
        out.push_back(std::move(tok));
    }
    out.push_back(Token{Tok::End, {}, line, col});
    return out;
}

class Parser {
public:
    Parser(std::string_view src, bool box_language) : toks_(lex(src, box_language)) {
        if (!box_language) {
            for (const auto& t : toks_) {
                if (t.kind == Tok::Ident)
                    reserve_fresh_suffix(t.text);
            }
        }
    }

    // Formulas.

    Formula formula() {
        Formula lhs = formula_prefix();
        if (accept(Tok::Arrow))
            return Formula::imp(lhs, formula());
        return lhs;
    }

    Formula formula_prefix() {
        if (accept(Tok::LBrack)) {
            expect(Tok::Geq);
            Classifier bound = classifier();
            expect(Tok::RBrack);
            return Formula::box(bound, formula_prefix());
        }
        if (peek_keyword("forall")) {
            next();
            Classifier binder = binder_name();
            expect(Tok::Geq);
            Classifier bound = classifier();
            distinct(binder, bound);
            expect(Tok::Dot);
            return Formula::forall(binder, bound, formula());
        }
        if (accept(Tok::LParen)) {
            Formula f = formula();
            expect(Tok::RParen);
            return f;
        }
        if (peek().kind == Tok::Ident && !is_keyword(peek().text))
            return Formula::atom(next().text);
        fail({"identifier", "'['", "'forall'", "'('"});
    }

    // Terms.

    Term term() {
        if (starts_binder_term())
            return binder_term();
        Term head = term_atom();
        for (;;) {
            if (accept(Tok::LBrack)) {
                Classifier c = classifier();
                expect(Tok::RBrack);
                head = Term::capp(head, c);
            } else if (starts_term_atom()) {
                head = Term::app(head, term_atom());
            } else if (starts_binder_term()) {
                head = Term::app(head, binder_term());
            } else {
                return head;
            }
        }
    }

    // Contexts and files.

    Context context() {
        Context g;
        if (peek().kind == Tok::Turnstile || peek().kind == Tok::End)
            return g;
        g.push_back(context_item());
        while (accept(Tok::Comma))
            g.push_back(context_item());
        return g;
    }

    Judgment judgment() {
        Context g = context();
        expect(Tok::Turnstile);
        Term m = term();
        std::optional<Formula> a;
        if (accept(Tok::Colon))
            a = formula();
        end();
        return Judgment{std::move(g), std::move(m), std::move(a)};
    }

    RelQuery rel_query() {
        Classifier a = classifier();
        RelKind kind;
        if (accept(Tok::Leq))
            kind = RelKind::Pre;
        else if (accept(Tok::SqLeq))
            kind = RelKind::Mod;
        else
            fail({"'<='", "'[='"});
        Classifier b = classifier();
        end();
        return RelQuery{kind, a, b};
    }

    // Box language.

    BoxType box_type() {
        BoxType lhs = box_type_prefix();
        if (accept(Tok::Arrow))
            return BoxType::imp(lhs, box_type());
        return lhs;
    }

    BoxType box_type_prefix() {
        if (accept(Tok::Hash))
            return BoxType::box(box_type_prefix());
        if (accept(Tok::LParen)) {
            BoxType t = box_type();
            expect(Tok::RParen);
            return t;
        }
        if (peek().kind == Tok::Ident)
            return BoxType::atom(next().text);
        fail({"identifier", "'#'", "'('"});
    }

    BoxTerm box_term() {
        if (peek().kind == Tok::Backslash)
            return box_lambda();
        BoxTerm head = box_atom();
        for (;;) {
            if (starts_box_atom())
                head = BoxTerm::app(head, box_atom());
            else if (peek().kind == Tok::Backslash)
                head = BoxTerm::app(head, box_lambda());
            else
                return head;
        }
    }

    ContextStack box_stack() {
        ContextStack stack(1);
        for (;;) {
            if (peek().kind == Tok::Ident) {
                stack.back().push_back(box_item());
                while (accept(Tok::Comma))
                    stack.back().push_back(box_item());
            }
            if (!accept(Tok::Semi))
                return stack;
            stack.emplace_back();
        }
    }

    BoxJudgment box_judgment() {
        ContextStack stack = box_stack();
        expect(Tok::Turnstile);
        BoxTerm m = box_term();
        std::optional<BoxType> a;
        if (accept(Tok::Colon))
            a = box_type();
        end();
        return BoxJudgment{std::move(stack), std::move(m), std::move(a)};
    }

    void end() { expect(Tok::End); }

private:
    static bool is_keyword(const std::string& s) {
        return s == "forall" || s == "quo" || s == "unq" || s == "gen" || s == "open" || s == "shut" || s == "cls";
    }

    const Token& peek() const { return toks_[pos_]; }
    Token next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
    bool accept(Tok k) {
        if (peek().kind != k)
            return false;
        next();
        return true;
    }
    void expect(Tok k) {
        if (!accept(k))
            fail({describe(k)});
    }
    bool peek_keyword(const char* kw) const { return peek().kind == Tok::Ident && peek().text == kw; }

    [[noreturn]] void fail(std::vector<std::string> expected) const {
        const Token& t = peek();
        std::string found = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
        throw ParseError(t.line, t.column, std::move(expected), found);
    }

    Classifier classifier() {
        if (accept(Tok::Bang))
            return Classifier::initial();
        if (peek().kind == Tok::Ident && !is_keyword(peek().text))
            return Classifier(next().text);
        fail({"'!'", "identifier"});
    }

    // Binding positions never accept "!".
    Classifier binder_name() { return Classifier(identifier()); }

    std::string identifier() {
        if (peek().kind == Tok::Ident && !is_keyword(peek().text))
            return next().text;
        fail({"identifier"});
    }

    void distinct(const Classifier& binder, const Classifier& bound) const {
        if (binder == bound) {
            const Token& t = toks_[pos_ - 1];
            throw ParseError(t.line, t.column, {"a bound different from the binder"}, "'" + bound.name() + "'");
        }
    }

    bool starts_binder_term() const { return peek().kind == Tok::Backslash || peek_keyword("gen"); }

    bool starts_term_atom() const {
        if (peek().kind == Tok::LParen)
            return true;
        if (peek().kind != Tok::Ident)
            return false;
        return peek().text == "quo" || peek().text == "unq" || !is_keyword(peek().text);
    }

    Term binder_term() {
        if (accept(Tok::Backslash)) {
            std::string x = identifier();
            expect(Tok::Colon);
            Formula a = formula();
            expect(Tok::At);
            Classifier c = binder_name();
            expect(Tok::Dot);
            return Term::lam(x, c, a, term());
        }
        next();  // gen
        Classifier binder = binder_name();
        expect(Tok::Geq);
        Classifier bound = classifier();
        distinct(binder, bound);
        expect(Tok::Dot);
        return Term::clam(binder, bound, term());
    }

    Term term_atom() {
        if (accept(Tok::LParen)) {
            Term t = term();
            expect(Tok::RParen);
            return t;
        }
        if (peek_keyword("quo")) {
            next();
            expect(Tok::LBrack);
            Classifier binder = binder_name();
            expect(Tok::Geq);
            Classifier bound = classifier();
            distinct(binder, bound);
            expect(Tok::RBrack);
            expect(Tok::LBrace);
            Term body = term();
            expect(Tok::RBrace);
            return Term::quo(binder, bound, body);
        }
        if (peek_keyword("unq")) {
            next();
            expect(Tok::LBrack);
            Classifier at = classifier();
            expect(Tok::RBrack);
            expect(Tok::LBrace);
            Term body = term();
            expect(Tok::RBrace);
            return Term::unq(at, body);
        }
        if (peek().kind == Tok::Ident && !is_keyword(peek().text))
            return Term::var(next().text);
        fail({"identifier", "'('", "'quo'", "'unq'", "'\\'", "'gen'"});
    }

    ContextItem context_item() {
        if (peek_keyword("open") || peek_keyword("cls")) {
            bool open = next().text == "open";
            Classifier binder = binder_name();
            expect(Tok::Geq);
            Classifier bound = classifier();
            distinct(binder, bound);
            return open ? ContextItem::open(binder, bound) : ContextItem::cls_decl(binder, bound);
        }
        if (peek_keyword("shut")) {
            next();
            return ContextItem::shut(classifier());
        }
        if (peek().kind != Tok::Ident || is_keyword(peek().text))
            fail({"identifier", "'open'", "'shut'", "'cls'"});
        std::string x = next().text;
        expect(Tok::Colon);
        Formula a = formula();
        expect(Tok::At);
        return ContextItem::hyp(x, binder_name(), a);
    }

    static std::optional<std::size_t> unbox_depth(const std::string& s) {
        const std::string prefix = "unbox_";
        if (s.size() <= prefix.size() || s.compare(0, prefix.size(), prefix) != 0)
            return std::nullopt;
        std::size_t k = 0;
        for (std::size_t i = prefix.size(); i < s.size(); ++i) {
            if (!std::isdigit(static_cast<unsigned char>(s[i])))
                return std::nullopt;
            k = k * 10 + static_cast<std::size_t>(s[i] - '0');
        }
        return k;
    }

    static bool is_box_keyword(const std::string& s) { return s == "box" || unbox_depth(s).has_value(); }

    bool starts_box_atom() const {
        return peek().kind == Tok::LParen || peek().kind == Tok::Ident;
    }

    BoxTerm box_lambda() {
        expect(Tok::Backslash);
        std::string x = box_identifier();
        expect(Tok::Colon);
        BoxType a = box_type();
        expect(Tok::Dot);
        return BoxTerm::lam(x, a, box_term());
    }

    std::string box_identifier() {
        if (peek().kind == Tok::Ident && !is_box_keyword(peek().text))
            return next().text;
        fail({"identifier"});
    }

    BoxTerm box_atom() {
        if (accept(Tok::LParen)) {
            BoxTerm t = box_term();
            expect(Tok::RParen);
            return t;
        }
        if (peek().kind == Tok::Ident) {
            std::string word = next().text;
            if (word == "box" || unbox_depth(word)) {
                expect(Tok::LBrace);
                BoxTerm body = box_term();
                expect(Tok::RBrace);
                return word == "box" ? BoxTerm::box(body) : BoxTerm::unbox(*unbox_depth(word), body);
            }
            return BoxTerm::var(word);
        }
        fail({"identifier", "'('", "'box'", "'unbox_k'", "'\\'"});
    }

    std::pair<std::string, BoxType> box_item() {
        std::string x = box_identifier();
        expect(Tok::Colon);
        return {x, box_type()};
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

}  // namespace detail

inline Formula parse_formula(std::string_view text) {
    detail::Parser p(text, false);
    Formula f = p.formula();
    p.end();
    return f;
}

inline Term parse_term(std::string_view text) {
    detail::Parser p(text, false);
    Term t = p.term();
    p.end();
    return t;
}

inline Context parse_context(std::string_view text) {
    detail::Parser p(text, false);
    Context g = p.context();
    p.end();
    return g;
}

inline Judgment parse_judgment(std::string_view text) { return detail::Parser(text, false).judgment(); }

inline RelQuery parse_rel_query(std::string_view text) { return detail::Parser(text, false).rel_query(); }

inline BoxType parse_box_type(std::string_view text) {
    detail::Parser p(text, true);
    BoxType t = p.box_type();
    p.end();
    return t;
}

inline BoxTerm parse_box_term(std::string_view text) {
    detail::Parser p(text, true);
    BoxTerm t = p.box_term();
    p.end();
    return t;
}

inline BoxJudgment parse_box_judgment(std::string_view text) { return detail::Parser(text, true).box_judgment(); }

}  // namespace bml
