#pragma once

#include <cassert>
#include <memory>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace bml {

// Types of the Kripke-style S4 calculus: atoms, implication and an unbounded box.
class BoxType {
public:
    enum class Kind { Atom, Imp, Box };

    static BoxType atom(std::string name) { return BoxType(Kind::Atom, std::move(name), {}); }
    static BoxType imp(BoxType lhs, BoxType rhs) { return BoxType(Kind::Imp, {}, {std::move(lhs), std::move(rhs)}); }
    static BoxType box(BoxType body) { return BoxType(Kind::Box, {}, {std::move(body)}); }

    Kind kind() const { return node_->kind; }
    bool is(Kind k) const { return node_->kind == k; }
    const std::string& atom_name() const { assert(is(Kind::Atom)); return node_->name; }
    const BoxType& lhs() const { assert(is(Kind::Imp)); return node_->kids[0]; }
    const BoxType& rhs() const { assert(is(Kind::Imp)); return node_->kids[1]; }
    const BoxType& body() const { assert(is(Kind::Box)); return node_->kids[0]; }

    const void* id() const { return node_.get(); }

private:
    struct Node {
        Kind kind;
        std::string name;
        std::vector<BoxType> kids;
    };
    BoxType(Kind k, std::string name, std::vector<BoxType> kids)
        : node_(std::make_shared<const Node>(Node{k, std::move(name), std::move(kids)})) {}

    std::shared_ptr<const Node> node_;
};

inline bool operator==(const BoxType& a, const BoxType& b) {
    if (a.id() == b.id())
        return true;
    if (a.kind() != b.kind())
        return false;
    switch (a.kind()) {
    case BoxType::Kind::Atom: return a.atom_name() == b.atom_name();
    case BoxType::Kind::Imp: return a.lhs() == b.lhs() && a.rhs() == b.rhs();
    case BoxType::Kind::Box: return a.body() == b.body();
    }
    return false;
}

class BoxTerm {
public:
    enum class Kind { Var, Lam, App, Box, Unbox };

    static BoxTerm var(std::string x) { return BoxTerm(Node{Kind::Var, std::move(x), {}, 0, {}}); }
    static BoxTerm lam(std::string x, BoxType ann, BoxTerm body) {
        return BoxTerm(Node{Kind::Lam, std::move(x), {std::move(ann)}, 0, {std::move(body)}});
    }
    static BoxTerm app(BoxTerm fn, BoxTerm arg) {
        return BoxTerm(Node{Kind::App, {}, {}, 0, {std::move(fn), std::move(arg)}});
    }
    static BoxTerm box(BoxTerm body) { return BoxTerm(Node{Kind::Box, {}, {}, 0, {std::move(body)}}); }
    static BoxTerm unbox(std::size_t k, BoxTerm body) { return BoxTerm(Node{Kind::Unbox, {}, {}, k, {std::move(body)}}); }

    Kind kind() const { return node_->kind; }
    bool is(Kind k) const { return node_->kind == k; }
    const std::string& var_name() const { assert(is(Kind::Var) || is(Kind::Lam)); return node_->name; }
    const BoxType& ann() const { assert(is(Kind::Lam)); return node_->ann.front(); }
    std::size_t depth() const { assert(is(Kind::Unbox)); return node_->k; }
    const BoxTerm& body() const { assert(is(Kind::Lam) || is(Kind::Box) || is(Kind::Unbox)); return node_->kids[0]; }
    const BoxTerm& fn() const { assert(is(Kind::App)); return node_->kids[0]; }
    const BoxTerm& arg() const { assert(is(Kind::App)); return node_->kids[1]; }

    const void* id() const { return node_.get(); }

private:
    struct Node {
        Kind kind;
        std::string name;
        std::vector<BoxType> ann;
        std::size_t k;
        std::vector<BoxTerm> kids;
    };
    explicit BoxTerm(Node n) : node_(std::make_shared<const Node>(std::move(n))) {}

    std::shared_ptr<const Node> node_;
};

inline bool operator==(const BoxTerm& a, const BoxTerm& b) {
    if (a.id() == b.id())
        return true;
    if (a.kind() != b.kind())
        return false;
    switch (a.kind()) {
    case BoxTerm::Kind::Var: return a.var_name() == b.var_name();
    case BoxTerm::Kind::Lam: return a.var_name() == b.var_name() && a.ann() == b.ann() && a.body() == b.body();
    case BoxTerm::Kind::App: return a.fn() == b.fn() && a.arg() == b.arg();
    case BoxTerm::Kind::Box: return a.body() == b.body();
    case BoxTerm::Kind::Unbox: return a.depth() == b.depth() && a.body() == b.body();
    }
    return false;
}

// A stack of plain contexts; the last element is the current stage.
using BoxContext = std::vector<std::pair<std::string, BoxType>>;
using ContextStack = std::vector<BoxContext>;

namespace detail {

inline void print(std::ostream& os, const BoxType& t) {
    switch (t.kind()) {
    case BoxType::Kind::Atom: os << t.atom_name(); break;
    case BoxType::Kind::Imp:
        if (t.lhs().is(BoxType::Kind::Imp)) {
            os << '(';
            print(os, t.lhs());
            os << ')';
        } else {
            print(os, t.lhs());
        }
        os << " -> ";
        print(os, t.rhs());
        break;
    case BoxType::Kind::Box:
        os << '#';
        if (t.body().is(BoxType::Kind::Imp)) {
            os << '(';
            print(os, t.body());
            os << ')';
        } else {
            print(os, t.body());
        }
        break;
    }
}

inline void print(std::ostream& os, const BoxTerm& t) {
    switch (t.kind()) {
    case BoxTerm::Kind::Var: os << t.var_name(); break;
    case BoxTerm::Kind::Lam:
        os << '\\' << t.var_name() << " : ";
        print(os, t.ann());
        os << ". ";
        print(os, t.body());
        break;
    case BoxTerm::Kind::App: {
        bool fn_paren = t.fn().is(BoxTerm::Kind::Lam);
        bool arg_paren = t.arg().is(BoxTerm::Kind::Lam) || t.arg().is(BoxTerm::Kind::App);
        if (fn_paren) os << '(';
        print(os, t.fn());
        if (fn_paren) os << ')';
        os << ' ';
        if (arg_paren) os << '(';
        print(os, t.arg());
        if (arg_paren) os << ')';
        break;
    }
    case BoxTerm::Kind::Box:
        os << "box{ ";
        print(os, t.body());
        os << " }";
        break;
    case BoxTerm::Kind::Unbox:
        os << "unbox_" << t.depth() << "{ ";
        print(os, t.body());
        os << " }";
        break;
    }
}

}  // namespace detail

inline std::ostream& operator<<(std::ostream& os, const BoxType& t) {
    detail::print(os, t);
    return os;
}
inline std::ostream& operator<<(std::ostream& os, const BoxTerm& t) {
    detail::print(os, t);
    return os;
}

inline std::string to_string(const BoxType& t) {
    std::ostringstream os;
    os << t;
    return os.str();
}
inline std::string to_string(const BoxTerm& t) {
    std::ostringstream os;
    os << t;
    return os.str();
}
inline std::string to_string(const ContextStack& s) {
    std::ostringstream os;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i)
            os << "; ";
        for (std::size_t j = 0; j < s[i].size(); ++j) {
            if (j)
                os << ", ";
            os << s[i][j].first << " : " << s[i][j].second;
        }
    }
    return os.str();
}

}  // namespace bml
