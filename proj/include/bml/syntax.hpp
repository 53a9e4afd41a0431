#pragma once

#include <atomic>
#include <cassert>
#include <compare>
#include <cstdint>
#include <memory>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace bml {

// A classifier is a scope name; "!" is the distinguished initial classifier.
class Classifier {
public:
    Classifier() : name_("!") {}
    explicit Classifier(std::string name) : name_(std::move(name)) {}

    static Classifier initial() { return Classifier{}; }

    bool is_initial() const { return name_ == "!"; }
    const std::string& name() const { return name_; }

    friend bool operator==(const Classifier&, const Classifier&) = default;
    friend auto operator<=>(const Classifier&, const Classifier&) = default;

private:
    std::string name_;
};

inline std::ostream& operator<<(std::ostream& os, const Classifier& c) { return os << c.name(); }

// Fresh names have the shape base#n. The counter is process-wide so that names
// produced by different modules never collide.
namespace detail {
inline std::atomic<std::uint64_t>& fresh_counter() {
    static std::atomic<std::uint64_t> counter{0};
    return counter;
}
}  // namespace detail

inline std::string fresh_name(std::string_view base) {
    auto hash = base.find('#');
    if (hash != std::string_view::npos)
        base = base.substr(0, hash);
    if (base.empty() || base == "!")
        base = "g";
    return std::string(base) + "#" + std::to_string(++detail::fresh_counter());
}

inline Classifier fresh_classifier(const Classifier& hint) { return Classifier(fresh_name(hint.name())); }

// Names read from source text may already carry a #n suffix; keep the supply ahead of them.
inline void reserve_fresh_suffix(std::string_view name) {
    auto hash = name.rfind('#');
    if (hash == std::string_view::npos || hash + 1 >= name.size())
        return;
    std::uint64_t n = 0;
    for (char c : name.substr(hash + 1)) {
        if (c < '0' || c > '9')
            return;
        n = n * 10 + static_cast<std::uint64_t>(c - '0');
        if (n > (std::uint64_t{1} << 60))
            return;
    }
    auto& counter = detail::fresh_counter();
    auto cur = counter.load();
    while (cur < n && !counter.compare_exchange_weak(cur, n)) {
    }
}

class Formula {
public:
    enum class Kind { Atom, Imp, Box, Forall };

    static Formula atom(std::string name) { return Formula(Node{Kind::Atom, std::move(name), {}, {}, {}}); }
    static Formula imp(Formula lhs, Formula rhs) {
        return Formula(Node{Kind::Imp, {}, {}, {}, {std::move(lhs), std::move(rhs)}});
    }
    static Formula box(Classifier bound, Formula body) {
        return Formula(Node{Kind::Box, {}, {}, std::move(bound), {std::move(body)}});
    }
    static Formula forall(Classifier binder, Classifier bound, Formula body) {
        return Formula(Node{Kind::Forall, {}, std::move(binder), std::move(bound), {std::move(body)}});
    }

    Kind kind() const { return node_->kind; }
    bool is(Kind k) const { return node_->kind == k; }

    const std::string& atom_name() const { assert(is(Kind::Atom)); return node_->name; }
    const Formula& lhs() const { assert(is(Kind::Imp)); return node_->kids[0]; }
    const Formula& rhs() const { assert(is(Kind::Imp)); return node_->kids[1]; }
    const Formula& body() const { assert(is(Kind::Box) || is(Kind::Forall)); return node_->kids[0]; }
    const Classifier& bound() const { assert(is(Kind::Box) || is(Kind::Forall)); return node_->bound; }
    const Classifier& binder() const { assert(is(Kind::Forall)); return node_->binder; }

    // Identity of the shared node, used as a memo key.
    const void* id() const { return node_.get(); }

private:
    struct Node {
        Kind kind;
        std::string name;
        Classifier binder;
        Classifier bound;
        std::vector<Formula> kids;
    };
    explicit Formula(Node n) : node_(std::make_shared<const Node>(std::move(n))) {}

    std::shared_ptr<const Node> node_;
};

class Term {
public:
    enum class Kind { Var, Lam, App, Quo, Unq, CLam, CApp };

    static Term var(std::string x) { return Term(Node{Kind::Var, std::move(x), {}, {}, {}, {}}); }
    static Term lam(std::string x, Classifier cls, Formula ann, Term body) {
        return Term(Node{Kind::Lam, std::move(x), std::move(cls), {}, {std::move(ann)}, {std::move(body)}});
    }
    static Term app(Term fn, Term arg) { return Term(Node{Kind::App, {}, {}, {}, {}, {std::move(fn), std::move(arg)}}); }
    static Term quo(Classifier binder, Classifier bound, Term body) {
        return Term(Node{Kind::Quo, {}, std::move(binder), std::move(bound), {}, {std::move(body)}});
    }
    static Term unq(Classifier at, Term body) { return Term(Node{Kind::Unq, {}, std::move(at), {}, {}, {std::move(body)}}); }
    static Term clam(Classifier binder, Classifier bound, Term body) {
        return Term(Node{Kind::CLam, {}, std::move(binder), std::move(bound), {}, {std::move(body)}});
    }
    static Term capp(Term fn, Classifier arg) { return Term(Node{Kind::CApp, {}, std::move(arg), {}, {}, {std::move(fn)}}); }

    Kind kind() const { return node_->kind; }
    bool is(Kind k) const { return node_->kind == k; }

    // Var name, or the variable bound by a Lam.
    const std::string& var_name() const { assert(is(Kind::Var) || is(Kind::Lam)); return node_->name; }
    // Lam classifier, Quo/CLam binder, Unq annotation, CApp argument.
    const Classifier& cls() const { assert(!is(Kind::Var) && !is(Kind::App)); return node_->cls; }
    // Quo/CLam bound.
    const Classifier& bound() const { assert(is(Kind::Quo) || is(Kind::CLam)); return node_->bound; }
    const Formula& ann() const { assert(is(Kind::Lam)); return node_->ann.front(); }
    // Lam/Quo/Unq/CLam body, App/CApp function.
    const Term& body() const { assert(!is(Kind::Var)); return node_->kids[0]; }
    const Term& fn() const { assert(is(Kind::App) || is(Kind::CApp)); return node_->kids[0]; }
    const Term& arg() const { assert(is(Kind::App)); return node_->kids[1]; }

    std::size_t child_count() const { return node_->kids.size(); }
    const Term& child(std::size_t i) const { return node_->kids[i]; }

    const void* id() const { return node_.get(); }

private:
    struct Node {
        Kind kind;
        std::string name;
        Classifier cls;
        Classifier bound;
        std::vector<Formula> ann;
        std::vector<Term> kids;
    };
    explicit Term(Node n) : node_(std::make_shared<const Node>(std::move(n))) {}

    std::shared_ptr<const Node> node_;
};

class ContextItem {
public:
    enum class Kind { Hyp, Open, Shut, Cls };

    static ContextItem hyp(std::string x, Classifier cls, Formula ann) {
        return ContextItem(Kind::Hyp, std::move(x), std::move(cls), Classifier{}, {std::move(ann)});
    }
    static ContextItem open(Classifier binder, Classifier bound) {
        return ContextItem(Kind::Open, {}, std::move(binder), std::move(bound), {});
    }
    static ContextItem shut(Classifier at) { return ContextItem(Kind::Shut, {}, std::move(at), Classifier{}, {}); }
    static ContextItem cls_decl(Classifier binder, Classifier bound) {
        return ContextItem(Kind::Cls, {}, std::move(binder), std::move(bound), {});
    }

    Kind kind() const { return kind_; }
    bool is(Kind k) const { return kind_ == k; }

    const std::string& var() const { assert(is(Kind::Hyp)); return var_; }
    // Hyp classifier, Open/Cls binder, Shut annotation.
    const Classifier& cls() const { return cls_; }
    const Classifier& bound() const { assert(is(Kind::Open) || is(Kind::Cls)); return bound_; }
    const Formula& ann() const { assert(is(Kind::Hyp)); return ann_.front(); }

    // The classifier this item introduces, if any.
    bool introduces_classifier() const { return kind_ != Kind::Shut; }

private:
    ContextItem(Kind k, std::string v, Classifier c, Classifier b, std::vector<Formula> a)
        : kind_(k), var_(std::move(v)), cls_(std::move(c)), bound_(std::move(b)), ann_(std::move(a)) {}

    Kind kind_;
    std::string var_;
    Classifier cls_;
    Classifier bound_;
    std::vector<Formula> ann_;
};

using Context = std::vector<ContextItem>;

inline Context extend(Context g, ContextItem item) {
    g.push_back(std::move(item));
    return g;
}

inline Context concat(Context a, const Context& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

// Exact structural equality (no renaming).

inline bool operator==(const Formula& a, const Formula& b) {
    if (a.id() == b.id())
        return true;
    if (a.kind() != b.kind())
        return false;
    switch (a.kind()) {
    case Formula::Kind::Atom: return a.atom_name() == b.atom_name();
    case Formula::Kind::Imp: return a.lhs() == b.lhs() && a.rhs() == b.rhs();
    case Formula::Kind::Box: return a.bound() == b.bound() && a.body() == b.body();
    case Formula::Kind::Forall:
        return a.binder() == b.binder() && a.bound() == b.bound() && a.body() == b.body();
    }
    return false;
}

inline bool operator==(const Term& a, const Term& b) {
    if (a.id() == b.id())
        return true;
    if (a.kind() != b.kind())
        return false;
    switch (a.kind()) {
    case Term::Kind::Var: return a.var_name() == b.var_name();
    case Term::Kind::Lam:
        return a.var_name() == b.var_name() && a.cls() == b.cls() && a.ann() == b.ann() && a.body() == b.body();
    case Term::Kind::App: return a.fn() == b.fn() && a.arg() == b.arg();
    case Term::Kind::Quo:
    case Term::Kind::CLam: return a.cls() == b.cls() && a.bound() == b.bound() && a.body() == b.body();
    case Term::Kind::Unq: return a.cls() == b.cls() && a.body() == b.body();
    case Term::Kind::CApp: return a.cls() == b.cls() && a.fn() == b.fn();
    }
    return false;
}

inline bool operator==(const ContextItem& a, const ContextItem& b) {
    if (a.kind() != b.kind() || a.cls() != b.cls())
        return false;
    switch (a.kind()) {
    case ContextItem::Kind::Hyp: return a.var() == b.var() && a.ann() == b.ann();
    case ContextItem::Kind::Open:
    case ContextItem::Kind::Cls: return a.bound() == b.bound();
    case ContextItem::Kind::Shut: return true;
    }
    return false;
}

// Printing. Output is accepted by the parser and parses back to the same tree.

namespace detail {

// A formula "ends open" when its printed form ends in a forall body that would
// swallow a following "->".
inline bool ends_open(const Formula& f) {
    switch (f.kind()) {
    case Formula::Kind::Forall: return true;
    case Formula::Kind::Box: return !f.body().is(Formula::Kind::Imp) && ends_open(f.body());
    default: return false;
    }
}

inline void print(std::ostream& os, const Formula& f) {
    switch (f.kind()) {
    case Formula::Kind::Atom: os << f.atom_name(); break;
    case Formula::Kind::Imp:
        if (f.lhs().is(Formula::Kind::Imp) || ends_open(f.lhs())) {
            os << '(';
            print(os, f.lhs());
            os << ')';
        } else {
            print(os, f.lhs());
        }
        os << " -> ";
        print(os, f.rhs());
        break;
    case Formula::Kind::Box:
        os << "[>= " << f.bound() << ']';
        if (f.body().is(Formula::Kind::Imp)) {
            os << '(';
            print(os, f.body());
            os << ')';
        } else {
            print(os, f.body());
        }
        break;
    case Formula::Kind::Forall:
        os << "forall " << f.binder() << " >= " << f.bound() << ". ";
        print(os, f.body());
        break;
    }
}

void print(std::ostream& os, const Term& t);

inline void print_fn(std::ostream& os, const Term& t) {
    if (t.is(Term::Kind::Lam) || t.is(Term::Kind::CLam)) {
        os << '(';
        print(os, t);
        os << ')';
    } else {
        print(os, t);
    }
}

inline void print_arg(std::ostream& os, const Term& t) {
    switch (t.kind()) {
    case Term::Kind::Var:
    case Term::Kind::Quo:
    case Term::Kind::Unq: print(os, t); break;
    default:
        os << '(';
        print(os, t);
        os << ')';
    }
}

inline void print(std::ostream& os, const Term& t) {
    switch (t.kind()) {
    case Term::Kind::Var: os << t.var_name(); break;
    case Term::Kind::Lam:
        os << '\\' << t.var_name() << " : ";
        print(os, t.ann());
        os << " @ " << t.cls() << ". ";
        print(os, t.body());
        break;
    case Term::Kind::App:
        print_fn(os, t.fn());
        os << ' ';
        print_arg(os, t.arg());
        break;
    case Term::Kind::Quo:
        os << "quo[" << t.cls() << " >= " << t.bound() << "]{ ";
        print(os, t.body());
        os << " }";
        break;
    case Term::Kind::Unq:
        os << "unq[" << t.cls() << "]{ ";
        print(os, t.body());
        os << " }";
        break;
    case Term::Kind::CLam:
        os << "gen " << t.cls() << " >= " << t.bound() << ". ";
        print(os, t.body());
        break;
    case Term::Kind::CApp:
        print_fn(os, t.fn());
        os << " [" << t.cls() << ']';
        break;
    }
}

inline void print(std::ostream& os, const ContextItem& item) {
    switch (item.kind()) {
    case ContextItem::Kind::Hyp:
        os << item.var() << " : ";
        print(os, item.ann());
        os << " @ " << item.cls();
        break;
    case ContextItem::Kind::Open: os << "open " << item.cls() << " >= " << item.bound(); break;
    case ContextItem::Kind::Shut: os << "shut " << item.cls(); break;
    case ContextItem::Kind::Cls: os << "cls " << item.cls() << " >= " << item.bound(); break;
    }
}

}  // namespace detail

inline std::ostream& operator<<(std::ostream& os, const Formula& f) {
    detail::print(os, f);
    return os;
}
inline std::ostream& operator<<(std::ostream& os, const Term& t) {
    detail::print(os, t);
    return os;
}
inline std::ostream& operator<<(std::ostream& os, const ContextItem& item) {
    detail::print(os, item);
    return os;
}

inline std::string to_string(const Formula& f) {
    std::ostringstream os;
    os << f;
    return os.str();
}
inline std::string to_string(const Term& t) {
    std::ostringstream os;
    os << t;
    return os.str();
}
inline std::string to_string(const ContextItem& item) {
    std::ostringstream os;
    os << item;
    return os.str();
}
inline std::string to_string(const Context& g) {
    std::ostringstream os;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (i)
            os << ", ";
        os << g[i];
    }
    return os.str();
}

}  // namespace bml
