#pragma once

#include <string>
#include <utility>
#include <vector>

#include "bml/names.hpp"
#include "bml/syntax.hpp"

namespace bml {

struct ClsSubst {
    Classifier from;
    Classifier to;
};

struct VarSubst {
    ClsSubst cls;
    std::string var;
    Term replacement;
};

namespace detail {

inline const Classifier& apply(const Classifier& c, const ClsSubst& s) { return c == s.from ? s.to : c; }

inline std::string fresh_variable(const std::string& hint) { return fresh_name(hint); }

}  // namespace detail

inline Formula subst_cls(const Formula& f, const ClsSubst& s);

namespace detail {

// A binder equal to the target of s is renamed apart before substituting under it.
template <class Node, class Rename>
std::pair<Classifier, Node> rename_binder(const Classifier& binder, const Node& body, const ClsSubst& s,
                                          Rename&& rename) {
    if (binder == s.to) {
        Classifier fresh = fresh_classifier(binder);
        return {fresh, rename(body, ClsSubst{binder, fresh})};
    }
    return {binder, body};
}

}  // namespace detail

inline Formula subst_cls(const Formula& f, const ClsSubst& s) {
    if (s.from == s.to)
        return f;
    switch (f.kind()) {
    case Formula::Kind::Atom: return f;
    case Formula::Kind::Imp: return Formula::imp(subst_cls(f.lhs(), s), subst_cls(f.rhs(), s));
    case Formula::Kind::Box: return Formula::box(detail::apply(f.bound(), s), subst_cls(f.body(), s));
    case Formula::Kind::Forall: {
        Classifier bound = detail::apply(f.bound(), s);
        if (f.binder() == s.from)
            return Formula::forall(f.binder(), bound, f.body());
        auto [binder, body] = detail::rename_binder(f.binder(), f.body(), s,
                                                    [](const Formula& b, const ClsSubst& r) { return subst_cls(b, r); });
        return Formula::forall(binder, bound, subst_cls(body, s));
    }
    }
    return f;
}

// Classifier substitution on terms. The λ classifier, like the quo and gen
// binders, scopes over the body.
inline Term subst_cls(const Term& t, const ClsSubst& s) {
    if (s.from == s.to)
        return t;
    auto rec = [](const Term& b, const ClsSubst& r) { return subst_cls(b, r); };
    switch (t.kind()) {
    case Term::Kind::Var: return t;
    case Term::Kind::Lam: {
        Formula ann = subst_cls(t.ann(), s);
        if (t.cls() == s.from)
            return Term::lam(t.var_name(), t.cls(), ann, t.body());
        auto [c, body] = detail::rename_binder(t.cls(), t.body(), s, rec);
        return Term::lam(t.var_name(), c, ann, subst_cls(body, s));
    }
    case Term::Kind::App: return Term::app(subst_cls(t.fn(), s), subst_cls(t.arg(), s));
    case Term::Kind::Quo:
    case Term::Kind::CLam: {
        Classifier bound = detail::apply(t.bound(), s);
        auto make = t.is(Term::Kind::Quo) ? &Term::quo : &Term::clam;
        if (t.cls() == s.from)
            return make(t.cls(), bound, t.body());
        auto [binder, body] = detail::rename_binder(t.cls(), t.body(), s, rec);
        return make(binder, bound, subst_cls(body, s));
    }
    case Term::Kind::Unq: return Term::unq(detail::apply(t.cls(), s), subst_cls(t.body(), s));
    case Term::Kind::CApp: return Term::capp(subst_cls(t.fn(), s), detail::apply(t.cls(), s));
    }
    return t;
}

// Substitution into a context. A declaration of s.from shadows the rest; a
// declaration of s.to is renamed throughout the suffix.
inline Context subst_cls(const Context& g, const ClsSubst& s) {
    if (s.from == s.to)
        return g;
    Context out;
    std::vector<ClsSubst> renames;
    bool shadowed = false;
    auto apply_c = [&](Classifier c) {
        for (const auto& rn : renames)
            c = detail::apply(c, rn);
        return shadowed ? c : detail::apply(c, s);
    };
    auto apply_f = [&](Formula f) {
        for (const auto& rn : renames)
            f = subst_cls(f, rn);
        return shadowed ? f : subst_cls(f, s);
    };
    auto binder = [&](const Classifier& c) {
        if (shadowed)
            return c;
        if (c == s.from) {
            shadowed = true;
            return c;
        }
        if (c == s.to) {
            Classifier fresh = fresh_classifier(c);
            renames.push_back(ClsSubst{c, fresh});
            return fresh;
        }
        return c;
    };
    for (const auto& item : g) {
        switch (item.kind()) {
        case ContextItem::Kind::Hyp: {
            Formula a = apply_f(item.ann());
            out.push_back(ContextItem::hyp(item.var(), binder(item.cls()), a));
            break;
        }
        case ContextItem::Kind::Open:
        case ContextItem::Kind::Cls: {
            Classifier bound = apply_c(item.bound());
            Classifier c = binder(item.cls());
            out.push_back(item.is(ContextItem::Kind::Open) ? ContextItem::open(c, bound) : ContextItem::cls_decl(c, bound));
            break;
        }
        case ContextItem::Kind::Shut: out.push_back(ContextItem::shut(apply_c(item.cls()))); break;
        }
    }
    return out;
}

// Simultaneous substitution M[s.cls.from := s.cls.to, s.var := s.replacement].
// Every binder on the way to a replaced occurrence is kept apart from the
// names of the replacement so that no copy ends up under a binder of the
// same name.
inline Term subst_var(const Term& t, const VarSubst& s) {
    switch (t.kind()) {
    case Term::Kind::Var: return t.var_name() == s.var ? s.replacement : t;
    case Term::Kind::App: return Term::app(subst_var(t.fn(), s), subst_var(t.arg(), s));
    case Term::Kind::Unq: return Term::unq(detail::apply(t.cls(), s.cls), subst_var(t.body(), s));
    case Term::Kind::CApp: return Term::capp(subst_var(t.fn(), s), detail::apply(t.cls(), s.cls));
    default: break;
    }

    const ClassifierSet avoid_cls = all_classifiers(s.replacement);
    const VariableSet avoid_var = free_variables(s.replacement);
    const bool var_free = free_variables(t).count(s.var) != 0;

    auto fix_binder = [&](const Classifier& c, Term& body) {
        bool clash = c == s.cls.to || avoid_cls.count(c) != 0 || (c == s.cls.from && var_free);
        if (!clash)
            return c;
        Classifier fresh = fresh_classifier(c);
        body = subst_cls(body, ClsSubst{c, fresh});
        return fresh;
    };

    if (t.is(Term::Kind::Lam)) {
        Formula ann = subst_cls(t.ann(), s.cls);
        Term body = t.body();
        if (t.cls() == s.cls.from && !var_free)
            return Term::lam(t.var_name(), t.cls(), ann, body);
        Classifier c = fix_binder(t.cls(), body);
        std::string x = t.var_name();
        if (x == s.var)
            return Term::lam(x, c, ann, subst_cls(body, s.cls));
        if (avoid_var.count(x)) {
            std::string fresh = detail::fresh_variable(x);
            body = subst_var(body, VarSubst{ClsSubst{Classifier::initial(), Classifier::initial()}, x, Term::var(fresh)});
            x = fresh;
        }
        return Term::lam(x, c, ann, subst_var(body, s));
    }

    // Quo and CLam.
    Classifier bound = detail::apply(t.bound(), s.cls);
    auto make = t.is(Term::Kind::Quo) ? &Term::quo : &Term::clam;
    Term body = t.body();
    if (t.cls() == s.cls.from && !var_free)
        return make(t.cls(), bound, body);
    Classifier c = fix_binder(t.cls(), body);
    return make(c, bound, subst_var(body, s));
}

// The combined substitution used by the first β-rule.
inline Term subst_var(const Term& t, const Classifier& from, const Classifier& to, const std::string& x, const Term& n) {
    return subst_var(t, VarSubst{ClsSubst{from, to}, x, n});
}

}  // namespace bml
