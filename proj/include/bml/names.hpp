#pragma once

#include <set>
#include <string>
#include <utility>
#include <vector>

#include "bml/syntax.hpp"

namespace bml {

using ClassifierSet = std::set<Classifier>;
using VariableSet = std::set<std::string>;

inline void collect_free_classifiers(const Formula& f, ClassifierSet& out) {
    switch (f.kind()) {
    case Formula::Kind::Atom: break;
    case Formula::Kind::Imp:
        collect_free_classifiers(f.lhs(), out);
        collect_free_classifiers(f.rhs(), out);
        break;
    case Formula::Kind::Box:
        collect_free_classifiers(f.body(), out);
        out.insert(f.bound());
        break;
    case Formula::Kind::Forall: {
        ClassifierSet inner;
        collect_free_classifiers(f.body(), inner);
        inner.erase(f.binder());
        out.insert(inner.begin(), inner.end());
        out.insert(f.bound());
        break;
    }
    }
}

inline ClassifierSet free_classifiers(const Formula& f) {
    ClassifierSet out;
    collect_free_classifiers(f, out);
    return out;
}

// The λ classifier counts as free and annotations are not inspected, as in the
// defining equations for terms.
inline ClassifierSet free_classifiers(const Term& t) {
    ClassifierSet out;
    switch (t.kind()) {
    case Term::Kind::Var: break;
    case Term::Kind::Lam:
        out = free_classifiers(t.body());
        out.insert(t.cls());
        break;
    case Term::Kind::App: {
        out = free_classifiers(t.fn());
        auto rhs = free_classifiers(t.arg());
        out.insert(rhs.begin(), rhs.end());
        break;
    }
    case Term::Kind::Quo:
        out = free_classifiers(t.body());
        out.insert(t.bound());
        out.erase(t.cls());
        break;
    case Term::Kind::Unq:
    case Term::Kind::CApp:
        out = free_classifiers(t.body());
        out.insert(t.cls());
        break;
    case Term::Kind::CLam:
        out = free_classifiers(t.body());
        out.erase(t.cls());
        out.insert(t.bound());
        break;
    }
    return out;
}

inline VariableSet free_variables(const Term& t) {
    VariableSet out;
    switch (t.kind()) {
    case Term::Kind::Var: out.insert(t.var_name()); break;
    case Term::Kind::Lam:
        out = free_variables(t.body());
        out.erase(t.var_name());
        break;
    case Term::Kind::App: {
        out = free_variables(t.fn());
        auto rhs = free_variables(t.arg());
        out.insert(rhs.begin(), rhs.end());
        break;
    }
    default: out = free_variables(t.body()); break;
    }
    return out;
}

// Every classifier occurring anywhere, bound or free, annotations included.
inline void collect_all_classifiers(const Formula& f, ClassifierSet& out) {
    switch (f.kind()) {
    case Formula::Kind::Atom: break;
    case Formula::Kind::Imp:
        collect_all_classifiers(f.lhs(), out);
        collect_all_classifiers(f.rhs(), out);
        break;
    case Formula::Kind::Forall: out.insert(f.binder()); [[fallthrough]];
    case Formula::Kind::Box:
        out.insert(f.bound());
        collect_all_classifiers(f.body(), out);
        break;
    }
}

inline void collect_all_classifiers(const Term& t, ClassifierSet& out) {
    switch (t.kind()) {
    case Term::Kind::Var: return;
    case Term::Kind::Lam: collect_all_classifiers(t.ann(), out); break;
    case Term::Kind::Quo:
    case Term::Kind::CLam: out.insert(t.bound()); break;
    default: break;
    }
    if (!t.is(Term::Kind::App))
        out.insert(t.cls());
    for (std::size_t i = 0; i < t.child_count(); ++i)
        collect_all_classifiers(t.child(i), out);
}

template <class T>
ClassifierSet all_classifiers(const T& subject) {
    ClassifierSet out;
    collect_all_classifiers(subject, out);
    return out;
}

inline void collect_all_variables(const Term& t, VariableSet& out) {
    if (t.is(Term::Kind::Var) || t.is(Term::Kind::Lam))
        out.insert(t.var_name());
    for (std::size_t i = 0; i < t.child_count(); ++i)
        collect_all_variables(t.child(i), out);
}

namespace detail {

// Pairs of simultaneously bound names; lookups scan from the innermost binder.
template <class Name>
class BinderEnv {
public:
    void push(const Name& a, const Name& b) { pairs_.emplace_back(a, b); }
    void pop() { pairs_.pop_back(); }

    bool same(const Name& a, const Name& b) const {
        int ia = -1, ib = -1;
        for (int i = static_cast<int>(pairs_.size()) - 1; i >= 0; --i) {
            if (ia < 0 && pairs_[i].first == a)
                ia = i;
            if (ib < 0 && pairs_[i].second == b)
                ib = i;
        }
        if (ia < 0 && ib < 0)
            return a == b;
        return ia == ib;
    }

private:
    std::vector<std::pair<Name, Name>> pairs_;
};

inline bool alpha_eq(const Formula& a, const Formula& b, BinderEnv<Classifier>& env) {
    if (a.kind() != b.kind())
        return false;
    switch (a.kind()) {
    case Formula::Kind::Atom: return a.atom_name() == b.atom_name();
    case Formula::Kind::Imp: return alpha_eq(a.lhs(), b.lhs(), env) && alpha_eq(a.rhs(), b.rhs(), env);
    case Formula::Kind::Box: return env.same(a.bound(), b.bound()) && alpha_eq(a.body(), b.body(), env);
    case Formula::Kind::Forall: {
        if (!env.same(a.bound(), b.bound()))
            return false;
        env.push(a.binder(), b.binder());
        bool ok = alpha_eq(a.body(), b.body(), env);
        env.pop();
        return ok;
    }
    }
    return false;
}

inline bool alpha_eq(const Term& a, const Term& b, BinderEnv<Classifier>& cenv, BinderEnv<std::string>& venv) {
    if (a.kind() != b.kind())
        return false;
    switch (a.kind()) {
    case Term::Kind::Var: return venv.same(a.var_name(), b.var_name());
    case Term::Kind::Lam: {
        if (!alpha_eq(a.ann(), b.ann(), cenv))
            return false;
        cenv.push(a.cls(), b.cls());
        venv.push(a.var_name(), b.var_name());
        bool ok = alpha_eq(a.body(), b.body(), cenv, venv);
        venv.pop();
        cenv.pop();
        return ok;
    }
    case Term::Kind::App:
        return alpha_eq(a.fn(), b.fn(), cenv, venv) && alpha_eq(a.arg(), b.arg(), cenv, venv);
    case Term::Kind::Quo:
    case Term::Kind::CLam: {
        if (!cenv.same(a.bound(), b.bound()))
            return false;
        cenv.push(a.cls(), b.cls());
        bool ok = alpha_eq(a.body(), b.body(), cenv, venv);
        cenv.pop();
        return ok;
    }
    case Term::Kind::Unq:
    case Term::Kind::CApp: return cenv.same(a.cls(), b.cls()) && alpha_eq(a.body(), b.body(), cenv, venv);
    }
    return false;
}

}  // namespace detail

inline bool alpha_eq(const Formula& a, const Formula& b) {
    detail::BinderEnv<Classifier> env;
    return detail::alpha_eq(a, b, env);
}

// Besides the ∀/quo/gen binders, the classifier of a λ is renameable together
// with its variable: substitution may rename it to avoid capture.
inline bool alpha_eq(const Term& a, const Term& b) {
    detail::BinderEnv<Classifier> cenv;
    detail::BinderEnv<std::string> venv;
    return detail::alpha_eq(a, b, cenv, venv);
}

}  // namespace bml
