#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "bml/names.hpp"
#include "bml/substitution.hpp"
#include "bml/syntax.hpp"

namespace bml {

enum class RedexKind { BetaLam, BetaQuo, BetaCls };

inline const char* to_string(RedexKind k) {
    switch (k) {
    case RedexKind::BetaLam: return "BetaLam";
    case RedexKind::BetaQuo: return "BetaQuo";
    case RedexKind::BetaCls: return "BetaCls";
    }
    return "?";
}

using TermPath = std::vector<std::size_t>;

inline std::string path_string(const TermPath& p) {
    if (p.empty())
        return "root";
    std::string out;
    for (std::size_t i = 0; i < p.size(); ++i)
        out += (i ? "." : "") + std::to_string(p[i]);
    return out;
}

struct RedexSite {
    TermPath path;
    Classifier position;
    RedexKind kind;
};

class StepCapExceeded : public std::runtime_error {
public:
    explicit StepCapExceeded(std::size_t cap)
        : std::runtime_error("normalization exceeded " + std::to_string(cap) + " steps"), cap(cap) {}
    std::size_t cap;
};

inline std::optional<RedexKind> redex_kind(const Term& t) {
    if (t.is(Term::Kind::App) && t.fn().is(Term::Kind::Lam))
        return RedexKind::BetaLam;
    if (t.is(Term::Kind::Unq) && t.body().is(Term::Kind::Quo))
        return RedexKind::BetaQuo;
    if (t.is(Term::Kind::CApp) && t.fn().is(Term::Kind::CLam))
        return RedexKind::BetaCls;
    return std::nullopt;
}

// Position of the i-th child of t when t sits at position `at`.
inline Classifier child_position(const Term& t, std::size_t /*i*/, const Classifier& at) {
    switch (t.kind()) {
    case Term::Kind::Lam:
    case Term::Kind::Quo:
    case Term::Kind::Unq: return t.cls();
    default: return at;
    }
}

// Contracts the redex t (which must be one) at position `at`.
inline Term contract(const Term& t, const Classifier& at) {
    switch (*redex_kind(t)) {
    case RedexKind::BetaLam: {
        const Term& lam = t.fn();
        return subst_var(lam.body(), lam.cls(), at, lam.var_name(), t.arg());
    }
    case RedexKind::BetaQuo: {
        const Term& quo = t.body();
        return subst_cls(quo.body(), ClsSubst{quo.cls(), at});
    }
    case RedexKind::BetaCls: {
        const Term& gen = t.fn();
        return subst_cls(gen.body(), ClsSubst{gen.cls(), t.cls()});
    }
    }
    return t;
}

namespace detail {

inline void collect_redexes(const Term& t, const Classifier& at, TermPath& path, std::vector<RedexSite>& out) {
    if (auto k = redex_kind(t))
        out.push_back(RedexSite{path, at, *k});
    for (std::size_t i = 0; i < t.child_count(); ++i) {
        path.push_back(i);
        collect_redexes(t.child(i), child_position(t, i, at), path, out);
        path.pop_back();
    }
}

inline std::optional<RedexSite> first_redex(const Term& t, const Classifier& at, TermPath& path) {
    if (auto k = redex_kind(t))
        return RedexSite{path, at, *k};
    for (std::size_t i = 0; i < t.child_count(); ++i) {
        path.push_back(i);
        auto r = first_redex(t.child(i), child_position(t, i, at), path);
        path.pop_back();
        if (r)
            return r;
    }
    return std::nullopt;
}

inline Term rebuild(const Term& t, std::size_t i, Term c) {
    switch (t.kind()) {
    case Term::Kind::Lam: return Term::lam(t.var_name(), t.cls(), t.ann(), std::move(c));
    case Term::Kind::App: return i == 0 ? Term::app(std::move(c), t.arg()) : Term::app(t.fn(), std::move(c));
    case Term::Kind::Quo: return Term::quo(t.cls(), t.bound(), std::move(c));
    case Term::Kind::Unq: return Term::unq(t.cls(), std::move(c));
    case Term::Kind::CLam: return Term::clam(t.cls(), t.bound(), std::move(c));
    case Term::Kind::CApp: return Term::capp(std::move(c), t.cls());
    case Term::Kind::Var: break;
    }
    return t;
}

inline Term contract_at(const Term& t, const RedexSite& site, std::size_t depth) {
    if (depth == site.path.size())
        return contract(t, site.position);
    std::size_t i = site.path[depth];
    return rebuild(t, i, contract_at(t.child(i), site, depth + 1));
}

}  // namespace detail

// All redexes in pre-order, so the first one is leftmost-outermost.
inline std::vector<RedexSite> redex_sites(const Term& t, const Classifier& at) {
    std::vector<RedexSite> out;
    TermPath path;
    detail::collect_redexes(t, at, path, out);
    return out;
}

inline Term contract_at(const Term& t, const RedexSite& site) { return detail::contract_at(t, site, 0); }

inline const Term& subterm_at(const Term& t, const TermPath& path) {
    const Term* cur = &t;
    for (auto i : path)
        cur = &cur->child(i);
    return *cur;
}

struct Step {
    Term term;
    RedexSite site;
};

// Leftmost-outermost step; nullopt means t is normal.
inline std::optional<Step> beta_step(const Term& t, const Classifier& at) {
    TermPath path;
    auto site = detail::first_redex(t, at, path);
    if (!site)
        return std::nullopt;
    return Step{contract_at(t, *site), *site};
}

enum class Strategy { LeftmostOutermost, RandomInnermost };

struct Normalized {
    Term term;
    std::size_t steps = 0;
    std::vector<RedexSite> trace;
};

inline bool is_prefix(const TermPath& a, const TermPath& b) {
    return a.size() < b.size() && std::equal(a.begin(), a.end(), b.begin());
}

// Picks uniformly among redexes that contain no other redex.
inline std::optional<Step> random_innermost_step(const Term& t, const Classifier& at, std::mt19937_64& rng) {
    auto sites = redex_sites(t, at);
    if (sites.empty())
        return std::nullopt;
    std::vector<const RedexSite*> inner;
    for (const auto& s : sites) {
        bool has_below = false;
        for (const auto& o : sites) {
            if (is_prefix(s.path, o.path)) {
                has_below = true;
                break;
            }
        }
        if (!has_below)
            inner.push_back(&s);
    }
    std::uniform_int_distribution<std::size_t> pick(0, inner.size() - 1);
    const RedexSite& s = *inner[pick(rng)];
    return Step{contract_at(t, s), s};
}

inline Normalized normalize(const Term& t, const Classifier& at, std::size_t step_cap,
                            Strategy strategy = Strategy::LeftmostOutermost, std::uint64_t seed = 0,
                            bool keep_trace = false) {
    std::mt19937_64 rng(seed);
    Normalized out{t, 0, {}};
    for (;;) {
        auto s = strategy == Strategy::LeftmostOutermost ? beta_step(out.term, at)
                                                         : random_innermost_step(out.term, at, rng);
        if (!s)
            return out;
        if (out.steps == step_cap)
            throw StepCapExceeded(step_cap);
        out.term = std::move(s->term);
        ++out.steps;
        if (keep_trace)
            out.trace.push_back(std::move(s->site));
    }
}

inline bool is_normal(const Term& t) {
    if (redex_kind(t))
        return false;
    for (std::size_t i = 0; i < t.child_count(); ++i) {
        if (!is_normal(t.child(i)))
            return false;
    }
    return true;
}

enum class TermClass { Canonical, Neutral };

inline TermClass classify(const Term& t) {
    switch (t.kind()) {
    case Term::Kind::Lam:
    case Term::Kind::Quo:
    case Term::Kind::CLam: return TermClass::Canonical;
    default: return TermClass::Neutral;
    }
}

namespace detail {

// Matches a against b under a classifier map extended consistently as
// classifiers are met. Bound classifiers in b are matched like any other.
inline bool match_formula(const Formula& a, const Formula& b, std::map<Classifier, Classifier>& map) {
    if (a.kind() != b.kind())
        return false;
    auto bind = [&](const Classifier& x, const Classifier& y) {
        auto it = map.find(y);
        if (it == map.end()) {
            map.emplace(y, x);
            return true;
        }
        return it->second == x;
    };
    switch (a.kind()) {
    case Formula::Kind::Atom: return a.atom_name() == b.atom_name();
    case Formula::Kind::Imp: {
        auto saved = map;
        if (match_formula(a.lhs(), b.lhs(), map) && match_formula(a.rhs(), b.rhs(), map))
            return true;
        map = saved;
        return false;
    }
    case Formula::Kind::Box: return bind(a.bound(), b.bound()) && match_formula(a.body(), b.body(), map);
    case Formula::Kind::Forall:
        return bind(a.binder(), b.binder()) && bind(a.bound(), b.bound()) && match_formula(a.body(), b.body(), map);
    }
    return false;
}

}  // namespace detail

// True when a is a subexpression of b up to renaming of classifiers.
inline bool is_subformula(const Formula& a, const Formula& b) {
    std::map<Classifier, Classifier> map;
    if (detail::match_formula(a, b, map))
        return true;
    switch (b.kind()) {
    case Formula::Kind::Atom: return false;
    case Formula::Kind::Imp: return is_subformula(a, b.lhs()) || is_subformula(a, b.rhs());
    case Formula::Kind::Box:
    case Formula::Kind::Forall: return is_subformula(a, b.body());
    }
    return false;
}

}  // namespace bml
