#pragma once

#include <algorithm>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "bml/context.hpp"
#include "bml/cs4.hpp"
#include "bml/kripke.hpp"
#include "bml/names.hpp"
#include "bml/substitution.hpp"
#include "bml/syntax.hpp"

namespace bml::testing {

using Rng = std::mt19937_64;

inline std::size_t uniform(Rng& rng, std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); }
inline bool coin(Rng& rng, double p = 0.5) { return std::bernoulli_distribution(p)(rng); }

template <class T>
const T& pick(Rng& rng, const std::vector<T>& xs) {
    return xs[uniform(rng, xs.size())];
}

inline const std::vector<std::string>& atom_names() {
    static const std::vector<std::string> names = {"p", "q", "r"};
    return names;
}

// Random formula whose free classifiers come from `scope`.
inline Formula random_formula(Rng& rng, std::size_t depth, std::vector<Classifier> scope,
                              std::size_t atoms = 2) {
    std::vector<std::string> as(atom_names().begin(), atom_names().begin() + static_cast<std::ptrdiff_t>(atoms));
    if (depth == 0 || coin(rng, 0.25))
        return Formula::atom(pick(rng, as));
    switch (uniform(rng, 4)) {
    case 0:
    case 1: return Formula::imp(random_formula(rng, depth - 1, scope, atoms), random_formula(rng, depth - 1, scope, atoms));
    case 2: return Formula::box(pick(rng, scope), random_formula(rng, depth - 1, scope, atoms));
    default: {
        Classifier bound = pick(rng, scope);
        Classifier binder = fresh_classifier(Classifier("a"));
        scope.push_back(binder);
        return Formula::forall(binder, bound, random_formula(rng, depth - 1, scope, atoms));
    }
    }
}

// Formula over atoms, implication and boxes bounded by "!".
inline Formula random_initial_formula(Rng& rng, std::size_t depth) {
    if (depth == 0 || coin(rng, 0.25))
        return Formula::atom(pick(rng, std::vector<std::string>{"p", "q"}));
    if (coin(rng))
        return Formula::imp(random_initial_formula(rng, depth - 1), random_initial_formula(rng, depth - 1));
    return Formula::box(Classifier::initial(), random_initial_formula(rng, depth - 1));
}

inline BoxType random_box_type(Rng& rng, std::size_t depth) {
    if (depth == 0 || coin(rng, 0.25))
        return BoxType::atom(pick(rng, std::vector<std::string>{"p", "q"}));
    if (coin(rng))
        return BoxType::imp(random_box_type(rng, depth - 1), random_box_type(rng, depth - 1));
    return BoxType::box(random_box_type(rng, depth - 1));
}

inline std::vector<Classifier> domain_of(const ContextState& st) {
    auto d = dom_c(st.items());
    return {d.begin(), d.end()};
}

// Random well-formed context of at most `max_items` items.
inline Context random_context(Rng& rng, std::size_t max_items, bool allow_hyps = true) {
    ContextState st;
    std::size_t n = uniform(rng, max_items + 1);
    std::size_t var = 0;
    while (st.items().size() < n) {
        auto dom = domain_of(st);
        std::optional<ContextItem> item;
        switch (uniform(rng, allow_hyps ? 4 : 3)) {
        case 0: item = ContextItem::open(fresh_classifier(Classifier("o")), pick(rng, dom)); break;
        case 1: item = ContextItem::cls_decl(fresh_classifier(Classifier("c")), pick(rng, dom)); break;
        case 2: {
            std::vector<Classifier> below;
            for (const auto& d : dom)
                if (st.derives(RelKind::Mod, d, st.pos()))
                    below.push_back(d);
            item = ContextItem::shut(pick(rng, below));
            break;
        }
        default:
            item = ContextItem::hyp("v" + std::to_string(var++), fresh_classifier(Classifier("h")),
                                    random_formula(rng, 2, dom));
        }
        if (st.push(*item))
            continue;
    }
    return st.items();
}

// Type-directed generator of well-typed terms with deliberate detours, so the
// results carry redexes of every kind.
class TermGenerator {
public:
    explicit TermGenerator(Rng& rng) : rng_(rng) {}

    std::optional<Term> generate(ContextState& st, const Formula& target, std::size_t depth) {
        std::vector<int> options = {0, 1, 2, 3, 4, 5};
        std::shuffle(options.begin(), options.end(), rng_);
        for (int o : options) {
            std::optional<Term> t;
            switch (o) {
            case 0: t = intro(st, target, depth); break;
            case 1: t = eliminate(st, target, depth); break;
            case 2: if (depth > 0) t = beta_lam(st, target, depth); break;
            case 3: if (depth > 0) t = beta_quo(st, target, depth); break;
            case 4: if (depth > 0) t = beta_cls(st, target, depth); break;
            case 5: t = eliminate(st, target, 0); break;
            }
            if (t)
                return t;
        }
        return std::nullopt;
    }

private:
    struct Hyp {
        std::string var;
        Classifier cls;
        Formula type;
    };

    // Hypotheses visible at the current position, innermost first.
    std::vector<Hyp> visible(const ContextState& st) const {
        std::vector<Hyp> out;
        std::set<std::string> seen;
        const auto& items = st.items();
        for (auto it = items.rbegin(); it != items.rend(); ++it) {
            if (!it->is(ContextItem::Kind::Hyp) || !seen.insert(it->var()).second)
                continue;
            if (st.derives(RelKind::Pre, it->cls(), st.pos()))
                out.push_back({it->var(), it->cls(), it->ann()});
        }
        return out;
    }

    std::optional<Term> intro(ContextState& st, const Formula& a, std::size_t depth) {
        if (depth == 0)
            return std::nullopt;
        switch (a.kind()) {
        case Formula::Kind::Atom: return std::nullopt;
        case Formula::Kind::Imp: {
            std::string x = fresh_name("x");
            Classifier d = fresh_classifier(Classifier("l"));
            if (st.push(ContextItem::hyp(x, d, a.lhs())))
                return std::nullopt;
            auto body = generate(st, a.rhs(), depth - 1);
            st.pop();
            if (!body)
                return std::nullopt;
            return Term::lam(x, d, a.lhs(), *body);
        }
        case Formula::Kind::Box: {
            Classifier d = fresh_classifier(Classifier("q"));
            if (st.push(ContextItem::open(d, a.bound())))
                return std::nullopt;
            auto body = generate(st, a.body(), depth - 1);
            st.pop();
            if (!body)
                return std::nullopt;
            return Term::quo(d, a.bound(), *body);
        }
        case Formula::Kind::Forall: {
            Classifier d = fresh_classifier(Classifier("k"));
            if (st.push(ContextItem::cls_decl(d, a.bound())))
                return std::nullopt;
            auto body = generate(st, subst_cls(a.body(), ClsSubst{a.binder(), d}), depth - 1);
            st.pop();
            if (!body)
                return std::nullopt;
            return Term::clam(d, a.bound(), *body);
        }
        }
        return std::nullopt;
    }

    // Works backwards from a visible hypothesis through applications,
    // classifier applications and one splice of the head.
    std::optional<Term> eliminate(ContextState& st, const Formula& a, std::size_t depth) {
        auto hyps = visible(st);
        std::shuffle(hyps.begin(), hyps.end(), rng_);
        for (const auto& h : hyps) {
            if (auto t = spine(st, Term::var(h.var), h.type, a, depth, true, h.cls))
                return t;
        }
        return std::nullopt;
    }

    std::optional<Term> spine(ContextState& st, const Term& head, const Formula& type, const Formula& a,
                              std::size_t depth, bool bare, const Classifier& cls) {
        if (alpha_eq(type, a))
            return head;
        switch (type.kind()) {
        case Formula::Kind::Atom: return std::nullopt;
        case Formula::Kind::Imp: {
            if (depth == 0 || !mentions_target(type.rhs(), a))
                return std::nullopt;
            auto arg = generate(st, type.lhs(), depth - 1);
            if (!arg)
                return std::nullopt;
            return spine(st, Term::app(head, *arg), type.rhs(), a, depth, false, cls);
        }
        case Formula::Kind::Box: {
            if (!bare || !st.derives(RelKind::Pre, type.bound(), st.pos()) ||
                !st.derives(RelKind::Mod, cls, st.pos()))
                return std::nullopt;
            return spine(st, Term::unq(cls, head), type.body(), a, depth, false, cls);
        }
        case Formula::Kind::Forall: {
            auto dom = domain_of(st);
            std::shuffle(dom.begin(), dom.end(), rng_);
            for (const auto& c : dom) {
                if (!st.derives(RelKind::Pre, type.bound(), c))
                    continue;
                Formula inst = subst_cls(type.body(), ClsSubst{type.binder(), c});
                if (auto t = spine(st, Term::capp(head, c), inst, a, depth, false, cls))
                    return t;
            }
            return std::nullopt;
        }
        }
        return std::nullopt;
    }

    static bool mentions_target(const Formula& f, const Formula& a) {
        if (f.kind() == a.kind() && (!f.is(Formula::Kind::Atom) || f.atom_name() == a.atom_name()))
            return true;
        switch (f.kind()) {
        case Formula::Kind::Atom: return false;
        case Formula::Kind::Imp: return mentions_target(f.rhs(), a);
        default: return mentions_target(f.body(), a);
        }
    }

    // (\y : B @ d. M) N with B the type of something visible.
    std::optional<Term> beta_lam(ContextState& st, const Formula& a, std::size_t depth) {
        auto hyps = visible(st);
        if (hyps.empty())
            return std::nullopt;
        const Hyp& h = pick(rng_, hyps);
        auto arg = generate(st, h.type, depth - 1);
        if (!arg)
            return std::nullopt;
        std::string y = fresh_name("y");
        Classifier d = fresh_classifier(Classifier("b"));
        if (st.push(ContextItem::hyp(y, d, h.type)))
            return std::nullopt;
        auto body = generate(st, a, depth - 1);
        st.pop();
        if (!body)
            return std::nullopt;
        return Term::app(Term::lam(y, d, h.type, *body), *arg);
    }

    // unq[pos]{ quo[d >= b]{ M } } for a bound b below the position.
    std::optional<Term> beta_quo(ContextState& st, const Formula& a, std::size_t depth) {
        Classifier here = st.pos();
        std::vector<Classifier> bounds;
        for (const auto& c : domain_of(st))
            if (st.derives(RelKind::Pre, c, here))
                bounds.push_back(c);
        Classifier b = pick(rng_, bounds);
        Classifier d = fresh_classifier(Classifier("s"));
        if (st.push(ContextItem::shut(here)))
            return std::nullopt;
        if (st.push(ContextItem::open(d, b))) {
            st.pop();
            return std::nullopt;
        }
        auto body = generate(st, a, depth - 1);
        st.pop();
        st.pop();
        if (!body)
            return std::nullopt;
        return Term::unq(here, Term::quo(d, b, *body));
    }

    // (gen d >= b. M) [c] with b below c.
    std::optional<Term> beta_cls(ContextState& st, const Formula& a, std::size_t depth) {
        auto dom = domain_of(st);
        Classifier b = pick(rng_, dom);
        std::vector<Classifier> above;
        for (const auto& c : dom)
            if (st.derives(RelKind::Pre, b, c))
                above.push_back(c);
        Classifier c = pick(rng_, above);
        Classifier d = fresh_classifier(Classifier("u"));
        if (st.push(ContextItem::cls_decl(d, b)))
            return std::nullopt;
        auto body = generate(st, a, depth - 1);
        st.pop();
        if (!body)
            return std::nullopt;
        return Term::capp(Term::clam(d, b, *body), c);
    }

    Rng& rng_;
};

inline bool has_redex(const Term& t) {
    if ((t.is(Term::Kind::App) && t.fn().is(Term::Kind::Lam)) || (t.is(Term::Kind::Unq) && t.body().is(Term::Kind::Quo)) ||
        (t.is(Term::Kind::CApp) && t.fn().is(Term::Kind::CLam)))
        return true;
    for (std::size_t i = 0; i < t.child_count(); ++i)
        if (has_redex(t.child(i)))
            return true;
    return false;
}

struct GeneratedJudgment {
    Context context;
    Term term;
    Formula type;
};

// A well-typed judgment whose term contains at least one redex. With
// `closed`, the context has no hypotheses and the term abstracts the one it
// uses, so it has no free term variables.
inline GeneratedJudgment random_judgment(Rng& rng, bool closed, std::size_t depth = 4) {
    for (;;) {
        Context prefix = random_context(rng, 4, !closed);
        ContextState st = state_of(prefix);
        auto dom = domain_of(st);
        Formula a = random_formula(rng, 3, dom);
        std::string x = fresh_name("z");
        Classifier c = fresh_classifier(Classifier("z"));
        if (st.push(ContextItem::hyp(x, c, a)))
            continue;
        TermGenerator gen(rng);
        auto m = gen.generate(st, a, depth);
        if (!m || !has_redex(*m))
            continue;
        if (closed)
            return {prefix, Term::lam(x, c, a, *m), Formula::imp(a, a)};
        return {st.items(), *m, a};
    }
}

// Random terms that need not be well-typed, for printing round trips.
inline Term random_raw_term(Rng& rng, std::size_t depth) {
    static const std::vector<std::string> vars = {"x", "y", "f", "x#3"};
    static const std::vector<Classifier> cls = {Classifier::initial(), Classifier("g"), Classifier("h1"),
                                                Classifier("d#7")};
    auto binder = [&] { return pick(rng, std::vector<Classifier>(cls.begin() + 1, cls.end())); };
    if (depth == 0)
        return Term::var(pick(rng, vars));
    switch (uniform(rng, 7)) {
    case 0: return Term::var(pick(rng, vars));
    case 1: return Term::lam(pick(rng, vars), binder(), random_formula(rng, 2, cls), random_raw_term(rng, depth - 1));
    case 2: return Term::app(random_raw_term(rng, depth - 1), random_raw_term(rng, depth - 1));
    case 3: {
        Classifier b = binder();
        Classifier bound = pick(rng, cls);
        while (bound == b)
            bound = pick(rng, cls);
        return Term::quo(b, bound, random_raw_term(rng, depth - 1));
    }
    case 4: return Term::unq(pick(rng, cls), random_raw_term(rng, depth - 1));
    case 5: {
        Classifier b = binder();
        Classifier bound = pick(rng, cls);
        while (bound == b)
            bound = pick(rng, cls);
        return Term::clam(b, bound, random_raw_term(rng, depth - 1));
    }
    default: return Term::capp(random_raw_term(rng, depth - 1), pick(rng, cls));
    }
}

inline Context random_raw_context(Rng& rng, std::size_t max_items) {
    static const std::vector<Classifier> cls = {Classifier::initial(), Classifier("g"), Classifier("h#2"),
                                                Classifier("k")};
    Context g;
    std::size_t n = uniform(rng, max_items + 1);
    for (std::size_t i = 0; i < n; ++i) {
        Classifier b(pick(rng, std::vector<std::string>{"g", "h#2", "k", "m"}));
        Classifier bound = pick(rng, cls);
        switch (uniform(rng, 4)) {
        case 0: g.push_back(ContextItem::hyp("x" + std::to_string(i), b, random_formula(rng, 3, cls))); break;
        case 1:
            if (!(bound == b))
                g.push_back(ContextItem::open(b, bound));
            break;
        case 2: g.push_back(ContextItem::shut(bound)); break;
        default:
            if (!(bound == b))
                g.push_back(ContextItem::cls_decl(b, bound));
        }
    }
    return g;
}

// Random BML model. Worlds are ordered by generator edges i -> j with i < j,
// and each world's structure extends those of its predecessors.
inline BmlModel random_bml_model(Rng& rng, std::size_t max_worlds = 4, std::size_t max_elements = 5) {
    std::size_t nw = 1 + uniform(rng, max_worlds);
    std::size_t ne = 1 + uniform(rng, max_elements);
    std::vector<std::pair<std::size_t, std::size_t>> order;
    for (std::size_t i = 0; i < nw; ++i)
        for (std::size_t j = i + 1; j < nw; ++j)
            if (coin(rng, 0.4))
                order.emplace_back(i, j);
    Relation ord(nw);
    for (auto [a, b] : order)
        ord.set(a, b);
    ord.close_reflexive_transitive();

    std::vector<std::string> names = {"!"};
    for (std::size_t e = 1; e < ne; ++e)
        names.push_back("e" + std::to_string(e));

    struct Stage {
        std::vector<char> dom;
        Relation pre, mod;
        std::map<std::string, std::vector<char>> val;
    };
    std::vector<Stage> stages;
    for (std::size_t w = 0; w < nw; ++w) {
        Stage s{std::vector<char>(ne, 0), Relation(ne), Relation(ne), {}};
        s.dom[0] = 1;
        for (const auto& p : {"p", "q"})
            s.val[p] = std::vector<char>(ne, 0);
        for (std::size_t v = 0; v < w; ++v) {
            if (!ord(v, w))
                continue;
            s.pre = s.pre.united(stages[v].pre);
            s.mod = s.mod.united(stages[v].mod);
            for (std::size_t e = 0; e < ne; ++e) {
                s.dom[e] |= stages[v].dom[e];
                for (auto& [p, set] : s.val)
                    set[e] |= stages[v].val.at(p)[e];
            }
        }
        for (std::size_t e = 1; e < ne; ++e)
            if (coin(rng, 0.5))
                s.dom[e] = 1;
        for (std::size_t a = 0; a < ne; ++a)
            for (std::size_t b = 0; b < ne; ++b) {
                if (!s.dom[a] || !s.dom[b] || a == b)
                    continue;
                if (coin(rng, 0.2))
                    s.pre.set(a, b);
                if (coin(rng, 0.25))
                    s.mod.set(a, b);
            }
        for (std::size_t e = 0; e < ne; ++e)
            if (s.dom[e])
                s.pre.set(0, e);
        s.pre.close_reflexive_transitive();
        s.mod = s.mod.united(s.pre);
        s.mod.close_reflexive_transitive();
        for (auto& [p, set] : s.val) {
            for (std::size_t e = 0; e < ne; ++e)
                if (s.dom[e] && coin(rng, 0.3))
                    set[e] = 1;
            for (std::size_t a = 0; a < ne; ++a)
                for (std::size_t b = 0; b < ne; ++b)
                    if (set[a] && s.pre(a, b) && s.dom[b])
                        set[b] = 1;
        }
        stages.push_back(std::move(s));
    }

    std::vector<std::string> worlds;
    std::vector<BmlStructure> structures;
    for (std::size_t w = 0; w < nw; ++w) {
        worlds.push_back("w" + std::to_string(w));
        const Stage& s = stages[w];
        std::vector<std::size_t> idx;
        for (std::size_t e = 0; e < ne; ++e)
            if (s.dom[e])
                idx.push_back(e);
        BmlStructure st;
        st.root = 0;
        st.pre = Relation(idx.size());
        st.mod = Relation(idx.size());
        for (std::size_t i = 0; i < idx.size(); ++i) {
            st.elements.push_back(names[idx[i]]);
            for (std::size_t j = 0; j < idx.size(); ++j) {
                st.pre.set(i, j, s.pre(idx[i], idx[j]));
                st.mod.set(i, j, s.mod(idx[i], idx[j]));
            }
        }
        for (const auto& [p, set] : s.val) {
            std::vector<char> local(idx.size(), 0);
            for (std::size_t i = 0; i < idx.size(); ++i)
                local[i] = set[idx[i]];
            st.val[p] = std::move(local);
        }
        structures.push_back(std::move(st));
    }
    return assemble_model(worlds, order, structures);
}

// Random CS4 model. Rejection sampling for left-persistency, with a repair
// (closing R under R;pre) when sampling keeps failing.
inline CS4Model random_cs4_model(Rng& rng, std::size_t max_worlds = 6) {
    std::size_t n = 1 + uniform(rng, max_worlds);
    CS4Model m;
    for (std::size_t i = 0; i < n; ++i)
        m.worlds.push_back("u" + std::to_string(i));
    for (int attempt = 0;; ++attempt) {
        m.pre = Relation(n);
        m.R = Relation(n);
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b) {
                if (a == b)
                    continue;
                if (coin(rng, 0.2))
                    m.pre.set(a, b);
                if (coin(rng, 0.2))
                    m.R.set(a, b);
            }
        m.pre.close_reflexive_transitive();
        m.R.close_reflexive_transitive();
        if (!m.R.compose(m.pre).subset_of(m.pre.compose(m.R))) {
            if (attempt < 8)
                continue;
            m.R = m.R.united(m.R.compose(m.pre)).closed();
        }
        break;
    }
    m.val.clear();
    for (const auto& p : {"p", "q"}) {
        std::vector<char> set(n, 0);
        for (std::size_t a = 0; a < n; ++a)
            if (coin(rng, 0.35))
                set[a] = 1;
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b)
                if (set[a] && m.pre(a, b))
                    set[b] = 1;
        m.val[p] = std::move(set);
    }
    return m;
}

}  // namespace bml::testing
