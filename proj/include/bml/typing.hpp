#pragma once

#include <functional>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "bml/context.hpp"
#include "bml/names.hpp"
#include "bml/substitution.hpp"
#include "bml/syntax.hpp"

namespace bml {

namespace rule {
inline constexpr const char* Wf = "WF";
inline constexpr const char* Var = "Var";
inline constexpr const char* ImpI = "->I";
inline constexpr const char* ImpE = "->E";
inline constexpr const char* BoxI = "[]I";
inline constexpr const char* BoxE = "[]E";
inline constexpr const char* AllI = "forall-I";
inline constexpr const char* AllE = "forall-E";
inline constexpr const char* Check = "check";
}  // namespace rule

struct TypeError {
    std::string rule;
    std::string obligation;
    Context context;                  // context at the failing node
    std::vector<std::size_t> path;    // child indices from the root term
    std::optional<Formula> expected;  // set for mismatches
    std::optional<Formula> found;

    std::string message() const {
        std::string out = rule + " requires " + obligation;
        if (!path.empty()) {
            out += " (at path ";
            for (std::size_t i = 0; i < path.size(); ++i)
                out += (i ? "." : "") + std::to_string(path[i]);
            out += ")";
        }
        return out;
    }
};

class TypeCheckFailure : public std::runtime_error {
public:
    explicit TypeCheckFailure(TypeError e) : std::runtime_error(e.message()), error(std::move(e)) {}
    TypeError error;
};

class AtomicType : public std::runtime_error {
public:
    explicit AtomicType(const Formula& f) : std::runtime_error("no expansion at atomic type " + to_string(f)) {}
};

struct Derivation {
    std::string rule;
    Context context;
    Term term;
    Formula type;
    std::vector<Derivation> premises;
};

struct TypingResult {
    std::optional<Formula> type;
    std::optional<TypeError> error;
    std::optional<Derivation> derivation;

    bool ok() const { return type.has_value(); }
};

namespace detail {

class Checker {
public:
    Checker(ContextState& st, bool record) : st_(st), record_(record) {}

    // Returns the type; on failure throws TypeCheckFailure.
    Formula infer(const Term& m, std::optional<Derivation>* out) {
        std::vector<std::optional<Derivation>> premises(m.child_count());
        auto sub = [&](std::size_t i) -> std::optional<Derivation>* { return record_ ? &premises[i] : nullptr; };
        Formula result = step(m, sub);
        if (out) {
            Derivation d{rule_name(m), st_.items(), m, result, {}};
            for (auto& p : premises)
                d.premises.push_back(std::move(*p));
            *out = std::move(d);
        }
        return result;
    }

private:
    static const char* rule_name(const Term& m) {
        switch (m.kind()) {
        case Term::Kind::Var: return rule::Var;
        case Term::Kind::Lam: return rule::ImpI;
        case Term::Kind::App: return rule::ImpE;
        case Term::Kind::Quo: return rule::BoxI;
        case Term::Kind::Unq: return rule::BoxE;
        case Term::Kind::CLam: return rule::AllI;
        case Term::Kind::CApp: return rule::AllE;
        }
        return "?";
    }

    [[noreturn]] void fail(const char* r, std::string obligation) const {
        throw TypeCheckFailure(TypeError{r, std::move(obligation), st_.items(), path_, std::nullopt, std::nullopt});
    }

    std::string rel(const Classifier& a, RelKind k, const Classifier& b) const {
        return a.name() + " " + rel_symbol(k) + " " + b.name();
    }

    void require_dom(const char* r, const Classifier& c) const {
        if (!st_.in_dom(c))
            fail(r, c.name() + " to be declared");
    }

    void extend(const char* r, const ContextItem& item) {
        auto e = st_.push(item);
        if (!e)
            return;
        switch (e->code) {
        case WfError::Code::DuplicateClassifier: fail(r, e->subject.name() + " to be fresh");
        case WfError::Code::UnknownClassifier: fail(r, e->subject.name() + " to be declared");
        case WfError::Code::IllFormedAnnotation: fail(r, "a well-formed annotation: " + e->detail);
        case WfError::Code::ShutNotBelow: fail(r, e->detail.substr(e->detail.find(' ') + 1));
        }
    }

    template <class Sub>
    Formula child(std::size_t i, const Term& t, Sub&& sub) {
        path_.push_back(i);
        Formula f = infer(t, sub(i));
        path_.pop_back();
        return f;
    }

    template <class Sub>
    Formula step(const Term& m, Sub&& sub) {
        const Classifier here = st_.pos();
        switch (m.kind()) {
        case Term::Kind::Var: {
            const auto& items = st_.items();
            for (auto it = items.rbegin(); it != items.rend(); ++it) {
                if (it->is(ContextItem::Kind::Hyp) && it->var() == m.var_name()) {
                    if (!st_.derives(RelKind::Pre, it->cls(), here))
                        fail(rule::Var, rel(it->cls(), RelKind::Pre, here));
                    return it->ann();
                }
            }
            fail(rule::Var, "a hypothesis for " + m.var_name());
        }
        case Term::Kind::Lam: {
            extend(rule::ImpI, ContextItem::hyp(m.var_name(), m.cls(), m.ann()));
            Formula b = child(0, m.body(), sub);
            st_.pop();
            if (free_classifiers(b).count(m.cls()))
                fail(rule::ImpI, m.cls().name() + " not free in " + to_string(b));
            return Formula::imp(m.ann(), b);
        }
        case Term::Kind::App: {
            Formula f = child(0, m.fn(), sub);
            if (!f.is(Formula::Kind::Imp))
                fail(rule::ImpE, "an implication in function position, found " + to_string(f));
            Formula a = child(1, m.arg(), sub);
            if (!alpha_eq(f.lhs(), a)) {
                TypeError e{rule::ImpE, "argument type " + to_string(f.lhs()) + ", found " + to_string(a),
                            st_.items(), path_, f.lhs(), a};
                throw TypeCheckFailure(std::move(e));
            }
            return f.rhs();
        }
        case Term::Kind::Quo: {
            require_dom(rule::BoxI, m.bound());
            extend(rule::BoxI, ContextItem::open(m.cls(), m.bound()));
            Formula a = child(0, m.body(), sub);
            st_.pop();
            if (free_classifiers(a).count(m.cls()))
                fail(rule::BoxI, m.cls().name() + " not free in " + to_string(a));
            return Formula::box(m.bound(), a);
        }
        case Term::Kind::Unq: {
            require_dom(rule::BoxE, m.cls());
            extend(rule::BoxE, ContextItem::shut(m.cls()));
            Formula b = child(0, m.body(), sub);
            st_.pop();
            if (!b.is(Formula::Kind::Box))
                fail(rule::BoxE, "a box type under unq, found " + to_string(b));
            if (!st_.derives(RelKind::Pre, b.bound(), here))
                fail(rule::BoxE, rel(b.bound(), RelKind::Pre, here));
            return b.body();
        }
        case Term::Kind::CLam: {
            require_dom(rule::AllI, m.bound());
            extend(rule::AllI, ContextItem::cls_decl(m.cls(), m.bound()));
            Formula a = child(0, m.body(), sub);
            st_.pop();
            return Formula::forall(m.cls(), m.bound(), a);
        }
        case Term::Kind::CApp: {
            require_dom(rule::AllE, m.cls());
            Formula f = child(0, m.fn(), sub);
            if (!f.is(Formula::Kind::Forall))
                fail(rule::AllE, "a quantified type, found " + to_string(f));
            if (!st_.derives(RelKind::Pre, f.bound(), m.cls()))
                fail(rule::AllE, rel(f.bound(), RelKind::Pre, m.cls()));
            return subst_cls(f.body(), ClsSubst{f.binder(), m.cls()});
        }
        }
        fail("?", "a known term former");
    }

    ContextState& st_;
    bool record_;
    std::vector<std::size_t> path_;
};

}  // namespace detail

inline TypingResult infer(const Context& g, const Term& m, bool record_derivation = false) {
    TypingResult r;
    ContextState st;
    for (const auto& item : g) {
        if (auto e = st.push(item)) {
            r.error = TypeError{rule::Wf, "a well-formed context: " + e->message(), st.items(), {}, std::nullopt,
                                std::nullopt};
            return r;
        }
    }
    try {
        detail::Checker c(st, record_derivation);
        r.type = c.infer(m, record_derivation ? &r.derivation : nullptr);
    } catch (const TypeCheckFailure& f) {
        r.error = f.error;
    }
    return r;
}

inline std::optional<TypeError> check(const Context& g, const Term& m, const Formula& a) {
    auto r = infer(g, m);
    if (!r.ok())
        return r.error;
    if (auto e = wf_formula(g, a))
        return TypeError{rule::Check, "a well-formed expected type: " + e->detail, g, {}, a, r.type};
    if (!alpha_eq(*r.type, a))
        return TypeError{rule::Check, "type " + to_string(a) + ", inferred " + to_string(*r.type), g, {}, a, r.type};
    return std::nullopt;
}

inline Formula infer_or_throw(const Context& g, const Term& m) {
    auto r = infer(g, m);
    if (!r.ok())
        throw TypeCheckFailure(*r.error);
    return *r.type;
}

// One-level η-expansion at the inferred type.
inline Term eta_expand(const Context& g, const Term& m) {
    Formula a = infer_or_throw(g, m);
    switch (a.kind()) {
    case Formula::Kind::Atom: throw AtomicType(a);
    case Formula::Kind::Imp: {
        std::string x = fresh_name("x");
        return Term::lam(x, fresh_classifier(Classifier("d")), a.lhs(), Term::app(m, Term::var(x)));
    }
    case Formula::Kind::Box: return Term::quo(fresh_classifier(Classifier("d")), a.bound(), Term::unq(pos(g), m));
    case Formula::Kind::Forall: {
        Classifier d = fresh_classifier(Classifier("d"));
        return Term::clam(d, a.bound(), Term::capp(m, d));
    }
    }
    return m;
}

inline void print_derivation(std::ostream& os, const Derivation& d, std::size_t indent = 0) {
    os << std::string(indent * 2, ' ') << '[' << d.rule << "] " << to_string(d.context) << (d.context.empty() ? "" : " ")
       << "|- " << d.term << " : " << d.type << '\n';
    for (const auto& p : d.premises)
        print_derivation(os, p, indent + 1);
}

using RelationDecider = std::function<bool(const Context&, RelKind, const Classifier&, const Classifier&)>;

// Replays a recorded derivation against the typing rules. Relational premises
// are decided by the supplied decider, so the relation engine can be swapped
// for an independent one. Returns a description of the first bad step.
inline std::optional<std::string> audit_derivation(const Derivation& d, const RelationDecider& decide) {
    const Context& g = d.context;
    const Classifier here = pos(g);
    const ClassifierSet dom = dom_c(g);
    auto bad = [&](const std::string& why) -> std::optional<std::string> {
        return d.rule + " at " + to_string(d.term) + ": " + why;
    };
    auto premises = [&](std::size_t n) { return d.premises.size() == n; };
    auto declared = [&](const Classifier& c) { return dom.count(c) != 0; };
    auto well_formed = [&](const Formula& f) {
        auto fc = free_classifiers(f);
        for (const auto& c : fc) {
            if (!declared(c))
                return false;
        }
        return true;
    };
    const Term& m = d.term;
    switch (m.kind()) {
    case Term::Kind::Var: {
        if (d.rule != rule::Var || !premises(0))
            return bad("shape");
        for (auto it = g.rbegin(); it != g.rend(); ++it) {
            if (it->is(ContextItem::Kind::Hyp) && it->var() == m.var_name()) {
                if (!(it->ann() == d.type))
                    return bad("type differs from the hypothesis");
                if (!decide(g, RelKind::Pre, it->cls(), here))
                    return bad("hypothesis classifier not below the position");
                return std::nullopt;
            }
        }
        return bad("no hypothesis");
    }
    case Term::Kind::Lam: {
        if (d.rule != rule::ImpI || !premises(1))
            return bad("shape");
        const auto& p = d.premises[0];
        if (!(p.context == extend(g, ContextItem::hyp(m.var_name(), m.cls(), m.ann()))) || !(p.term == m.body()))
            return bad("premise judgment");
        if (declared(m.cls()) || m.cls().is_initial())
            return bad("classifier not fresh");
        if (!well_formed(m.ann()))
            return bad("annotation not well-formed");
        if (!(d.type == Formula::imp(m.ann(), p.type)) || free_classifiers(p.type).count(m.cls()))
            return bad("conclusion type");
        break;
    }
    case Term::Kind::App: {
        if (d.rule != rule::ImpE || !premises(2))
            return bad("shape");
        const auto& f = d.premises[0];
        const auto& a = d.premises[1];
        if (!(f.context == g) || !(a.context == g) || !(f.term == m.fn()) || !(a.term == m.arg()))
            return bad("premise judgment");
        if (!f.type.is(Formula::Kind::Imp) || !alpha_eq(f.type.lhs(), a.type) || !(d.type == f.type.rhs()))
            return bad("types do not line up");
        break;
    }
    case Term::Kind::Quo: {
        if (d.rule != rule::BoxI || !premises(1))
            return bad("shape");
        const auto& p = d.premises[0];
        if (!(p.context == extend(g, ContextItem::open(m.cls(), m.bound()))) || !(p.term == m.body()))
            return bad("premise judgment");
        if (declared(m.cls()) || m.cls().is_initial() || !declared(m.bound()))
            return bad("binder not fresh or bound undeclared");
        if (!(d.type == Formula::box(m.bound(), p.type)) || free_classifiers(p.type).count(m.cls()))
            return bad("conclusion type");
        break;
    }
    case Term::Kind::Unq: {
        if (d.rule != rule::BoxE || !premises(1))
            return bad("shape");
        const auto& p = d.premises[0];
        if (!(p.context == extend(g, ContextItem::shut(m.cls()))) || !(p.term == m.body()))
            return bad("premise judgment");
        if (!declared(m.cls()) || !decide(g, RelKind::Mod, m.cls(), here))
            return bad("shut target not modally below the position");
        if (!p.type.is(Formula::Kind::Box) || !(d.type == p.type.body()))
            return bad("conclusion type");
        if (!decide(g, RelKind::Pre, p.type.bound(), here))
            return bad("box bound not below the position");
        break;
    }
    case Term::Kind::CLam: {
        if (d.rule != rule::AllI || !premises(1))
            return bad("shape");
        const auto& p = d.premises[0];
        if (!(p.context == extend(g, ContextItem::cls_decl(m.cls(), m.bound()))) || !(p.term == m.body()))
            return bad("premise judgment");
        if (declared(m.cls()) || m.cls().is_initial() || !declared(m.bound()))
            return bad("binder not fresh or bound undeclared");
        if (!(d.type == Formula::forall(m.cls(), m.bound(), p.type)))
            return bad("conclusion type");
        break;
    }
    case Term::Kind::CApp: {
        if (d.rule != rule::AllE || !premises(1))
            return bad("shape");
        const auto& p = d.premises[0];
        if (!(p.context == g) || !(p.term == m.fn()))
            return bad("premise judgment");
        if (!declared(m.cls()) || !p.type.is(Formula::Kind::Forall))
            return bad("argument undeclared or premise not quantified");
        if (!decide(g, RelKind::Pre, p.type.bound(), m.cls()))
            return bad("argument not above the bound");
        if (!alpha_eq(d.type, subst_cls(p.type.body(), ClsSubst{p.type.binder(), m.cls()})))
            return bad("conclusion type");
        break;
    }
    }
    for (const auto& p : d.premises) {
        if (auto e = audit_derivation(p, decide))
            return e;
    }
    return std::nullopt;
}

}  // namespace bml
