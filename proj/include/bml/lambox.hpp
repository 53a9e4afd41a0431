#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "bml/cs4.hpp"
#include "bml/lambox_syntax.hpp"
#include "bml/syntax.hpp"

namespace bml {

struct BoxTypeError {
    std::string rule;
    std::string obligation;

    std::string message() const { return rule + " requires " + obligation; }
};

struct BoxTypingResult {
    std::optional<BoxType> type;
    std::optional<BoxTypeError> error;

    bool ok() const { return type.has_value(); }
};

class BoxTypeFailure : public std::runtime_error {
public:
    explicit BoxTypeFailure(BoxTypeError e) : std::runtime_error(e.message()), error(std::move(e)) {}
    BoxTypeError error;
};

namespace detail {

inline BoxType box_infer(ContextStack& stack, const BoxTerm& m) {
    auto fail = [](const char* rule, std::string what) -> BoxTypeFailure {
        return BoxTypeFailure(BoxTypeError{rule, std::move(what)});
    };
    switch (m.kind()) {
    case BoxTerm::Kind::Var: {
        const BoxContext& here = stack.back();
        for (auto it = here.rbegin(); it != here.rend(); ++it)
            if (it->first == m.var_name())
                return it->second;
        throw fail("Var", m.var_name() + " in the current stage");
    }
    case BoxTerm::Kind::Lam: {
        stack.back().emplace_back(m.var_name(), m.ann());
        std::optional<BoxType> body;
        try {
            body = box_infer(stack, m.body());
        } catch (...) {
            stack.back().pop_back();
            throw;
        }
        stack.back().pop_back();
        return BoxType::imp(m.ann(), *body);
    }
    case BoxTerm::Kind::App: {
        BoxType f = box_infer(stack, m.fn());
        if (!f.is(BoxType::Kind::Imp))
            throw fail("->E", "an implication in function position, found " + to_string(f));
        BoxType a = box_infer(stack, m.arg());
        if (!(a == f.lhs()))
            throw fail("->E", "argument of type " + to_string(f.lhs()) + ", found " + to_string(a));
        return f.rhs();
    }
    case BoxTerm::Kind::Box: {
        stack.emplace_back();
        std::optional<BoxType> body;
        try {
            body = box_infer(stack, m.body());
        } catch (...) {
            stack.pop_back();
            throw;
        }
        stack.pop_back();
        return BoxType::box(*body);
    }
    case BoxTerm::Kind::Unbox: {
        std::size_t k = m.depth();
        if (k >= stack.size())
            throw fail("[]E", std::to_string(k) + " stages to drop below the current " + std::to_string(stack.size()));
        ContextStack lower(stack.begin(), stack.end() - static_cast<std::ptrdiff_t>(k));
        BoxType t = box_infer(lower, m.body());
        if (!t.is(BoxType::Kind::Box))
            throw fail("[]E", "a boxed type, found " + to_string(t));
        return t.body();
    }
    }
    throw fail("?", "a known term former");
}

}  // namespace detail

inline BoxTypingResult lambox_infer(ContextStack stack, const BoxTerm& m) {
    if (stack.empty())
        stack.emplace_back();
    try {
        return {detail::box_infer(stack, m), std::nullopt};
    } catch (const BoxTypeFailure& e) {
        return {std::nullopt, e.error};
    }
}

struct Translation {
    Context context;
    Term term;
};

namespace detail {

inline Term translate_term(const BoxTerm& m, std::vector<Classifier>& gs) {
    switch (m.kind()) {
    case BoxTerm::Kind::Var: return Term::var(m.var_name());
    case BoxTerm::Kind::Lam: {
        Classifier d = fresh_classifier(Classifier("d"));
        Classifier saved = gs.back();
        gs.back() = d;
        Term body = translate_term(m.body(), gs);
        gs.back() = saved;
        return Term::lam(m.var_name(), d, from_box(m.ann()), body);
    }
    case BoxTerm::Kind::App: {
        Term f = translate_term(m.fn(), gs);
        return Term::app(f, translate_term(m.arg(), gs));
    }
    case BoxTerm::Kind::Box: {
        Classifier d = fresh_classifier(Classifier("d"));
        gs.push_back(d);
        Term body = translate_term(m.body(), gs);
        gs.pop_back();
        return Term::quo(d, Classifier::initial(), body);
    }
    case BoxTerm::Kind::Unbox: {
        std::size_t k = m.depth();
        if (k >= gs.size())
            throw BoxTypeFailure(BoxTypeError{"[]E", "a classifier " + std::to_string(k) + " frames back"});
        std::vector<Classifier> lower(gs.begin(), gs.end() - static_cast<std::ptrdiff_t>(k));
        Classifier at = lower.back();
        return Term::unq(at, translate_term(m.body(), lower));
    }
    }
    return Term::var(m.var_name());
}

}  // namespace detail

// Builds the context and classifier vector stage by stage, then the term.
inline Translation translate(const ContextStack& stack, const BoxTerm& m) {
    if (auto r = lambox_infer(stack, m); !r.ok())
        throw BoxTypeFailure(*r.error);
    Context g;
    std::vector<Classifier> gs{Classifier::initial()};
    for (std::size_t i = 0; i < stack.size(); ++i) {
        if (i > 0) {
            Classifier d = fresh_classifier(Classifier("d"));
            g.push_back(ContextItem::open(d, Classifier::initial()));
            gs.push_back(d);
        }
        for (const auto& [x, a] : stack[i]) {
            Classifier d = fresh_classifier(Classifier("d"));
            g.push_back(ContextItem::hyp(x, d, from_box(a)));
            gs.back() = d;
        }
    }
    return {g, detail::translate_term(m, gs)};
}

}  // namespace bml
