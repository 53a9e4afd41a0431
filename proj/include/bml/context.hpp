#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "bml/names.hpp"
#include "bml/syntax.hpp"

namespace bml {

enum class RelKind { Pre, Mod };

inline const char* rel_symbol(RelKind k) { return k == RelKind::Pre ? "<=" : "[="; }

class UnknownClassifier : public std::runtime_error {
public:
    explicit UnknownClassifier(Classifier c)
        : std::runtime_error("unknown classifier " + c.name()), classifier(std::move(c)) {}
    Classifier classifier;
};

inline Classifier pos(const Context& g) {
    for (auto it = g.rbegin(); it != g.rend(); ++it) {
        if (!it->is(ContextItem::Kind::Cls))
            return it->cls();
    }
    return Classifier::initial();
}

inline ClassifierSet dom_c(const Context& g) {
    ClassifierSet out{Classifier::initial()};
    for (const auto& item : g) {
        if (item.introduces_classifier())
            out.insert(item.cls());
    }
    return out;
}

// Generators of the two relations, with reachability answered on demand.
// Supports rollback so a checker can extend and retract a context cheaply.
class RelationGraph {
public:
    using Edge = std::pair<Classifier, Classifier>;

    RelationGraph() { add_node(Classifier::initial()); }

    struct Mark {
        std::size_t nodes, pre, mod;
    };
    Mark mark() const { return {nodes_.size(), pre_.size(), mod_.size()}; }
    void rollback(Mark m) {
        while (nodes_.size() > m.nodes) {
            index_.erase(nodes_.back());
            nodes_.pop_back();
        }
        pre_.resize(m.pre);
        mod_.resize(m.mod);
        invalidate();
    }

    bool has_node(const Classifier& c) const { return index_.count(c) != 0; }
    const std::vector<Classifier>& nodes() const { return nodes_; }

    void add_node(const Classifier& c) {
        if (has_node(c))
            return;
        index_.emplace(c, nodes_.size());
        nodes_.push_back(c);
        invalidate();
    }
    void add_pre_edge(const Classifier& a, const Classifier& b) {
        pre_.emplace_back(index_of(a), index_of(b));
        invalidate();
    }
    void add_mod_edge(const Classifier& a, const Classifier& b) {
        mod_.emplace_back(index_of(a), index_of(b));
        invalidate();
    }

    std::vector<Edge> pre_edges() const { return named(pre_); }
    std::vector<Edge> mod_edges() const { return named(mod_); }

    bool derives(RelKind kind, const Classifier& a, const Classifier& b) const {
        std::size_t ia = index_of(a), ib = index_of(b);
        auto key = std::make_pair(kind == RelKind::Pre ? 0 : 1, ia);
        auto it = memo_.find(key);
        if (it == memo_.end())
            it = memo_.emplace(key, reach_from(kind, ia)).first;
        return it->second[ib] != 0;
    }

private:
    std::size_t index_of(const Classifier& c) const {
        auto it = index_.find(c);
        if (it == index_.end())
            throw UnknownClassifier(c);
        return it->second;
    }

    std::vector<Edge> named(const std::vector<std::pair<std::size_t, std::size_t>>& es) const {
        std::vector<Edge> out;
        for (auto [a, b] : es)
            out.emplace_back(nodes_[a], nodes_[b]);
        return out;
    }

    void invalidate() { memo_.clear(); }

    std::vector<char> reach_from(RelKind kind, std::size_t src) const {
        std::vector<std::vector<std::size_t>> adj(nodes_.size());
        for (auto [a, b] : pre_)
            adj[a].push_back(b);
        if (kind == RelKind::Mod) {
            for (auto [a, b] : mod_)
                adj[a].push_back(b);
        }
        std::vector<char> seen(nodes_.size(), 0);
        std::vector<std::size_t> stack{src};
        seen[src] = 1;
        while (!stack.empty()) {
            auto n = stack.back();
            stack.pop_back();
            for (auto m : adj[n]) {
                if (!seen[m]) {
                    seen[m] = 1;
                    stack.push_back(m);
                }
            }
        }
        return seen;
    }

    std::vector<Classifier> nodes_;
    std::map<Classifier, std::size_t> index_;
    std::vector<std::pair<std::size_t, std::size_t>> pre_, mod_;
    mutable std::map<std::pair<int, std::size_t>, std::vector<char>> memo_;
};

struct WfError {
    enum class Code { DuplicateClassifier, UnknownClassifier, IllFormedAnnotation, ShutNotBelow };

    Code code;
    std::size_t item_index = 0;       // offending context item
    Classifier subject;               // offending classifier
    std::vector<std::size_t> path;    // into the annotation formula, when relevant
    std::string detail;

    std::string message() const {
        std::string what;
        switch (code) {
        case Code::DuplicateClassifier: what = "DuplicateClassifier"; break;
        case Code::UnknownClassifier: what = "UnknownClassifier"; break;
        case Code::IllFormedAnnotation: what = "IllFormedAnnotation"; break;
        case Code::ShutNotBelow: what = "ShutNotBelow"; break;
        }
        std::string out = what + "(" + subject.name() + ") at item " + std::to_string(item_index);
        if (!detail.empty())
            out += ": " + detail;
        return out;
    }
};

inline const char* to_string(WfError::Code c) {
    switch (c) {
    case WfError::Code::DuplicateClassifier: return "DuplicateClassifier";
    case WfError::Code::UnknownClassifier: return "UnknownClassifier";
    case WfError::Code::IllFormedAnnotation: return "IllFormedAnnotation";
    case WfError::Code::ShutNotBelow: return "ShutNotBelow";
    }
    return "?";
}

namespace detail {

inline std::optional<WfError> scope_check(const Formula& f, const std::set<Classifier>& bound_here,
                                          const RelationGraph& g, std::vector<std::size_t>& path) {
    auto in_scope = [&](const Classifier& c) { return bound_here.count(c) || g.has_node(c); };
    auto unknown = [&](const Classifier& c) {
        WfError e{WfError::Code::UnknownClassifier, 0, c, path, {}};
        e.detail = "classifier " + c.name() + " is not in scope";
        return e;
    };
    switch (f.kind()) {
    case Formula::Kind::Atom: return std::nullopt;
    case Formula::Kind::Imp:
        for (std::size_t i = 0; i < 2; ++i) {
            path.push_back(i);
            auto e = scope_check(i == 0 ? f.lhs() : f.rhs(), bound_here, g, path);
            path.pop_back();
            if (e)
                return e;
        }
        return std::nullopt;
    case Formula::Kind::Box: {
        if (!in_scope(f.bound()))
            return unknown(f.bound());
        path.push_back(0);
        auto e = scope_check(f.body(), bound_here, g, path);
        path.pop_back();
        return e;
    }
    case Formula::Kind::Forall: {
        if (!in_scope(f.bound()))
            return unknown(f.bound());
        auto inner = bound_here;
        inner.insert(f.binder());
        path.push_back(0);
        auto e = scope_check(f.body(), inner, g, path);
        path.pop_back();
        return e;
    }
    }
    return std::nullopt;
}

}  // namespace detail

// A context together with its relation graph, position and domain, extended
// one item at a time with the well-formedness check of that item.
class ContextState {
public:
    ContextState() = default;

    const Context& items() const { return items_; }
    const Classifier& pos() const { return positions_.empty() ? initial_ : positions_.back(); }
    bool in_dom(const Classifier& c) const { return graph_.has_node(c); }
    const RelationGraph& graph() const { return graph_; }

    bool derives(RelKind kind, const Classifier& a, const Classifier& b) const { return graph_.derives(kind, a, b); }

    std::optional<WfError> check_formula(const Formula& f) const {
        std::vector<std::size_t> path;
        auto e = detail::scope_check(f, {}, graph_, path);
        if (e)
            e->item_index = items_.size();
        return e;
    }

    // Checks the item against the current prefix and appends it on success.
    std::optional<WfError> push(const ContextItem& item) {
        std::size_t index = items_.size();
        auto fail = [&](WfError::Code code, const Classifier& c, std::string detail) {
            return WfError{code, index, c, {}, std::move(detail)};
        };
        const Classifier here = pos();
        switch (item.kind()) {
        case ContextItem::Kind::Hyp:
            if (in_dom(item.cls()))
                return fail(WfError::Code::DuplicateClassifier, item.cls(), "classifier is already declared");
            if (auto e = check_formula(item.ann())) {
                auto out = fail(WfError::Code::IllFormedAnnotation, e->subject, e->detail);
                out.path = e->path;
                return out;
            }
            break;
        case ContextItem::Kind::Open:
        case ContextItem::Kind::Cls:
            if (in_dom(item.cls()))
                return fail(WfError::Code::DuplicateClassifier, item.cls(), "classifier is already declared");
            if (!in_dom(item.bound()))
                return fail(WfError::Code::UnknownClassifier, item.bound(), "bound is not declared");
            break;
        case ContextItem::Kind::Shut:
            if (!in_dom(item.cls()))
                return fail(WfError::Code::UnknownClassifier, item.cls(), "shut target is not declared");
            if (!derives(RelKind::Mod, item.cls(), here))
                return fail(WfError::Code::ShutNotBelow, item.cls(),
                            "required " + item.cls().name() + " [= " + here.name());
            break;
        }
        apply(item, here);
        return std::nullopt;
    }

    void pop() {
        marks_.pop_back();
        graph_.rollback(marks_.empty() ? base_mark() : marks_.back());
        items_.pop_back();
        positions_.pop_back();
    }

    // Appends without checking. Used to build graphs of contexts that are
    // assumed (or known) well-formed; references must still be declared.
    void push_unchecked(const ContextItem& item) { apply(item, pos()); }

private:
    static RelationGraph::Mark base_mark() { return {1, 0, 0}; }

    void apply(const ContextItem& item, const Classifier& here) {
        switch (item.kind()) {
        case ContextItem::Kind::Hyp:
            graph_.add_node(item.cls());
            graph_.add_pre_edge(here, item.cls());
            break;
        case ContextItem::Kind::Open:
            graph_.add_node(item.cls());
            graph_.add_pre_edge(item.bound(), item.cls());
            graph_.add_mod_edge(here, item.cls());
            break;
        case ContextItem::Kind::Cls:
            graph_.add_node(item.cls());
            graph_.add_pre_edge(item.bound(), item.cls());
            break;
        case ContextItem::Kind::Shut:
            if (!graph_.has_node(item.cls()))
                throw UnknownClassifier(item.cls());
            break;
        }
        items_.push_back(item);
        positions_.push_back(item.is(ContextItem::Kind::Cls) ? here : item.cls());
        marks_.push_back(graph_.mark());
    }

    Context items_;
    RelationGraph graph_;
    std::vector<Classifier> positions_;
    std::vector<RelationGraph::Mark> marks_;
    Classifier initial_;
};

// Throws UnknownClassifier when an item refers to an undeclared classifier.
inline ContextState state_of(const Context& g) {
    ContextState st;
    for (const auto& item : g)
        st.push_unchecked(item);
    return st;
}

inline RelationGraph build_graph(const Context& g) { return state_of(g).graph(); }

inline bool derives(const Context& g, RelKind kind, const Classifier& a, const Classifier& b) {
    return build_graph(g).derives(kind, a, b);
}

inline std::optional<WfError> wf_context(const Context& g) {
    ContextState st;
    for (const auto& item : g) {
        if (auto e = st.push(item))
            return e;
    }
    return std::nullopt;
}

inline std::optional<WfError> wf_formula(const Context& g, const Formula& f) {
    return state_of(g).check_formula(f);
}

}  // namespace bml
