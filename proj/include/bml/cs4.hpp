#pragma once

#include <map>
#include <set>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "bml/kripke.hpp"
#include "bml/lambox_syntax.hpp"
#include "bml/relation.hpp"
#include "bml/syntax.hpp"

namespace bml {

// Birelational model: intuitionistic preorder `pre`, modal preorder `R`.
struct CS4Model {
    std::vector<std::string> worlds;
    Relation pre;
    Relation R;
    Valuation val;

    std::optional<std::size_t> world(const std::string& name) const {
        for (std::size_t i = 0; i < worlds.size(); ++i)
            if (worlds[i] == name)
                return i;
        return std::nullopt;
    }
};

inline std::vector<Violation> cs4_violations(const CS4Model& m) {
    std::vector<Violation> out;
    if (m.worlds.empty())
        out.push_back({Violation::Code::NoWorlds, "model has no worlds"});
    if (!m.pre.is_preorder())
        out.push_back({Violation::Code::NotPreorder, "pre is not a preorder"});
    if (!m.R.is_preorder())
        out.push_back({Violation::Code::NotPreorder, "R is not a preorder"});
    if (!m.R.compose(m.pre).subset_of(m.pre.compose(m.R)))
        out.push_back({Violation::Code::NotLeftPersistent, "R;pre is not contained in pre;R"});
    std::size_t n = m.worlds.size();
    for (const auto& [p, set] : m.val)
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b)
                if (set[a] && m.pre(a, b) && !set[b])
                    out.push_back({Violation::Code::ValuationNotUpwardClosed,
                                   p + " at (" + m.worlds[a] + ", " + m.worlds[b] + ")"});
    return out;
}

inline bool is_stable(const CS4Model& m) { return m.pre.subset_of(m.R); }

class CS4Evaluator {
public:
    explicit CS4Evaluator(const CS4Model& m) : m_(m) {}

    bool satisfies(std::size_t w, const BoxType& a) {
        auto key = std::make_pair(a.id(), w);
        if (auto it = memo_.find(key); it != memo_.end())
            return it->second;
        if (!seen_.count(a.id())) {
            seen_.emplace(a.id());
            keep_alive_.push_back(a);
        }
        bool r = compute(w, a);
        memo_.emplace(key, r);
        return r;
    }

private:
    bool compute(std::size_t w, const BoxType& a) {
        std::size_t n = m_.worlds.size();
        switch (a.kind()) {
        case BoxType::Kind::Atom: return detail::holds(m_.val, a.atom_name(), w);
        case BoxType::Kind::Imp:
            for (std::size_t v = 0; v < n; ++v)
                if (m_.pre(w, v) && satisfies(v, a.lhs()) && !satisfies(v, a.rhs()))
                    return false;
            return true;
        case BoxType::Kind::Box:
            for (std::size_t v = 0; v < n; ++v) {
                if (!m_.pre(w, v))
                    continue;
                for (std::size_t u = 0; u < n; ++u)
                    if (m_.R(v, u) && !satisfies(u, a.body()))
                        return false;
            }
            return true;
        }
        return false;
    }

    const CS4Model& m_;
    std::map<std::pair<const void*, std::size_t>, bool> memo_;
    std::set<const void*> seen_;
    std::vector<BoxType> keep_alive_;
};

inline bool cs4_satisfies(const CS4Model& m, std::size_t w, const BoxType& a) {
    CS4Evaluator ev(m);
    return ev.satisfies(w, a);
}

// R becomes the closure of pre;R.
inline CS4Model stabilize(const CS4Model& m) {
    CS4Model out = m;
    out.R = m.pre.compose(m.R).closed();
    return out;
}

// Adds a root "!" below every world in both relations. "!" satisfies p
// exactly when every old world does. Element 0 of the result is the root.
inline BmlStructure root_extend(const CS4Model& m) {
    std::size_t n = m.worlds.size() + 1;
    BmlStructure s;
    s.elements.push_back("!");
    s.elements.insert(s.elements.end(), m.worlds.begin(), m.worlds.end());
    s.root = 0;
    s.pre = Relation(n);
    s.mod = Relation(n);
    for (std::size_t b = 0; b < n; ++b) {
        s.pre.set(0, b);
        s.mod.set(0, b);
    }
    for (std::size_t a = 1; a < n; ++a)
        for (std::size_t b = 1; b < n; ++b) {
            s.pre.set(a, b, m.pre(a - 1, b - 1));
            s.mod.set(a, b, m.R(a - 1, b - 1));
        }
    for (const auto& [p, set] : m.val) {
        std::vector<char> lifted(n, 0);
        bool everywhere = true;
        for (std::size_t a = 1; a < n; ++a) {
            lifted[a] = set[a - 1];
            everywhere = everywhere && set[a - 1];
        }
        lifted[0] = everywhere ? 1 : 0;
        s.val[p] = std::move(lifted);
    }
    return s;
}

inline BmlModel one_point(const BmlStructure& s) { return assemble_model({"*"}, {}, {s}); }

// Worlds of the flattened model are the pairs (w, d) with d in the domain of
// w, listed world by world.
struct Flattened {
    CS4Model model;
    std::vector<std::pair<std::size_t, std::size_t>> origin;

    std::optional<std::size_t> index(std::size_t w, std::size_t d) const {
        for (std::size_t i = 0; i < origin.size(); ++i)
            if (origin[i] == std::make_pair(w, d))
                return i;
        return std::nullopt;
    }
};

inline Flattened flatten(const BmlModel& m) {
    Flattened f;
    for (std::size_t w = 0; w < m.worlds.size(); ++w)
        for (std::size_t d = 0; d < m.elements.size(); ++d)
            if (m.stages[w].domain[d]) {
                f.origin.emplace_back(w, d);
                f.model.worlds.push_back("(" + m.worlds[w] + "," + m.elements[d] + ")");
            }
    std::size_t n = f.origin.size();
    f.model.pre = Relation(n);
    f.model.R = Relation(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto [w, d] = f.origin[i];
        for (std::size_t j = 0; j < n; ++j) {
            auto [w2, d2] = f.origin[j];
            if (m.order(w, w2) && m.stages[w2].pre(d, d2))
                f.model.pre.set(i, j);
            if (w == w2 && m.stages[w].mod(d, d2))
                f.model.R.set(i, j);
        }
    }
    for (const auto& p : m.atoms()) {
        std::vector<char> set(n, 0);
        for (std::size_t i = 0; i < n; ++i)
            set[i] = detail::holds(m.stages[f.origin[i].first].val, p, f.origin[i].second);
        f.model.val[p] = std::move(set);
    }
    return f;
}

class NotInFragment : public std::runtime_error {
public:
    explicit NotInFragment(std::vector<std::size_t> path)
        : std::runtime_error("formula leaves the initial-box fragment at path " + render(path)), path(std::move(path)) {}
    std::vector<std::size_t> path;

private:
    static std::string render(const std::vector<std::size_t>& p) {
        std::string out = p.empty() ? "root" : "";
        for (std::size_t i = 0; i < p.size(); ++i)
            out += (i ? "." : "") + std::to_string(p[i]);
        return out;
    }
};

namespace detail {

inline BoxType to_box(const Formula& a, std::vector<std::size_t>& path) {
    switch (a.kind()) {
    case Formula::Kind::Atom: return BoxType::atom(a.atom_name());
    case Formula::Kind::Imp: {
        path.push_back(0);
        BoxType l = to_box(a.lhs(), path);
        path.back() = 1;
        BoxType r = to_box(a.rhs(), path);
        path.pop_back();
        return BoxType::imp(l, r);
    }
    case Formula::Kind::Box: {
        if (!a.bound().is_initial())
            throw NotInFragment(path);
        path.push_back(0);
        BoxType b = to_box(a.body(), path);
        path.pop_back();
        return BoxType::box(b);
    }
    case Formula::Kind::Forall: throw NotInFragment(path);
    }
    throw NotInFragment(path);
}

}  // namespace detail

inline BoxType to_box(const Formula& a) {
    std::vector<std::size_t> path;
    return detail::to_box(a, path);
}

inline Formula from_box(const BoxType& a) {
    switch (a.kind()) {
    case BoxType::Kind::Atom: return Formula::atom(a.atom_name());
    case BoxType::Kind::Imp: return Formula::imp(from_box(a.lhs()), from_box(a.rhs()));
    case BoxType::Kind::Box: return Formula::box(Classifier::initial(), from_box(a.body()));
    }
    return Formula::atom(a.atom_name());
}

}  // namespace bml
