#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "bml/context.hpp"
#include "bml/names.hpp"
#include "bml/relation.hpp"
#include "bml/syntax.hpp"

namespace bml {

using NamePair = std::pair<std::string, std::string>;

// Structures and models as written in model files: generator edges, not closures.
struct RawStructure {
    std::vector<std::string> domain;
    std::vector<NamePair> pre;
    std::vector<NamePair> mod;
    std::map<std::string, std::vector<std::string>> val;
};

struct RawModel {
    std::vector<std::string> worlds;
    std::vector<NamePair> order;
    std::map<std::string, RawStructure> structures;
};

struct Violation {
    enum class Code {
        UnknownElement, MissingRoot, NotPreorder, NotRootLeast, StabilityViolated, ValuationNotUpwardClosed,
        NoWorlds, UnknownWorld, MissingStructure, DomainShrank, PreShrank, ModShrank, ValuationShrank,
        RootChanged, NotLeftPersistent
    };
    Code code;
    std::string message;
};

inline const char* to_string(Violation::Code c) {
    switch (c) {
    case Violation::Code::UnknownElement: return "UnknownElement";
    case Violation::Code::MissingRoot: return "MissingRoot";
    case Violation::Code::NotPreorder: return "NotPreorder";
    case Violation::Code::NotRootLeast: return "NotRootLeast";
    case Violation::Code::StabilityViolated: return "StabilityViolated";
    case Violation::Code::ValuationNotUpwardClosed: return "ValuationNotUpwardClosed";
    case Violation::Code::NoWorlds: return "NoWorlds";
    case Violation::Code::UnknownWorld: return "UnknownWorld";
    case Violation::Code::MissingStructure: return "MissingStructure";
    case Violation::Code::DomainShrank: return "DomainShrank";
    case Violation::Code::PreShrank: return "PreShrank";
    case Violation::Code::ModShrank: return "ModShrank";
    case Violation::Code::ValuationShrank: return "ValuationShrank";
    case Violation::Code::RootChanged: return "RootChanged";
    case Violation::Code::NotLeftPersistent: return "NotLeftPersistent";
    }
    return "?";
}

class ModelError : public std::runtime_error {
public:
    explicit ModelError(std::vector<Violation> vs) : std::runtime_error(render(vs)), violations(std::move(vs)) {}
    std::vector<Violation> violations;

private:
    static std::string render(const std::vector<Violation>& vs) {
        std::string out = "invalid model:";
        for (const auto& v : vs)
            out += std::string("\n  ") + to_string(v.code) + ": " + v.message;
        return out;
    }
};

using Valuation = std::map<std::string, std::vector<char>>;

struct BmlStructure {
    std::vector<std::string> elements;
    std::size_t root = 0;
    Relation pre;
    Relation mod;
    Valuation val;

    std::optional<std::size_t> find(const std::string& name) const {
        for (std::size_t i = 0; i < elements.size(); ++i)
            if (elements[i] == name)
                return i;
        return std::nullopt;
    }
};

// A model over a shared element universe; each stage marks its own domain.
struct BmlModel {
    struct Stage {
        std::vector<char> domain;
        Relation pre;
        Relation mod;
        Valuation val;
    };

    std::vector<std::string> worlds;
    Relation order;
    std::vector<std::string> elements;
    std::size_t root = 0;
    std::vector<Stage> stages;

    std::optional<std::size_t> world(const std::string& name) const {
        for (std::size_t i = 0; i < worlds.size(); ++i)
            if (worlds[i] == name)
                return i;
        return std::nullopt;
    }
    std::optional<std::size_t> element(const std::string& name) const {
        for (std::size_t i = 0; i < elements.size(); ++i)
            if (elements[i] == name)
                return i;
        return std::nullopt;
    }
    std::set<std::string> atoms() const {
        std::set<std::string> out;
        for (const auto& s : stages)
            for (const auto& [p, _] : s.val)
                out.insert(p);
        return out;
    }
};

namespace detail {

inline bool holds(const Valuation& val, const std::string& atom, std::size_t e) {
    auto it = val.find(atom);
    return it != val.end() && it->second[e];
}

// Invariants of one structure, over the members of `domain`.
inline void stage_violations(const std::vector<std::string>& names, const std::vector<char>& domain,
                             std::size_t root, const Relation& pre, const Relation& mod, const Valuation& val,
                             const std::string& where, std::vector<Violation>& out) {
    auto add = [&](Violation::Code c, std::string msg) { out.push_back({c, where + msg}); };
    std::size_t n = names.size();
    for (const Relation* r : {&pre, &mod}) {
        const char* label = r == &pre ? "pre" : "mod";
        bool ok = true;
        for (std::size_t a = 0; a < n && ok; ++a) {
            if (domain[a] && !(*r)(a, a))
                ok = false;
            for (std::size_t b = 0; b < n && ok; ++b)
                if ((*r)(a, b) && (!domain[a] || !domain[b]))
                    ok = false;
        }
        if (!ok || !r->is_transitive())
            add(Violation::Code::NotPreorder, std::string(label) + " is not a preorder on the domain");
    }
    if (!domain[root]) {
        add(Violation::Code::MissingRoot, "root is not in the domain");
        return;
    }
    for (std::size_t d = 0; d < n; ++d)
        if (domain[d] && !pre(root, d))
            add(Violation::Code::NotRootLeast, "root is not below " + names[d]);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            if (pre(a, b) && !mod(a, b))
                add(Violation::Code::StabilityViolated, "(" + names[a] + ", " + names[b] + ") in pre but not mod");
    for (const auto& [p, set] : val) {
        for (std::size_t a = 0; a < n; ++a) {
            if (!set[a])
                continue;
            if (!domain[a])
                add(Violation::Code::UnknownElement, "valuation of " + p + " contains " + names[a]);
            for (std::size_t b = 0; b < n; ++b)
                if (pre(a, b) && !set[b])
                    add(Violation::Code::ValuationNotUpwardClosed,
                        p + " at (" + names[a] + ", " + names[b] + ")");
        }
    }
}

}  // namespace detail

inline std::vector<Violation> structure_violations(const BmlStructure& s) {
    std::vector<Violation> out;
    std::vector<char> all(s.elements.size(), 1);
    detail::stage_violations(s.elements, all, s.root, s.pre, s.mod, s.val, "", out);
    return out;
}

// Closes the generator edges (pre edges also count as mod edges) and checks
// the structure invariants. Throws ModelError listing every violation.
inline BmlStructure validate_structure(const RawStructure& raw, const std::string& where = "") {
    std::vector<Violation> out;
    BmlStructure s;
    s.elements = raw.domain;
    std::size_t n = s.elements.size();
    s.pre = Relation(n);
    s.mod = Relation(n);
    auto idx = [&](const std::string& name) -> std::optional<std::size_t> {
        auto i = s.find(name);
        if (!i)
            out.push_back({Violation::Code::UnknownElement, where + "unknown element " + name});
        return i;
    };
    auto root = s.find("!");
    if (!root) {
        out.push_back({Violation::Code::MissingRoot, where + "domain lacks \"!\""});
        throw ModelError(out);
    }
    s.root = *root;
    for (const auto& [a, b] : raw.pre) {
        auto ia = idx(a), ib = idx(b);
        if (ia && ib) {
            s.pre.set(*ia, *ib);
            s.mod.set(*ia, *ib);
        }
    }
    for (const auto& [a, b] : raw.mod) {
        auto ia = idx(a), ib = idx(b);
        if (ia && ib)
            s.mod.set(*ia, *ib);
    }
    s.pre.close_reflexive_transitive();
    s.mod.close_reflexive_transitive();
    for (const auto& [p, members] : raw.val) {
        std::vector<char> set(n, 0);
        for (const auto& m : members)
            if (auto i = idx(m))
                set[*i] = 1;
        s.val[p] = std::move(set);
    }
    std::vector<char> all(n, 1);
    detail::stage_violations(s.elements, all, s.root, s.pre, s.mod, s.val, where, out);
    if (!out.empty())
        throw ModelError(out);
    return s;
}

inline std::vector<Violation> model_violations(const BmlModel& m) {
    std::vector<Violation> out;
    std::size_t nw = m.worlds.size();
    if (nw == 0) {
        out.push_back({Violation::Code::NoWorlds, "model has no worlds"});
        return out;
    }
    if (!m.order.is_preorder())
        out.push_back({Violation::Code::NotPreorder, "world order is not a preorder"});
    for (std::size_t w = 0; w < nw; ++w) {
        const auto& s = m.stages[w];
        detail::stage_violations(m.elements, s.domain, m.root, s.pre, s.mod, s.val, "world " + m.worlds[w] + ": ",
                                 out);
    }
    std::size_t n = m.elements.size();
    for (std::size_t w = 0; w < nw; ++w) {
        for (std::size_t v = 0; v < nw; ++v) {
            if (w == v || !m.order(w, v))
                continue;
            const auto& a = m.stages[w];
            const auto& b = m.stages[v];
            std::string pair = "(" + m.worlds[w] + ", " + m.worlds[v] + ")";
            for (std::size_t e = 0; e < n; ++e)
                if (a.domain[e] && !b.domain[e]) {
                    out.push_back({Violation::Code::DomainShrank, pair + " drops " + m.elements[e]});
                    break;
                }
            if (!a.pre.subset_of(b.pre))
                out.push_back({Violation::Code::PreShrank, pair});
            if (!a.mod.subset_of(b.mod))
                out.push_back({Violation::Code::ModShrank, pair});
            for (const auto& [p, set] : a.val) {
                for (std::size_t e = 0; e < n; ++e)
                    if (set[e] && !detail::holds(b.val, p, e)) {
                        out.push_back({Violation::Code::ValuationShrank, pair + " for " + p});
                        break;
                    }
            }
        }
    }
    return out;
}

// Builds a model from per-world structures over one element universe.
// The order is given by generators and closed here. Roots are identified by name.
inline BmlModel assemble_model(std::vector<std::string> worlds, const std::vector<std::pair<std::size_t, std::size_t>>& order,
                               const std::vector<BmlStructure>& structures) {
    BmlModel m;
    m.worlds = std::move(worlds);
    m.order = Relation(m.worlds.size());
    for (auto [a, b] : order)
        m.order.set(a, b);
    m.order.close_reflexive_transitive();
    std::map<std::string, std::size_t> universe;
    for (const auto& s : structures)
        for (const auto& e : s.elements)
            if (!universe.count(e)) {
                universe.emplace(e, m.elements.size());
                m.elements.push_back(e);
            }
    std::size_t n = m.elements.size();
    std::vector<Violation> roots;
    for (std::size_t w = 0; w < structures.size(); ++w) {
        const auto& s = structures[w];
        BmlModel::Stage st{std::vector<char>(n, 0), Relation(n), Relation(n), {}};
        std::vector<std::size_t> g(s.elements.size());
        for (std::size_t i = 0; i < s.elements.size(); ++i) {
            g[i] = universe.at(s.elements[i]);
            st.domain[g[i]] = 1;
        }
        for (std::size_t a = 0; a < g.size(); ++a)
            for (std::size_t b = 0; b < g.size(); ++b) {
                if (s.pre(a, b))
                    st.pre.set(g[a], g[b]);
                if (s.mod(a, b))
                    st.mod.set(g[a], g[b]);
            }
        for (const auto& [p, set] : s.val) {
            std::vector<char> lifted(n, 0);
            for (std::size_t i = 0; i < g.size(); ++i)
                lifted[g[i]] = set[i];
            st.val[p] = std::move(lifted);
        }
        std::size_t r = g[s.root];
        if (w == 0)
            m.root = r;
        else if (r != m.root)
            roots.push_back({Violation::Code::RootChanged, "world " + m.worlds[w] + " has a different root"});
        m.stages.push_back(std::move(st));
    }
    if (!roots.empty())
        throw ModelError(roots);
    return m;
}

inline BmlModel validate_model(const RawModel& raw) {
    std::vector<Violation> out;
    if (raw.worlds.empty())
        throw ModelError({{Violation::Code::NoWorlds, "model has no worlds"}});
    std::vector<BmlStructure> structures;
    for (const auto& w : raw.worlds) {
        auto it = raw.structures.find(w);
        if (it == raw.structures.end()) {
            out.push_back({Violation::Code::MissingStructure, "no structure for world " + w});
            continue;
        }
        try {
            structures.push_back(validate_structure(it->second, "world " + w + ": "));
        } catch (const ModelError& e) {
            out.insert(out.end(), e.violations.begin(), e.violations.end());
        }
    }
    for (const auto& [w, _] : raw.structures)
        if (std::find(raw.worlds.begin(), raw.worlds.end(), w) == raw.worlds.end())
            out.push_back({Violation::Code::UnknownWorld, "structure for undeclared world " + w});
    std::vector<std::pair<std::size_t, std::size_t>> order;
    auto world_index = [&](const std::string& w) -> std::optional<std::size_t> {
        auto it = std::find(raw.worlds.begin(), raw.worlds.end(), w);
        if (it == raw.worlds.end()) {
            out.push_back({Violation::Code::UnknownWorld, "order mentions unknown world " + w});
            return std::nullopt;
        }
        return static_cast<std::size_t>(it - raw.worlds.begin());
    };
    for (const auto& [a, b] : raw.order) {
        auto ia = world_index(a), ib = world_index(b);
        if (ia && ib)
            order.emplace_back(*ia, *ib);
    }
    if (!out.empty())
        throw ModelError(out);
    BmlModel m = assemble_model(raw.worlds, order, structures);
    out = model_violations(m);
    if (!out.empty())
        throw ModelError(out);
    return m;
}

// Maps classifiers to element indices of the model universe. The initial
// classifier always denotes the root and need not be present.
using Assignment = std::map<Classifier, std::size_t>;

class UnassignedClassifier : public std::runtime_error {
public:
    explicit UnassignedClassifier(const Classifier& c)
        : std::runtime_error("no value assigned to classifier " + c.name()), classifier(c) {}
    Classifier classifier;
};

// Evaluates the two mutually recursive satisfaction relations with memoization.
// One evaluator is tied to one model.
class Evaluator {
public:
    explicit Evaluator(const BmlModel& m) : m_(m) {}

    const BmlModel& model() const { return m_; }

    std::size_t value(const Assignment& rho, const Classifier& c) const {
        if (c.is_initial())
            return m_.root;
        auto it = rho.find(c);
        if (it == rho.end())
            throw UnassignedClassifier(c);
        return it->second;
    }

    // Satisfaction across all later worlds.
    bool forces(std::size_t w, std::size_t d, const Assignment& rho, const Formula& a) {
        auto key = make_key(0, a, w, d, rho);
        if (auto it = memo_.find(key); it != memo_.end())
            return it->second;
        bool r = true;
        for (std::size_t v = 0; v < m_.worlds.size() && r; ++v)
            if (m_.order(w, v))
                r = local(v, d, rho, a);
        memo_.emplace(std::move(key), r);
        return r;
    }

    // Satisfaction at world w alone.
    bool local(std::size_t w, std::size_t d, const Assignment& rho, const Formula& a) {
        auto key = make_key(1, a, w, d, rho);
        if (auto it = memo_.find(key); it != memo_.end())
            return it->second;
        bool r = compute(w, d, rho, a);
        memo_.emplace(std::move(key), r);
        return r;
    }

private:
    using Key = std::tuple<int, const void*, std::size_t, std::size_t, std::vector<std::size_t>>;

    const std::vector<Classifier>& fc(const Formula& a) {
        auto it = fc_.find(a.id());
        if (it == fc_.end()) {
            auto set = free_classifiers(a);
            set.erase(Classifier::initial());
            it = fc_.emplace(a.id(), std::vector<Classifier>(set.begin(), set.end())).first;
            keep_alive_.push_back(a);
        }
        return it->second;
    }

    Key make_key(int which, const Formula& a, std::size_t w, std::size_t d, const Assignment& rho) {
        std::vector<std::size_t> vals;
        for (const auto& c : fc(a))
            vals.push_back(value(rho, c));
        return Key{which, a.id(), w, d, std::move(vals)};
    }

    bool compute(std::size_t w, std::size_t d, const Assignment& rho, const Formula& a) {
        const auto& st = m_.stages[w];
        std::size_t n = m_.elements.size();
        switch (a.kind()) {
        case Formula::Kind::Atom: return detail::holds(st.val, a.atom_name(), d);
        case Formula::Kind::Imp:
            for (std::size_t e = 0; e < n; ++e)
                if (st.domain[e] && st.pre(d, e) && forces(w, e, rho, a.lhs()) && !forces(w, e, rho, a.rhs()))
                    return false;
            return true;
        case Formula::Kind::Box: {
            std::size_t g = value(rho, a.bound());
            for (std::size_t e = 0; e < n; ++e)
                if (st.domain[e] && st.mod(d, e) && st.pre(g, e) && !forces(w, e, rho, a.body()))
                    return false;
            return true;
        }
        case Formula::Kind::Forall: {
            std::size_t g = value(rho, a.bound());
            Assignment ext = rho;
            for (std::size_t e = 0; e < n; ++e) {
                if (!st.domain[e] || !st.pre(g, e))
                    continue;
                ext[a.binder()] = e;
                if (!forces(w, d, ext, a.body()))
                    return false;
            }
            return true;
        }
        }
        return false;
    }

    const BmlModel& m_;
    std::map<Key, bool> memo_;
    std::map<const void*, std::vector<Classifier>> fc_;
    std::vector<Formula> keep_alive_;
};

inline bool satisfies(const BmlModel& m, std::size_t w, std::size_t d, const Assignment& rho, const Formula& a) {
    Evaluator ev(m);
    return ev.forces(w, d, rho, a);
}

namespace detail {

// Condition contributed by one context item, given the position before it.
inline bool item_holds(Evaluator& ev, std::size_t w, const Assignment& rho, const Classifier& here,
                       const ContextItem& item) {
    const auto& st = ev.model().stages[w];
    switch (item.kind()) {
    case ContextItem::Kind::Hyp: {
        std::size_t g = ev.value(rho, item.cls());
        return st.pre(ev.value(rho, here), g) && ev.forces(w, g, rho, item.ann());
    }
    case ContextItem::Kind::Open: {
        std::size_t g = ev.value(rho, item.cls());
        return st.mod(ev.value(rho, here), g) && st.pre(ev.value(rho, item.bound()), g);
    }
    case ContextItem::Kind::Shut: return true;
    case ContextItem::Kind::Cls: return st.pre(ev.value(rho, item.bound()), ev.value(rho, item.cls()));
    }
    return false;
}

inline Classifier pos_after(const Classifier& here, const ContextItem& item) {
    return item.is(ContextItem::Kind::Cls) ? here : item.cls();
}

}  // namespace detail

inline bool satisfies_context(Evaluator& ev, std::size_t w, const Assignment& rho, const Context& g) {
    Classifier here = Classifier::initial();
    for (const auto& item : g) {
        if (!detail::item_holds(ev, w, rho, here, item))
            return false;
        here = detail::pos_after(here, item);
    }
    return true;
}

inline bool satisfies_context(const BmlModel& m, std::size_t w, const Assignment& rho, const Context& g) {
    Evaluator ev(m);
    return satisfies_context(ev, w, rho, g);
}

// Visits every (world, assignment) of a model under which the context holds.
// Assignments range over the world's domain for the classifiers the context
// introduces plus `extra`; they are built item by item so failing prefixes
// are pruned. The visitor returns false to stop.
inline bool for_each_context_model(Evaluator& ev, const Context& g, const std::vector<Classifier>& extra,
                                   const std::function<bool(std::size_t, const Assignment&)>& visit) {
    const BmlModel& m = ev.model();
    std::size_t n = m.elements.size();
    for (std::size_t w = 0; w < m.worlds.size(); ++w) {
        const auto& dom = m.stages[w].domain;
        Assignment rho;
        std::function<bool(std::size_t)> extras = [&](std::size_t k) -> bool {
            if (k == extra.size())
                return visit(w, rho);
            if (rho.count(extra[k]) || extra[k].is_initial())
                return extras(k + 1);
            for (std::size_t e = 0; e < n; ++e) {
                if (!dom[e])
                    continue;
                rho[extra[k]] = e;
                if (!extras(k + 1))
                    return false;
            }
            rho.erase(extra[k]);
            return true;
        };
        std::function<bool(std::size_t, const Classifier&)> items = [&](std::size_t i, const Classifier& here) -> bool {
            if (i == g.size())
                return extras(0);
            const auto& item = g[i];
            Classifier next = detail::pos_after(here, item);
            if (!item.introduces_classifier()) {
                return !detail::item_holds(ev, w, rho, here, item) || items(i + 1, next);
            }
            for (std::size_t e = 0; e < n; ++e) {
                if (!dom[e])
                    continue;
                rho[item.cls()] = e;
                if (detail::item_holds(ev, w, rho, here, item) && !items(i + 1, next))
                    return false;
            }
            rho.erase(item.cls());
            return true;
        };
        if (!items(0, Classifier::initial()))
            return false;
    }
    return true;
}

struct Counterexample {
    std::size_t model = 0;
    std::string world;
    std::map<std::string, std::string> assignment;  // classifier name to element name
};

inline Counterexample describe_counterexample(const BmlModel& m, std::size_t index, std::size_t w,
                                              const Assignment& rho) {
    Counterexample c{index, m.worlds[w], {}};
    for (const auto& [k, e] : rho)
        c.assignment[k.name()] = m.elements[e];
    return c;
}

// Semantic consequence restricted to the given models; nullopt means it holds.
inline std::optional<Counterexample> consequence_on(const std::vector<BmlModel>& models, const Context& g,
                                                    const Formula& a) {
    auto fcs = free_classifiers(a);
    std::vector<Classifier> extra(fcs.begin(), fcs.end());
    Classifier at = pos(g);
    std::optional<Counterexample> found;
    for (std::size_t i = 0; i < models.size() && !found; ++i) {
        Evaluator ev(models[i]);
        for_each_context_model(ev, g, extra, [&](std::size_t w, const Assignment& rho) {
            if (ev.forces(w, ev.value(rho, at), rho, a))
                return true;
            found = describe_counterexample(models[i], i, w, rho);
            return false;
        });
    }
    return found;
}

// The relational counterpart: does rho(a) relate to rho(b) wherever the context holds?
inline std::optional<Counterexample> relation_consequence_on(const std::vector<BmlModel>& models, const Context& g,
                                                             RelKind kind, const Classifier& a, const Classifier& b) {
    std::optional<Counterexample> found;
    for (std::size_t i = 0; i < models.size() && !found; ++i) {
        Evaluator ev(models[i]);
        for_each_context_model(ev, g, {a, b}, [&](std::size_t w, const Assignment& rho) {
            const auto& st = models[i].stages[w];
            const Relation& r = kind == RelKind::Pre ? st.pre : st.mod;
            if (r(ev.value(rho, a), ev.value(rho, b)))
                return true;
            found = describe_counterexample(models[i], i, w, rho);
            return false;
        });
    }
    return found;
}

}  // namespace bml
