#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "bml/cs4.hpp"
#include "bml/kripke.hpp"

namespace bml {

class ModelFormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline std::vector<NamePair> read_pairs(const nlohmann::json& j, const std::string& what) {
    std::vector<NamePair> out;
    if (j.is_null())
        return out;
    if (!j.is_array())
        throw ModelFormatError(what + " must be a list of pairs");
    for (const auto& p : j) {
        if (!p.is_array() || p.size() != 2 || !p[0].is_string() || !p[1].is_string())
            throw ModelFormatError(what + " entries must be [a, b] string pairs");
        out.emplace_back(p[0].get<std::string>(), p[1].get<std::string>());
    }
    return out;
}

inline std::vector<std::string> read_names(const nlohmann::json& j, const std::string& what) {
    if (!j.is_array())
        throw ModelFormatError(what + " must be a list of names");
    std::vector<std::string> out;
    for (const auto& x : j) {
        if (!x.is_string())
            throw ModelFormatError(what + " must contain strings");
        out.push_back(x.get<std::string>());
    }
    return out;
}

inline std::map<std::string, std::vector<std::string>> read_val(const nlohmann::json& j, const std::string& what) {
    std::map<std::string, std::vector<std::string>> out;
    if (j.is_null())
        return out;
    if (!j.is_object())
        throw ModelFormatError(what + " must map atoms to element lists");
    for (const auto& [p, members] : j.items())
        out[p] = read_names(members, what + "." + p);
    return out;
}

inline nlohmann::json parse_json(const std::string& text) {
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ModelFormatError(e.what());
    }
}

}  // namespace detail

// {"worlds": [...], "order": [[w, v]], "structures": {w: {"domain", "pre", "mod", "val"}}}
inline RawModel read_raw_model(const std::string& text) {
    auto j = detail::parse_json(text);
    if (!j.is_object() || !j.contains("worlds") || !j.contains("structures"))
        throw ModelFormatError("model needs \"worlds\" and \"structures\"");
    RawModel m;
    m.worlds = detail::read_names(j["worlds"], "worlds");
    m.order = detail::read_pairs(j.value("order", nlohmann::json()), "order");
    if (!j["structures"].is_object())
        throw ModelFormatError("structures must be an object");
    for (const auto& [w, s] : j["structures"].items()) {
        if (!s.is_object() || !s.contains("domain"))
            throw ModelFormatError("structure " + w + " needs a domain");
        RawStructure r;
        r.domain = detail::read_names(s["domain"], w + ".domain");
        r.pre = detail::read_pairs(s.value("pre", nlohmann::json()), w + ".pre");
        r.mod = detail::read_pairs(s.value("mod", nlohmann::json()), w + ".mod");
        r.val = detail::read_val(s.value("val", nlohmann::json()), w + ".val");
        m.structures.emplace(w, std::move(r));
    }
    return m;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Writes closed relations as edge lists; reading the result back gives the same model.
inline nlohmann::json to_json(const BmlModel& m) {
    nlohmann::json j;
    j["worlds"] = m.worlds;
    j["order"] = nlohmann::json::array();
    for (std::size_t a = 0; a < m.worlds.size(); ++a)
        for (std::size_t b = 0; b < m.worlds.size(); ++b)
            if (a != b && m.order(a, b))
                j["order"].push_back({m.worlds[a], m.worlds[b]});
    j["structures"] = nlohmann::json::object();
    std::size_t n = m.elements.size();
    for (std::size_t w = 0; w < m.worlds.size(); ++w) {
        const auto& st = m.stages[w];
        nlohmann::json s;
        s["domain"] = nlohmann::json::array();
        for (std::size_t e = 0; e < n; ++e)
            if (st.domain[e])
                s["domain"].push_back(m.elements[e]);
        s["pre"] = nlohmann::json::array();
        s["mod"] = nlohmann::json::array();
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b) {
                if (a == b)
                    continue;
                if (st.pre(a, b))
                    s["pre"].push_back({m.elements[a], m.elements[b]});
                if (st.mod(a, b) && !st.pre(a, b))
                    s["mod"].push_back({m.elements[a], m.elements[b]});
            }
        s["val"] = nlohmann::json::object();
        for (const auto& [p, set] : st.val) {
            auto members = nlohmann::json::array();
            for (std::size_t e = 0; e < n; ++e)
                if (set[e] && st.domain[e])
                    members.push_back(m.elements[e]);
            s["val"][p] = members;
        }
        j["structures"][m.worlds[w]] = s;
    }
    return j;
}

// {"worlds": [...], "pre": [[a, b]], "R": [[a, b]], "val": {p: [...]}}, edges closed on read.
inline CS4Model read_cs4_model(const std::string& text) {
    auto j = detail::parse_json(text);
    if (!j.is_object() || !j.contains("worlds"))
        throw ModelFormatError("CS4 model needs \"worlds\"");
    CS4Model m;
    m.worlds = detail::read_names(j["worlds"], "worlds");
    std::size_t n = m.worlds.size();
    m.pre = Relation(n);
    m.R = Relation(n);
    auto index = [&](const std::string& w) {
        auto i = m.world(w);
        if (!i)
            throw ModelFormatError("unknown world " + w);
        return *i;
    };
    for (const auto& [a, b] : detail::read_pairs(j.value("pre", nlohmann::json()), "pre"))
        m.pre.set(index(a), index(b));
    for (const auto& [a, b] : detail::read_pairs(j.value("R", nlohmann::json()), "R"))
        m.R.set(index(a), index(b));
    m.pre.close_reflexive_transitive();
    m.R.close_reflexive_transitive();
    for (const auto& [p, members] : detail::read_val(j.value("val", nlohmann::json()), "val")) {
        std::vector<char> set(n, 0);
        for (const auto& w : members)
            set[index(w)] = 1;
        m.val[p] = std::move(set);
    }
    return m;
}

}  // namespace bml
