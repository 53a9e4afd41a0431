#pragma once

#include <chrono>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "bml/corpus.hpp"
#include "bml/names.hpp"
#include "bml/parser.hpp"
#include "bml/reduction.hpp"
#include "bml/typing.hpp"

namespace bml {

struct Verdict {
    std::string item;
    bool ok = false;
    std::string reason;  // rule and obligation on failure, result on success
};

struct RunReport {
    std::string command;
    std::vector<Verdict> verdicts;
    double seconds = 0;

    int exit_code() const {
        for (const auto& v : verdicts)
            if (!v.ok)
                return 1;
        return 0;
    }
    std::size_t failures() const {
        std::size_t n = 0;
        for (const auto& v : verdicts)
            n += v.ok ? 0 : 1;
        return n;
    }
};

inline void print_verdicts(std::ostream& os, const RunReport& r) {
    for (const auto& v : r.verdicts)
        os << (v.ok ? "ok   " : "FAIL ") << v.item << (v.reason.empty() ? "" : ": " + v.reason) << '\n';
}

inline void print_summary(std::ostream& os, const RunReport& r) {
    os << r.command << ": " << r.verdicts.size() - r.failures() << "/" << r.verdicts.size() << " ok in "
       << static_cast<long long>(r.seconds * 1e6) / 1000.0 << " ms\n";
}

// Checks each entry at its stated type. Entries that do not parse are failures.
inline std::vector<Verdict> check_entries(const std::vector<corpus::Entry>& entries, bool normal_forms = false) {
    std::vector<Verdict> out;
    for (const auto& e : entries) {
        Verdict v{e.name, false, {}};
        try {
            Judgment j = parse_judgment(e.context + " |- " + e.term + " : " + e.type);
            if (auto err = check(j.context, j.term, *j.type)) {
                v.reason = err->rule + " requires " + err->obligation;
            } else {
                v.ok = true;
                v.reason = e.type;
                if (normal_forms)
                    v.reason += "\n     normal form: " + to_string(normalize(j.term, pos(j.context), 100000).term);
            }
        } catch (const ParseError& p) {
            v.reason = std::string("parse error ") + p.what();
        }
        out.push_back(std::move(v));
    }
    return out;
}

}  // namespace bml
