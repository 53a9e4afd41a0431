#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bml/bml.hpp"
#include "bml/report.hpp"
#include "bml/testing/acceptance.hpp"

namespace {

using namespace bml;

constexpr int kParseOrIo = 2;

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string load(const std::string& path) {
    try {
        return read_file(path);
    } catch (const std::exception& e) {
        throw InputError(e.what());
    }
}

template <class F>
auto parsed(const std::string& path, F&& parse) {
    std::string text = load(path);
    try {
        return parse(text);
    } catch (const ParseError& e) {
        throw InputError(path + ":" + e.what());
    }
}

std::uint64_t seed_or_env(std::uint64_t flag, bool flag_given) {
    if (flag_given)
        return flag;
    if (const char* env = std::getenv("BML_SEED"))
        return std::strtoull(env, nullptr, 10);
    return testing::default_seed;
}

class Clock {
public:
    double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count(); }

private:
    std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

int finish(RunReport& r, const Clock& clock) {
    r.seconds = clock.seconds();
    print_verdicts(std::cout, r);
    print_summary(std::cerr, r);
    return r.exit_code();
}

int cmd_check(const std::string& file, bool trace) {
    Clock clock;
    RunReport r{"check " + file, {}, 0};
    Judgment j = parsed(file, [](const std::string& t) { return parse_judgment(t); });
    if (auto e = wf_context(j.context)) {
        r.verdicts.push_back({file, false, e->message()});
        return finish(r, clock);
    }
    auto res = infer(j.context, j.term, trace);
    if (!res.ok()) {
        r.verdicts.push_back({file, false, res.error->message()});
        return finish(r, clock);
    }
    if (trace)
        print_derivation(std::cout, *res.derivation);
    if (j.type) {
        auto e = check(j.context, j.term, *j.type);
        r.verdicts.push_back({file, !e, e ? e->message() : to_string(*j.type)});
    } else {
        r.verdicts.push_back({file, true, "inferred " + to_string(*res.type)});
    }
    return finish(r, clock);
}

int cmd_normalize(const std::string& file, bool trace, std::size_t cap, const std::string& strategy,
                  std::uint64_t seed) {
    Clock clock;
    RunReport r{"normalize " + file, {}, 0};
    Judgment j = parsed(file, [](const std::string& t) { return parse_judgment(t); });
    auto typed = infer(j.context, j.term);
    if (!typed.ok()) {
        r.verdicts.push_back({file, false, typed.error->message()});
        return finish(r, clock);
    }
    Classifier at = pos(j.context);
    Strategy s = strategy == "random" ? Strategy::RandomInnermost : Strategy::LeftmostOutermost;
    try {
        auto n = normalize(j.term, at, cap, s, seed, trace);
        if (trace)
            for (std::size_t k = 0; k < n.trace.size(); ++k)
                std::cout << "step " << k + 1 << " @ " << n.trace[k].position << ": " << to_string(n.trace[k].kind)
                          << " at " << path_string(n.trace[k].path) << '\n';
        auto after = infer(j.context, n.term);
        bool ok = after.ok() && alpha_eq(*after.type, *typed.type);
        r.verdicts.push_back({file, ok,
                              to_string(n.term) + " (" + std::to_string(n.steps) + " steps)" +
                                  (ok ? "" : ", type not preserved")});
    } catch (const StepCapExceeded& e) {
        r.verdicts.push_back({file, false, e.what()});
    }
    return finish(r, clock);
}

int cmd_rel(const std::string& file, const std::vector<std::string>& queries) {
    Clock clock;
    RunReport r{"rel " + file, {}, 0};
    Context g = parsed(file, [](const std::string& t) { return parse_context(t); });
    if (auto e = wf_context(g)) {
        r.verdicts.push_back({file, false, e->message()});
        return finish(r, clock);
    }
    std::vector<RelQuery> qs;
    for (const auto& q : queries) {
        try {
            qs.push_back(parse_rel_query(q));
        } catch (const ParseError& e) {
            throw InputError("query '" + q + "': " + e.what());
        }
    }
    for (std::size_t i = 0; i < qs.size(); ++i) {
        try {
            bool holds = derives(g, qs[i].kind, qs[i].lhs, qs[i].rhs);
            r.verdicts.push_back({queries[i], holds, holds ? "true" : "false"});
        } catch (const UnknownClassifier& e) {
            r.verdicts.push_back({queries[i], false, e.what()});
        }
    }
    return finish(r, clock);
}

BmlModel load_model(const std::string& file) {
    std::string text = load(file);
    RawModel raw;
    try {
        raw = read_raw_model(text);
    } catch (const ModelFormatError& e) {
        throw InputError(file + ": " + e.what());
    }
    return validate_model(raw);
}

int cmd_model_check(const std::string& file) {
    Clock clock;
    RunReport r{"model check " + file, {}, 0};
    try {
        BmlModel m = load_model(file);
        r.verdicts.push_back({file, true,
                              std::to_string(m.worlds.size()) + " worlds, " + std::to_string(m.elements.size()) +
                                  " elements"});
    } catch (const ModelError& e) {
        for (const auto& v : e.violations)
            r.verdicts.push_back({file, false, std::string(to_string(v.code)) + ": " + v.message});
    }
    return finish(r, clock);
}

int cmd_model_sat(const std::string& file, const std::string& world, const std::string& elem,
                  const std::string& assign, const std::string& formula_text) {
    Clock clock;
    RunReport r{"model sat " + file, {}, 0};
    Formula a = [&] {
        try {
            return parse_formula(formula_text);
        } catch (const ParseError& e) {
            throw InputError("formula: " + std::string(e.what()));
        }
    }();
    BmlModel m;
    try {
        m = load_model(file);
    } catch (const ModelError& e) {
        for (const auto& v : e.violations)
            r.verdicts.push_back({file, false, std::string(to_string(v.code)) + ": " + v.message});
        return finish(r, clock);
    }
    auto w = m.world(world);
    auto d = m.element(elem);
    if (!w || !d || !m.stages[*w].domain[*d])
        throw InputError("no element " + elem + " in world " + world);
    Assignment rho;
    std::stringstream ss(assign);
    std::string binding;
    while (std::getline(ss, binding, ',')) {
        if (binding.empty())
            continue;
        auto eq = binding.find('=');
        if (eq == std::string::npos)
            throw InputError("assignment '" + binding + "' is not of the form g=d");
        auto e = m.element(binding.substr(eq + 1));
        if (!e || !m.stages[*w].domain[*e])
            throw InputError("no element " + binding.substr(eq + 1) + " in world " + world);
        rho[Classifier(binding.substr(0, eq))] = *e;
    }
    try {
        bool holds = satisfies(m, *w, *d, rho, a);
        r.verdicts.push_back({to_string(a), holds, holds ? "satisfied" : "not satisfied"});
    } catch (const UnassignedClassifier& e) {
        throw InputError(e.what());
    }
    return finish(r, clock);
}

int cmd_translate(const std::string& file) {
    Clock clock;
    RunReport r{"translate-s4 " + file, {}, 0};
    BoxJudgment j = parsed(file, [](const std::string& t) { return parse_box_judgment(t); });
    auto typed = lambox_infer(j.stack, j.term);
    if (!typed.ok()) {
        r.verdicts.push_back({file, false, typed.error->message()});
        r.seconds = clock.seconds();
        std::cerr << "FAIL " << file << ": " << typed.error->message() << '\n';
        return 1;
    }
    if (j.type && !(*j.type == *typed.type)) {
        std::cerr << "FAIL " << file << ": stated type " << to_string(*j.type) << ", inferred "
                  << to_string(*typed.type) << '\n';
        return 1;
    }
    Translation t = translate(j.stack, j.term);
    Formula a = from_box(*typed.type);
    auto err = check(t.context, t.term, a);
    // The output is itself a judgment file, so the report goes into comments.
    std::cout << "# translate-s4 " << file << '\n';
    std::cout << "# " << (err ? "FAIL kernel rejects: " + err->message() : "ok kernel accepts") << '\n';
    std::cout << to_string(t.context) << (t.context.empty() ? "" : " ") << "|- " << t.term << " : " << a << '\n';
    r.verdicts.push_back({file, !err, err ? err->message() : ""});
    r.seconds = clock.seconds();
    print_summary(std::cerr, r);
    return r.exit_code();
}

int cmd_axioms(bool normal_forms) {
    Clock clock;
    RunReport r{"axioms", check_entries(corpus::axioms(), normal_forms), 0};
    return finish(r, clock);
}

int cmd_selftest(std::uint64_t seed) {
    Clock clock;
    RunReport r{"selftest --seed " + std::to_string(seed), {}, 0};
    for (const auto& c : testing::run_acceptance(seed)) {
        std::ostringstream item;
        item << "criterion " << c.id << " (" << c.name << ")";
        std::ostringstream reason;
        reason.precision(3);
        reason << c.detail << " [" << c.seconds << "s]";
        r.verdicts.push_back({item.str(), c.pass, reason.str()});
    }
    return finish(r, clock);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bounded modal logic kernel"};
    app.require_subcommand(1);

    std::string file;
    bool trace = false;

    auto* check = app.add_subcommand("check", "Type-check a judgment file");
    check->add_option("file", file, "judgment file")->required();
    check->add_flag("--trace", trace, "print the derivation tree");

    std::size_t cap = 100000;
    std::string strategy = "lo";
    std::uint64_t seed = 0;
    auto* norm = app.add_subcommand("normalize", "Normalize the term of a judgment file");
    norm->add_option("file", file, "judgment file")->required();
    norm->add_flag("--trace", trace, "print each contraction");
    norm->add_option("--cap", cap, "step limit");
    norm->add_option("--strategy", strategy, "lo or random")->check(CLI::IsMember({"lo", "random"}));
    auto* norm_seed = norm->add_option("--seed", seed, "seed for the random strategy");

    std::vector<std::string> queries;
    auto* rel = app.add_subcommand("rel", "Decide relational queries against a context file");
    rel->add_option("file", file, "context file")->required();
    rel->add_option("queries", queries, "queries such as \"g1 <= g2\" or \"g1 [= g2\"")->required();

    auto* model = app.add_subcommand("model", "Validate models and evaluate formulas");
    model->require_subcommand(1);
    auto* mcheck = model->add_subcommand("check", "Validate a model file");
    mcheck->add_option("file", file, "model file")->required();
    std::string world, elem, assign, formula;
    auto* msat = model->add_subcommand("sat", "Evaluate a formula at a world and element");
    msat->add_option("file", file, "model file")->required();
    msat->add_option("--world", world)->required();
    msat->add_option("--elem", elem)->required();
    msat->add_option("--assign", assign, "comma separated g=d bindings");
    msat->add_option("--formula", formula)->required();

    auto* tr = app.add_subcommand("translate-s4", "Translate a box-calculus judgment");
    tr->add_option("file", file, "box-calculus judgment file")->required();

    bool normal_forms = false;
    auto* ax = app.add_subcommand("axioms", "Check the bundled tautology proofs");
    ax->add_flag("--emit-normal-forms", normal_forms, "print each normal form");

    std::uint64_t self_seed = 0;
    auto* self = app.add_subcommand("selftest", "Run the randomized acceptance suite");
    auto* self_seed_opt = self->add_option("--seed", self_seed, "seed (default from BML_SEED or built in)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kParseOrIo;
    }

    try {
        if (*check)
            return cmd_check(file, trace);
        if (*norm)
            return cmd_normalize(file, trace, cap, strategy, seed_or_env(seed, norm_seed->count() > 0));
        if (*rel)
            return cmd_rel(file, queries);
        if (*mcheck)
            return cmd_model_check(file);
        if (*msat)
            return cmd_model_sat(file, world, elem, assign, formula);
        if (*tr)
            return cmd_translate(file);
        if (*ax)
            return cmd_axioms(normal_forms);
        if (*self)
            return cmd_selftest(seed_or_env(self_seed, self_seed_opt->count() > 0));
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kParseOrIo;
    } catch (const UnknownClassifier& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kParseOrIo;
    }
    return kParseOrIo;
}
