#include <gtest/gtest.h>

#include <algorithm>

#include "bml/kripke.hpp"
#include "bml/parser.hpp"
#include "bml/testing/generators.hpp"

using namespace bml;
namespace gen = bml::testing;

namespace {

const Classifier bang = Classifier::initial();

bool has_code(const std::vector<Violation>& vs, Violation::Code c) {
    return std::any_of(vs.begin(), vs.end(), [&](const Violation& v) { return v.code == c; });
}

std::vector<Violation> structure_errors(const RawStructure& raw) {
    try {
        validate_structure(raw);
    } catch (const ModelError& e) {
        return e.violations;
    }
    return {};
}

std::vector<Violation> model_errors(const RawModel& raw) {
    try {
        validate_model(raw);
    } catch (const ModelError& e) {
        return e.violations;
    }
    return {};
}

RawStructure point(bool p_holds) {
    RawStructure s{{"!"}, {}, {}, {}};
    s.val["p"] = p_holds ? std::vector<std::string>{"!"} : std::vector<std::string>{};
    return s;
}

BmlModel one_world(bool p_holds) { return validate_model(RawModel{{"w"}, {}, {{"w", point(p_holds)}}}); }

std::vector<BmlModel> suite() {
    gen::Rng rng(61);
    std::vector<BmlModel> out{one_world(true), one_world(false)};
    for (int i = 0; i < 25; ++i)
        out.push_back(gen::random_bml_model(rng));
    return out;
}

}  // namespace

TEST(Structure, OnePoint) {
    auto s = validate_structure(point(true));
    EXPECT_EQ(s.elements.size(), 1u);
    EXPECT_TRUE(structure_violations(s).empty());
}

TEST(Structure, ValuationMustBeUpwardClosed) {
    RawStructure s{{"!", "d"}, {{"!", "d"}}, {}, {{"p", {"!"}}}};
    auto vs = structure_errors(s);
    ASSERT_EQ(vs.size(), 1u);
    EXPECT_EQ(vs[0].code, Violation::Code::ValuationNotUpwardClosed);
    EXPECT_NE(vs[0].message.find("(!, d)"), std::string::npos) << vs[0].message;
}

TEST(Structure, PreIsLiftedIntoMod) {
    RawStructure s{{"!", "d"}, {{"!", "d"}}, {{"d", "!"}}, {}};
    auto v = validate_structure(s);
    EXPECT_TRUE(v.mod(0, 1));
    EXPECT_TRUE(v.mod(1, 0));
    EXPECT_FALSE(v.pre(1, 0));
}

TEST(Structure, Errors) {
    EXPECT_TRUE(has_code(structure_errors(RawStructure{{"d"}, {}, {}, {}}), Violation::Code::MissingRoot));
    EXPECT_TRUE(has_code(structure_errors(RawStructure{{"!", "d"}, {}, {}, {}}), Violation::Code::NotRootLeast));
    EXPECT_TRUE(has_code(structure_errors(RawStructure{{"!"}, {{"!", "e"}}, {}, {}}), Violation::Code::UnknownElement));
}

TEST(Model, Examples) {
    EXPECT_TRUE(model_errors(RawModel{{"w"}, {}, {{"w", point(true)}}}).empty());

    RawStructure big{{"!", "d"}, {{"!", "d"}}, {}, {}};
    RawStructure small{{"!"}, {}, {}, {}};
    auto shrink = model_errors(RawModel{{"w", "v"}, {{"w", "v"}}, {{"w", big}, {"v", small}}});
    EXPECT_TRUE(has_code(shrink, Violation::Code::DomainShrank));

    auto grow = model_errors(RawModel{{"w", "v"}, {{"w", "v"}}, {{"w", small}, {"v", big}}});
    EXPECT_TRUE(grow.empty());

    EXPECT_TRUE(has_code(model_errors(RawModel{{}, {}, {}}), Violation::Code::NoWorlds));
    EXPECT_TRUE(has_code(model_errors(RawModel{{"w"}, {}, {}}), Violation::Code::MissingStructure));
    EXPECT_TRUE(has_code(model_errors(RawModel{{"w"}, {{"w", "u"}}, {{"w", small}}}), Violation::Code::UnknownWorld));
}

TEST(Model, ValuationMayNotShrink) {
    RawStructure with{{"!"}, {}, {}, {{"p", {"!"}}}};
    RawStructure without{{"!"}, {}, {}, {{"p", {}}}};
    auto vs = model_errors(RawModel{{"w", "v"}, {{"w", "v"}}, {{"w", with}, {"v", without}}});
    EXPECT_TRUE(has_code(vs, Violation::Code::ValuationShrank));
}

TEST(Satisfies, OnePoint) {
    Assignment rho;
    EXPECT_TRUE(satisfies(one_world(true), 0, 0, rho, parse_formula("p")));
    EXPECT_FALSE(satisfies(one_world(false), 0, 0, rho, parse_formula("[>= !]p")));
    EXPECT_TRUE(satisfies(one_world(false), 0, 0, rho, parse_formula("p -> p")));
}

TEST(Satisfies, UnassignedClassifierThrows) {
    EXPECT_THROW(satisfies(one_world(true), 0, 0, {}, parse_formula("[>= g]p")), UnassignedClassifier);
}

TEST(Satisfies, TAxiomHoldsEverywhere) {
    Formula t = parse_formula("[>= !]p -> p");
    for (const auto& m : suite())
        for (std::size_t w = 0; w < m.worlds.size(); ++w)
            for (std::size_t d = 0; d < m.elements.size(); ++d)
                if (m.stages[w].domain[d])
                    EXPECT_TRUE(satisfies(m, w, d, {}, t));
}

TEST(SatisfiesContext, Examples) {
    for (const auto& m : suite())
        for (std::size_t w = 0; w < m.worlds.size(); ++w)
            EXPECT_TRUE(satisfies_context(m, w, {}, Context{}));
    Context g = parse_context("x : p @ g");
    Assignment rho{{Classifier("g"), 0}};
    EXPECT_TRUE(satisfies_context(one_world(true), 0, rho, g));
    EXPECT_FALSE(satisfies_context(one_world(false), 0, rho, g));
}

TEST(Consequence, Examples) {
    auto models = suite();
    EXPECT_FALSE(consequence_on(models, Context{}, parse_formula("p -> p")));
    EXPECT_FALSE(consequence_on(models, parse_context("x : p @ g"), parse_formula("p")));
    auto c = consequence_on(models, Context{}, parse_formula("p"));
    ASSERT_TRUE(c);
    EXPECT_EQ(c->model, 1u);
}

TEST(Consequence, RelationalJudgments) {
    auto models = suite();
    Context g = parse_context("x : p @ g1, open g2 >= !");
    EXPECT_FALSE(relation_consequence_on(models, g, RelKind::Mod, Classifier("g1"), Classifier("g2")));
    EXPECT_FALSE(relation_consequence_on(models, g, RelKind::Pre, bang, Classifier("g2")));
}

TEST(Model, GeneratedModelsAreValid) {
    gen::Rng rng(62);
    for (int i = 0; i < 100; ++i)
        EXPECT_TRUE(model_violations(gen::random_bml_model(rng)).empty());
}
