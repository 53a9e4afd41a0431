#include <gtest/gtest.h>

#include "bml/corpus.hpp"
#include "bml/parser.hpp"
#include "bml/reduction.hpp"
#include "bml/testing/generators.hpp"
#include "bml/typing.hpp"

using namespace bml;
namespace gen = bml::testing;

namespace {

const Classifier g1("g1");

Term step_once(const std::string& term, const Classifier& at) {
    auto s = beta_step(parse_term(term), at);
    EXPECT_TRUE(s) << term;
    return s ? s->term : parse_term(term);
}

}  // namespace

TEST(BetaStep, Axioms) {
    EXPECT_EQ(step_once("(\\x : p @ g2. x) y", g1), Term::var("y"));
    EXPECT_EQ(step_once("unq[g2]{ quo[g3 >= g4]{ y } }", g1), Term::var("y"));
    EXPECT_EQ(step_once("(gen g2 >= g3. quo[g5 >= g2]{x}) [g4]", g1), parse_term("quo[g5 >= g4]{x}"));
}

TEST(BetaStep, QuoteBinderBecomesPosition) {
    EXPECT_EQ(step_once("unq[g2]{ quo[g3 >= g4]{ unq[g3]{y} } }", g1), parse_term("unq[g1]{y}"));
}

TEST(BetaStep, LambdaClassifierBecomesPosition) {
    EXPECT_EQ(step_once("(\\x : p @ g2. unq[g2]{x}) y", g1), parse_term("unq[g1]{y}"));
}

TEST(BetaStep, NormalTermHasNoStep) { EXPECT_FALSE(beta_step(parse_term("\\x : p @ g. x"), g1)); }

TEST(BetaStep, PositionsFollowBinders) {
    auto sites = redex_sites(parse_term("\\x : p @ g2. quo[g3 >= !]{ unq[g4]{ (\\y : p @ g5. y) x } }"), g1);
    ASSERT_EQ(sites.size(), 1u);
    EXPECT_EQ(sites[0].position, Classifier("g4"));
    EXPECT_EQ(sites[0].kind, RedexKind::BetaLam);
    EXPECT_EQ(sites[0].path, (TermPath{0, 0, 0}));
}

TEST(Normalize, Examples) {
    auto a = normalize(Term::var("y"), Classifier("g"), 100);
    EXPECT_EQ(a.term, Term::var("y"));
    EXPECT_EQ(a.steps, 0u);
    auto b = normalize(parse_term("(\\x : p @ g2. x) y"), g1, 100);
    EXPECT_EQ(b.term, Term::var("y"));
    EXPECT_EQ(b.steps, 1u);
    auto c = normalize(parse_term("unq[g0]{ quo[g3 >= !]{ (\\x : p @ g2. x) y } }"), Classifier("g0"), 100);
    EXPECT_EQ(c.term, Term::var("y"));
    EXPECT_EQ(c.steps, 2u);
}

TEST(Normalize, StepCap) {
    EXPECT_THROW(normalize(parse_term("unq[g0]{ quo[g3 >= !]{ (\\x : p @ g2. x) y } }"), Classifier("g0"), 1),
                 StepCapExceeded);
}

TEST(Normalize, KInverseApplied) {
    const auto& e = corpus::extras()[4];
    ASSERT_EQ(e.name, "K-1*-applied");
    Context g = parse_context(e.context);
    auto n = normalize(parse_term(e.term), pos(g), 1000);
    EXPECT_TRUE(is_normal(n.term));
    EXPECT_LE(n.steps, 20u);
    EXPECT_FALSE(check(g, n.term, parse_formula(e.type)));
}

TEST(Normalize, StrategiesAgreeOnGeneratedTerms) {
    gen::Rng rng(51);
    for (int i = 0; i < 150; ++i) {
        auto j = gen::random_judgment(rng, false);
        Classifier at = pos(j.context);
        auto lo = normalize(j.term, at, 100000);
        auto ri = normalize(j.term, at, 100000, Strategy::RandomInnermost, i);
        EXPECT_TRUE(is_normal(lo.term));
        EXPECT_TRUE(alpha_eq(lo.term, ri.term)) << to_string(j.term);
        EXPECT_FALSE(check(j.context, lo.term, j.type)) << to_string(j.term);
    }
}

TEST(Normalize, TraceMatchesSteps) {
    auto n = normalize(parse_term(corpus::extras()[8].term), Classifier::initial(), 100,
                       Strategy::LeftmostOutermost, 0, true);
    EXPECT_EQ(n.trace.size(), n.steps);
    EXPECT_GT(n.steps, 0u);
}

TEST(Classify, Examples) {
    EXPECT_EQ(classify(parse_term("\\x : p @ g. x")), TermClass::Canonical);
    EXPECT_EQ(classify(parse_term("x y")), TermClass::Neutral);
    EXPECT_EQ(classify(parse_term("quo[g1 >= !]{x}")), TermClass::Canonical);
    EXPECT_EQ(classify(parse_term("gen g >= !. x")), TermClass::Canonical);
    EXPECT_EQ(classify(parse_term("unq[g]{x}")), TermClass::Neutral);
}

TEST(Subformula, Examples) {
    EXPECT_TRUE(is_subformula(parse_formula("p"), parse_formula("p -> q")));
    EXPECT_TRUE(is_subformula(parse_formula("[>= g2]p"), parse_formula("forall g1 >= !. [>= g1]p")));
    EXPECT_FALSE(is_subformula(parse_formula("q -> p"), parse_formula("p -> q")));
}
