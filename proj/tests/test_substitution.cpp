#include <gtest/gtest.h>

#include "bml/names.hpp"
#include "bml/parser.hpp"
#include "bml/substitution.hpp"

using namespace bml;

namespace {

const Formula p = Formula::atom("p");
const Classifier g1("g1"), g2("g2"), g3("g3"), g4("g4");

}  // namespace

TEST(ClassifierSubst, Formulas) {
    EXPECT_EQ(subst_cls(Formula::box(g1, p), {g1, g2}), Formula::box(g2, p));
    Formula bound = Formula::forall(g1, g2, Formula::box(g1, p));
    EXPECT_EQ(subst_cls(bound, {g1, g3}), bound);
    EXPECT_EQ(subst_cls(bound, {g2, g3}), Formula::forall(g1, g3, Formula::box(g1, p)));
}

TEST(ClassifierSubst, AvoidsCapture) {
    // replacing g2 by g1 under a binder named g1 must rename the binder
    Formula f = Formula::forall(g1, Classifier::initial(), Formula::box(g2, Formula::box(g1, p)));
    Formula r = subst_cls(f, {g2, g1});
    ASSERT_TRUE(r.is(Formula::Kind::Forall));
    EXPECT_NE(r.binder(), g1);
    EXPECT_TRUE(alpha_eq(r, parse_formula("forall a >= !. [>= g1][>= a]p")));
}

TEST(ClassifierSubst, Terms) {
    EXPECT_EQ(subst_cls(Term::unq(g1, Term::var("x")), {g1, g4}), Term::unq(g4, Term::var("x")));
    Term lam = parse_term("\\x : [>= g1]p @ g2. unq[g1]{x}");
    EXPECT_EQ(subst_cls(lam, {g1, g3}), parse_term("\\x : [>= g3]p @ g2. unq[g3]{x}"));
    Term quo = parse_term("quo[g1 >= g2]{ unq[g1]{x} }");
    EXPECT_EQ(subst_cls(quo, {g1, g3}), quo);
}

TEST(ClassifierSubst, Contexts) {
    Context g = parse_context("x : [>= g1]p @ g2, shut g1");
    EXPECT_EQ(subst_cls(g, {g1, g3}), parse_context("x : [>= g3]p @ g2, shut g3"));
}

TEST(VariableSubst, Examples) {
    Term n = Term::var("n");
    EXPECT_EQ(subst_var(Term::var("x"), {{g2, g1}, "x", n}), n);
    EXPECT_EQ(subst_var(Term::var("y"), {{g2, g1}, "x", n}), Term::var("y"));
    Term lam = Term::lam("y", g3, p, Term::app(Term::var("y"), Term::var("x")));
    EXPECT_EQ(subst_var(lam, {{g2, g1}, "x", Term::var("z")}),
              Term::lam("y", g3, p, Term::app(Term::var("y"), Term::var("z"))));
}

TEST(VariableSubst, ShadowedVariableIsUntouched) {
    Term lam = parse_term("\\x : p @ g3. x");
    EXPECT_EQ(subst_var(lam, {{g2, g1}, "x", Term::var("z")}), lam);
}

TEST(VariableSubst, RenamesCapturingTermBinder) {
    Term lam = parse_term("\\y : p @ g3. x");
    Term r = subst_var(lam, {{g2, g1}, "x", Term::var("y")});
    ASSERT_TRUE(r.is(Term::Kind::Lam));
    EXPECT_NE(r.var_name(), "y");
    EXPECT_EQ(r.body(), Term::var("y"));
}

TEST(VariableSubst, ClassifiersFollowTheSubstitution) {
    Term t = parse_term("unq[g2]{x}");
    EXPECT_EQ(subst_var(t, {{g2, g1}, "x", Term::var("n")}), parse_term("unq[g1]{n}"));
}

TEST(VariableSubst, IsCaptureAvoidingForClassifiers) {
    // the replacement mentions h free; the quo binder h must be renamed
    Term t = parse_term("quo[h >= !]{ x }");
    Term r = subst_var(t, {{g2, g1}, "x", parse_term("unq[h]{n}")});
    ASSERT_TRUE(r.is(Term::Kind::Quo));
    EXPECT_NE(r.cls(), Classifier("h"));
    EXPECT_TRUE(free_classifiers(r).count(Classifier("h")));
}
