#pragma once

#include <string>
#include <vector>

namespace bml::corpus {

struct Entry {
    std::string name;
    std::string context;
    std::string term;
    std::string type;
};

// Proof terms for the seven tautologies, with A = p and B = q.
inline const std::vector<Entry>& axioms() {
    static const std::vector<Entry> items = {
        {"K", "",
         "gen g >= !. \\f : [>= g](p -> q) @ gf. \\a : [>= g]p @ ga. quo[h >= g]{ (unq[gf]{f}) (unq[ga]{a}) }",
         "forall g >= !. [>= g](p -> q) -> [>= g]p -> [>= g]q"},
        {"T", "", "\\x : [>= !]p @ g1. unq[g1]{x}", "[>= !]p -> p"},
        {"4-1", "", "gen g >= !. \\x : [>= g][>= g]p @ gx. quo[h >= g]{ unq[h]{ unq[gx]{x} } }",
         "forall g >= !. [>= g][>= g]p -> [>= g]p"},
        {"4", "", "gen g >= !. \\x : [>= g]p @ gx. quo[h1 >= g]{ quo[h2 >= g]{ unq[gx]{x} } }",
         "forall g >= !. [>= g]p -> [>= g][>= g]p"},
        {"Mon", "", "gen g1 >= !. \\x : [>= g1]p @ gx. gen g2 >= g1. quo[h >= g2]{ unq[gx]{x} }",
         "forall g1 >= !. [>= g1]p -> forall g2 >= g1. [>= g2]p"},
        {"Mon-1", "", "gen g1 >= !. \\x : (forall g2 >= g1. [>= g2]p) @ gx. x [g1]",
         "forall g1 >= !. (forall g2 >= g1. [>= g2]p) -> [>= g1]p"},
        {"K-1*", "",
         "gen g1 >= !. \\f : (forall g2 >= g1. [>= g2]p -> [>= g2]q) @ g3. "
         "quo[g4 >= g1]{ \\a : p @ g5. unq[g3]{ (f [g5]) (quo[g6 >= g5]{a}) } }",
         "forall g1 >= !. (forall g2 >= g1. [>= g2]p -> [>= g2]q) -> [>= g1](p -> q)"},
    };
    return items;
}

// Further judgments: redexes of each kind and terms under nontrivial contexts.
inline const std::vector<Entry>& extras() {
    static const std::vector<Entry> items = {
        {"identity", "", "\\x : p @ g. x", "p -> p"},
        {"beta-lam", "y : p @ h", "(\\x : p @ g. x) y", "p"},
        {"beta-quo", "", "\\x : [>= !]p @ g. unq[g]{ quo[d >= !]{ unq[g]{x} } }", "[>= !]p -> p"},
        {"beta-cls", "", "(gen g >= !. \\x : [>= g]p @ h. x) [!]", "[>= !]p -> [>= !]p"},
        {"K-1*-applied", "f : [>= !](p -> q) @ c",
         "(gen g1 >= !. \\f : (forall g2 >= g1. [>= g2]p -> [>= g2]q) @ g3. "
         "quo[g4 >= g1]{ \\a : p @ g5. unq[g3]{ (f [g5]) (quo[g6 >= g5]{a}) } }) [!] "
         "(gen g2 >= !. \\y : [>= g2]p @ k. quo[e >= g2]{ (unq[c]{f}) (unq[k]{y}) })",
         "[>= !](p -> q)"},
        {"K-applied", "u : [>= !](p -> q) @ c1, v : [>= !]p @ c2",
         "(gen g >= !. \\f : [>= g](p -> q) @ gf. \\a : [>= g]p @ ga. quo[h >= g]{ (unq[gf]{f}) (unq[ga]{a}) }) "
         "[!] u v",
         "[>= !]q"},
        {"staged", "n : p @ g0",
         "quo[s >= g0]{ \\x : p @ s1. (\\y : p @ s2. y) x }", "[>= g0](p -> p)"},
        {"shut-open", "x : [>= !]p @ g, open d >= g", "quo[e >= d]{ unq[g]{x} }", "[>= d]p"},
        {"nested-redex", "",
         "\\x : [>= !]p @ g. (\\z : p @ gz. z) (unq[g]{ quo[d >= !]{ unq[g]{x} } })", "[>= !]p -> p"},
    };
    return items;
}

// Judgments of the Kripke-style S4 calculus; "" as context means the empty stack.
inline const std::vector<Entry>& lambox() {
    static const std::vector<Entry> items = {
        {"identity", "", "\\x : p. x", "p -> p"},
        {"T", "", "\\x : #p. unbox_0{x}", "#p -> p"},
        {"box-identity", "", "box{\\x : p. x}", "#(p -> p)"},
        {"K", "", "\\f : #(p -> q). \\a : #p. box{ unbox_1{f} unbox_1{a} }", "#(p -> q) -> #p -> #q"},
        {"4", "", "\\x : #p. box{ box{ unbox_2{x} } }", "#p -> ##p"},
        {"rebox", "", "\\x : #p. box{ unbox_1{x} }", "#p -> #p"},
        {"double-T", "", "\\x : ##p. unbox_0{ unbox_0{x} }", "##p -> p"},
        {"stacked", "x : #p; y : q", "box{ unbox_2{x} }", "#p"},
        {"apply-in-box", "f : #(p -> q), a : p", "\\g : #p. box{ unbox_1{f} unbox_1{g} }", "#p -> #q"},
    };
    return items;
}

}  // namespace bml::corpus
