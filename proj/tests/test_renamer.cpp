#include <doctest.h>

#include "kbevolve/parser.hpp"
#include "kbevolve/renamer.hpp"
#include "support/random_kb.hpp"

using namespace kbevolve;

namespace {

const Term x = Term::var("x");
const Term y = Term::var("y");

KnowledgeBase running_example() {
    return parse_kb(
        "TBOX\nB [= exists R.C.\nexists R.C [= D.\nD [= C.\n"
        "ABOX\nB(a). D(a). C(b). R(b,b). R(a,a).\n");
}

TrackedSymbolSet running_tracked() {
    TrackedSymbolSet s;
    s.concepts = {"B", "C", "D"};
    s.roles = {"R"};
    return s;
}

std::vector<DLClause> expected_kstar_clauses() {
    Term a = Term::named("a"), b = Term::named("b");
    Atom exRC = Atom::exists_atom(RoleExpr{"R", false}, "C", true, x);
    return {
        DLClause({exRC}, {Atom::concept_atom("B", x)}),
        DLClause({exRC, Atom::neg_concept("B", x)}, {}),
        DLClause({Atom::concept_atom("D", x)},
                 {Atom::role_atom("R", x, y), Atom::concept_atom("C", y)}),
        DLClause({Atom::neg_role("R", x, y), Atom::neg_concept("C", y)},
                 {Atom::neg_concept("D", x)}),
        DLClause({Atom::concept_atom("C", x)}, {Atom::concept_atom("D", x)}),
        DLClause({Atom::neg_concept("D", x)}, {Atom::neg_concept("C", x)}),
        DLClause({}, {Atom::role_atom("R", x, y), Atom::neg_role("R", x, y)}),
        DLClause({}, {Atom::concept_atom("B", x), Atom::neg_concept("B", x)}),
        DLClause({}, {Atom::concept_atom("C", x), Atom::neg_concept("C", x)}),
        DLClause({}, {Atom::concept_atom("D", x), Atom::neg_concept("D", x)}),
        DLClause::fact(Atom::abox_concept("B", a)),
        DLClause::fact(Atom::abox_concept("D", a)),
        DLClause::fact(Atom::abox_concept("C", b)),
        DLClause::fact(Atom::abox_role("R", b, b)),
        DLClause::fact(Atom::abox_role("R", a, a)),
    };
}

}  // namespace

TEST_CASE("the Neg and ABox renaming functions") {
    Term a = Term::named("a"), b = Term::named("b");
    CHECK(neg(Atom::concept_atom("A", a)) == Atom::neg_concept("A", a));
    CHECK(neg(Atom::role_atom("R", a, b)) == Atom::neg_role("R", a, b));
    CHECK(neg_symbol("A") == "NegA");
    CHECK(abox_atom(Assertion::concept_of("B", "a")) == Atom::abox_concept("B", a));
    CHECK(abox_atom(Assertion::role_of("R", "b", "b")) == Atom::abox_role("R", b, b));

    auto negs = neg_set({Assertion::concept_of("B", "a"), Assertion::role_of("R", "a", "a")});
    CHECK(negs == std::vector<Atom>{Atom::neg_concept("B", a), Atom::neg_role("R", a, a)});

    CHECK_THROWS_AS(neg(Atom::exists_atom(RoleExpr{"R", false}, "C", true, x)),
                    std::invalid_argument);
    CHECK_THROWS_AS(neg(Atom::neg_concept("A", a)), std::invalid_argument);
    CHECK_THROWS_AS(neg(Atom::abox_concept("A", a)), std::invalid_argument);
    CHECK_THROWS_AS(neg(Atom::false_atom()), std::invalid_argument);
}

TEST_CASE("abox_atom is injective on distinct assertions") {
    std::vector<Assertion> as = {
        Assertion::concept_of("B", "a"), Assertion::concept_of("B", "b"),
        Assertion::concept_of("C", "a"), Assertion::role_of("B", "a", "b"),
        Assertion::role_of("B", "b", "a")};
    for (std::size_t i = 0; i < as.size(); ++i)
        for (std::size_t j = i + 1; j < as.size(); ++j)
            CHECK(!(abox_atom(as[i]) == abox_atom(as[j])));
}

TEST_CASE("renaming one clause produces the four groups") {
    // exists R.C(x) <- B(x) with S = {B, C, D, R}
    DLClause c({Atom::exists_atom(RoleExpr{"R", false}, "C", true, x)},
               {Atom::concept_atom("B", x)});
    auto out = rename_clause(c, running_tracked());
    std::vector<DLClause> expected = {
        c,
        DLClause({Atom::exists_atom(RoleExpr{"R", false}, "C", true, x),
                  Atom::neg_concept("B", x)},
                 {}),
        DLClause({}, {Atom::role_atom("R", x, y), Atom::neg_role("R", x, y)}),
        DLClause({}, {Atom::concept_atom("C", x), Atom::neg_concept("C", x)}),
        DLClause({}, {Atom::concept_atom("B", x), Atom::neg_concept("B", x)}),
    };
    std::sort(out.begin(), out.end());
    std::sort(expected.begin(), expected.end());
    CHECK(out == expected);
}

TEST_CASE("renaming flips tracked atoms across the arrow") {
    DLClause c({Atom::concept_atom("D", x)},
               {Atom::role_atom("R", x, y), Atom::concept_atom("C", y)});
    auto out = rename_clause(c, running_tracked());
    DLClause flipped({Atom::neg_role("R", x, y), Atom::neg_concept("C", y)},
                     {Atom::neg_concept("D", x)});
    CHECK(std::find(out.begin(), out.end(), flipped) != out.end());
}

TEST_CASE("with an empty tracked set a clause renames to itself") {
    DLClause c({Atom::concept_atom("D", x)},
               {Atom::role_atom("R", x, y), Atom::concept_atom("C", y)});
    auto out = rename_clause(c, TrackedSymbolSet{});
    CHECK(out == std::vector<DLClause>{c});
}

TEST_CASE("group (0): every clause is a member of its own renaming") {
    kbtest::RandomKbParams p;
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
        KnowledgeBase kb = kbtest::random_kb(seed, p, false);
        ClauseSet cs = clausify_tbox(kb.tbox, kb.rbox);
        TrackedSymbolSet s = tracked_symbols(kb, TrackedMode::AboxAndTbox);
        for (const auto& c : cs.clauses) {
            auto out = rename_clause(c, s);
            CHECK(std::find(out.begin(), out.end(), c) != out.end());
        }
    }
}

TEST_CASE("recoverability: the original clause is reconstructible from the flipped one") {
    kbtest::RandomKbParams p;
    for (std::uint64_t seed = 1; seed <= 60; ++seed) {
        KnowledgeBase kb = kbtest::random_kb(seed, p, false);
        ClauseSet cs = clausify_tbox(kb.tbox, kb.rbox);
        TrackedSymbolSet s = tracked_symbols(kb, TrackedMode::AboxAndTbox);
        for (const auto& c : cs.clauses) {
            auto groups = rename_clause(c, s);
            // the flipped clause is the second main-group member when distinct
            for (const auto& g : groups) {
                bool has_renamed_atom = false;
                for (const auto* side : {&g.head, &g.body})
                    for (const auto& a : *side)
                        has_renamed_atom = has_renamed_atom || is_renamed_kind(a.kind);
                bool integrity = g.head.empty() && g.body.size() == 2 && has_renamed_atom &&
                                 !(g == c) && clause_size(g) == 2;
                if (!has_renamed_atom || integrity || g == c) continue;
                CHECK(unrename(g) == c);
            }
        }
    }
}

TEST_CASE("tracked-symbol selection per mode") {
    KnowledgeBase kb = running_example();
    TrackedSymbolSet abox_only = tracked_symbols(kb, TrackedMode::AboxOnly);
    CHECK(abox_only.concepts == std::set<std::string>{"B", "C", "D"});
    CHECK(abox_only.roles == std::set<std::string>{"R"});
    CHECK(!abox_only.include_false);

    KnowledgeBase empty;
    TrackedSymbolSet none = tracked_symbols(empty, TrackedMode::AboxOnly);
    CHECK(none.empty());

    // repair mode on the insertion example: TBox {C and D [= bot}, ABox {C(a)}
    KnowledgeBase ins = parse_kb("TBOX\nC and D [= bot.\nABOX\nC(a).\n");
    TrackedSymbolSet repair_mode = tracked_symbols(ins, TrackedMode::AboxAndTbox, {}, true);
    CHECK(repair_mode.concepts == std::set<std::string>{"C", "D"});
    CHECK(repair_mode.roles.empty());
    CHECK(repair_mode.include_false);
}

TEST_CASE("K* of the running example is exactly the fifteen-clause set") {
    KnowledgeBase kb = running_example();
    TrackedSymbolSet s = tracked_symbols(kb, TrackedMode::AboxOnly);
    ClauseSet kst = kstar(kb, s);
    std::vector<DLClause> got = kst.clauses;
    std::vector<DLClause> expected = expected_kstar_clauses();
    std::sort(got.begin(), got.end());
    std::sort(expected.begin(), expected.end());
    CHECK(got == expected);
    CHECK(got.size() == 15);
}

TEST_CASE("K* with an empty ABox and empty tracked set is the plain clause set") {
    KnowledgeBase kb = parse_kb("TBOX\nB [= C.\n");
    TrackedSymbolSet s;
    ClauseSet kst = kstar(kb, s);
    CHECK(kst == clausify_tbox(kb.tbox, kb.rbox));
}

TEST_CASE("size bound: K* is at most four times the plain clause set") {
    kbtest::RandomKbParams p;
    p.max_assertions = 10;
    for (std::uint64_t seed = 1; seed <= 120; ++seed) {
        KnowledgeBase kb = kbtest::random_kb(seed, p, false);
        ClauseSet plain = clausify_kb(kb);
        if (plain.size() == 0) continue;
        TrackedSymbolSet s = tracked_symbols(kb, TrackedMode::AboxOnly);
        ClauseSet kst = kstar(kb, s);
        CHECK(kst.size() <= 4 * plain.size());
    }
}

TEST_CASE("renaming rejects clauses that already contain renamed atoms") {
    DLClause c({Atom::neg_concept("B", x)}, {});
    CHECK_THROWS_AS(rename_clause(c, running_tracked()), std::invalid_argument);
}

TEST_CASE("falsify replaces empty heads and nothing else") {
    ClauseSet cs;
    cs.add(DLClause({}, {Atom::concept_atom("C", x), Atom::concept_atom("D", x)}), "disjoint");
    cs.add(DLClause({Atom::concept_atom("C", x)}, {Atom::concept_atom("D", x)}), "sub");
    ClauseSet f = falsify(cs);
    CHECK(f.clauses[0] ==
          DLClause({Atom::false_atom()},
                   {Atom::concept_atom("C", x), Atom::concept_atom("D", x)}));
    CHECK(f.clauses[1] == cs.clauses[1]);
    CHECK(falsify(f) == f);  // idempotent

    ClauseSet no_empty;
    no_empty.add(DLClause({Atom::concept_atom("C", x)}, {}), "fact");
    CHECK(falsify(no_empty) == no_empty);
}

TEST_CASE("renaming a falsified set tracks false and the flipped clause uses Negfalse") {
    ClauseSet cs;
    cs.add(DLClause({}, {Atom::concept_atom("C", x), Atom::concept_atom("D", x)}), "disjoint");
    ClauseSet f = falsify(cs);
    TrackedSymbolSet s;
    s.concepts = {"C", "D"};
    s.include_false = true;
    ClauseSet renamed = rename_set(f, s);
    DLClause flipped({Atom::neg_concept("C", x), Atom::neg_concept("D", x)},
                     {Atom::neg_false()});
    DLClause false_int({}, {Atom::false_atom(), Atom::neg_false()});
    CHECK(renamed.contains(flipped));
    CHECK(renamed.contains(false_int));
    CHECK(unrename(flipped) == f.clauses[0]);
}
