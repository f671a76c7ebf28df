// Acceptance suite: one test case per criterion, each printing a single
// PASS/FAIL line. Run via `ctest -R acceptance` or directly:
//     ./build/tests/acceptance_tests
#include <doctest.h>

#include <chrono>
#include <cstdio>

#include "kbevolve/clausifier.hpp"
#include "kbevolve/engine.hpp"
#include "kbevolve/evolution.hpp"
#include "kbevolve/generator.hpp"
#include "kbevolve/parser.hpp"
#include "kbevolve/renamer.hpp"
#include "support/herbrand.hpp"
#include "support/random_kb.hpp"

using namespace kbevolve;

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

void report(int criterion, const char* name, bool ok, double elapsed_ms) {
    std::printf("[criterion %d] %-22s %s  (%.0f ms)\n", criterion, name, ok ? "PASS" : "FAIL",
                elapsed_ms);
    std::fflush(stdout);
}

KnowledgeBase running_example() {
    return parse_kb(
        "TBOX\nB [= exists R.C.\nexists R.C [= D.\nD [= C.\n"
        "ABOX\nB(a). D(a). C(b). R(b,b). R(a,a).\n");
}

std::vector<Assertion> abox_of(const char* text) { return parse_kb(text).abox; }

}  // namespace

TEST_CASE("criterion 1: golden examples") {
    auto start = Clock::now();
    bool ok = true;

    // clausification of the running-example TBox
    {
        KnowledgeBase kb = running_example();
        ClauseSet cs = clausify_tbox(kb.tbox, kb.rbox);
        Term x = Term::var("x"), y = Term::var("y");
        std::vector<DLClause> expected = {
            DLClause({Atom::exists_atom(RoleExpr{"R", false}, "C", true, x)},
                     {Atom::concept_atom("B", x)}),
            DLClause({Atom::concept_atom("D", x)},
                     {Atom::role_atom("R", x, y), Atom::concept_atom("C", y)}),
            DLClause({Atom::concept_atom("C", x)}, {Atom::concept_atom("D", x)}),
        };
        std::vector<DLClause> got = cs.clauses;
        std::sort(got.begin(), got.end());
        std::sort(expected.begin(), expected.end());
        ok = ok && got == expected;
    }

    // the fifteen-clause K*-transformation, up to clause ordering
    {
        KnowledgeBase kb = running_example();
        ClauseSet kst = kstar(kb, tracked_symbols(kb, TrackedMode::AboxOnly));
        Term x = Term::var("x"), y = Term::var("y"), a = Term::named("a"), b = Term::named("b");
        Atom exRC = Atom::exists_atom(RoleExpr{"R", false}, "C", true, x);
        std::vector<DLClause> expected = {
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
        std::vector<DLClause> got = kst.clauses;
        std::sort(got.begin(), got.end());
        std::sort(expected.begin(), expected.end());
        ok = ok && got.size() == 15 && got == expected;
    }

    // minimal instance deletion of D(a) from the running example
    {
        EvolutionResult r = delete_instance(running_example(), parse_assertion("D(a)"));
        ok = ok && r.status == EvolutionStatus::Ok && r.mode == EvolutionMode::ModelBased;
        ok = ok && r.resulting_abox() == abox_of("ABOX\nC(b). R(b,b). R(a,a).");
    }

    // individual removal under a top-subsumption
    {
        KnowledgeBase kb = parse_kb("TBOX\ntop [= C.\nABOX\nC(a). B(a). C(b). B(b).\n");
        EvolutionResult r = delete_instance(kb, parse_assertion("C(a)"));
        ok = ok && r.mode == EvolutionMode::IndividualRemoval;
        ok = ok && r.resulting_abox() == abox_of("ABOX\nC(b). B(b).");
    }

    // both minimal repairs of the clashing pair
    {
        KnowledgeBase kb = parse_kb("TBOX\nC and D [= bot.\nABOX\nC(a). D(a).\n");
        auto results = repair(kb, true, 16);
        std::set<std::vector<Assertion>> got;
        for (const auto& r : results) got.insert(r.resulting_abox());
        std::set<std::vector<Assertion>> expected = {abox_of("ABOX\nC(a)."),
                                                     abox_of("ABOX\nD(a).")};
        ok = ok && got == expected;
    }

    // insertion that survives by repairing around the new assertion
    {
        KnowledgeBase kb = parse_kb("TBOX\nC and D [= bot.\nABOX\nC(a).\n");
        EvolutionResult r = insert_instance(kb, parse_assertion("D(a)"));
        ok = ok && r.status == EvolutionStatus::Ok;
        ok = ok && r.resulting_abox() == abox_of("ABOX\nD(a).");
    }

    double elapsed = ms_since(start);
    ok = ok && elapsed < 1000.0;
    report(1, "golden-examples", ok, elapsed);
    CHECK(ok);
}

TEST_CASE("criterion 2: size bound") {
    auto start = Clock::now();
    bool ok = true;
    for (std::uint64_t seed = 1; seed <= 200; ++seed) {
        GeneratorProfile p;
        p.seed = seed;
        p.n_assertions = (seed * 97) % 501;  // spread over 0..500
        KnowledgeBase kb = generate(p);
        ClauseSet plain = clausify_kb(kb);
        ClauseSet kst = kstar(kb, tracked_symbols(kb, TrackedMode::AboxOnly));
        if (kst.size() > 4 * plain.size()) {
            ok = false;
            std::printf("  size bound violated at seed %llu: %zu > 4*%zu\n",
                        (unsigned long long)seed, kst.size(), plain.size());
        }
    }
    double elapsed = ms_since(start);
    ok = ok && elapsed < 30000.0;
    report(2, "size-bound", ok, elapsed);
    CHECK(ok);
}

TEST_CASE("criterion 3: equisatisfiability") {
    auto start = Clock::now();
    bool ok = true;
    kbtest::RandomKbParams p;  // <= 4 concepts, <= 2 roles by default
    std::vector<std::string> inds = {"a", "b", "c"};
    for (std::uint64_t seed = 1; seed <= 300; ++seed) {
        KnowledgeBase kb = kbtest::random_kb(seed, p, /*existential_free=*/true);
        ClauseSet xt = clausify_tbox(kb.tbox, kb.rbox);
        ClauseSet facts = clausify_abox(kb.abox);
        ClauseSet plain = xt;
        plain.add_all(facts);
        bool oracle = kbtest::herbrand_satisfiable(plain, inds);

        TrackedSymbolSet s = tracked_symbols(kb, TrackedMode::AboxAndTbox);
        ClauseSet renamed = rename_set(xt, s);
        renamed.add_all(facts);
        bool engine_renamed = is_satisfiable(ground_prepare(renamed, inds));

        ClauseSet kst = kstar_from(xt, kb.abox, s);
        kst.add_all(facts);
        bool engine_kstar = is_satisfiable(ground_prepare(kst, inds));

        if (engine_renamed != oracle || engine_kstar != oracle) {
            ok = false;
            std::printf("  disagreement at seed %llu: oracle=%d renamed=%d kstar=%d\n",
                        (unsigned long long)seed, oracle, engine_renamed, engine_kstar);
        }
    }
    double elapsed = ms_since(start);
    ok = ok && elapsed < 120000.0;
    report(3, "equisatisfiability", ok, elapsed);
    CHECK(ok);
}

TEST_CASE("criterion 4: oracle agreement") {
    auto start = Clock::now();
    bool ok = true;
    kbtest::RandomKbParams p;
    p.max_gcis = 5;
    p.max_assertions = 8;
    p.n_individuals = 3;
    std::size_t usable = 0;
    for (std::uint64_t seed = 1; usable < 300; ++seed) {
        KnowledgeBase kb = kbtest::random_kb(seed, p, /*existential_free=*/false);
        if (!tbox_consistent(kb)) continue;
        ++usable;
        EvolutionContext ctx(kb);

        if (!kb.abox.empty()) {
            Assertion d = kb.abox[seed % kb.abox.size()];
            EvolutionResult dr = ctx.delete_instance(d);
            if (dr.status == EvolutionStatus::Ok) {
                auto oracle = brute_force_delete(kb, d);
                auto resulting = dr.resulting_abox();
                bool member =
                    std::find(oracle.begin(), oracle.end(), resulting) != oracle.end();
                KnowledgeBase after(kb.rbox, kb.tbox, resulting);
                bool sound = !entails(after, d);
                bool maximal = true;
                for (const auto& back : dr.removed) {
                    std::vector<Assertion> plus = resulting;
                    plus.push_back(back);
                    KnowledgeBase again(kb.rbox, kb.tbox, plus);
                    maximal = maximal && (entails(again, d) || !kb_consistent(again));
                }
                if (!member || !sound || !maximal) {
                    ok = false;
                    std::printf("  delete disagreement at seed %llu (%s)\n",
                                (unsigned long long)seed, d.text().c_str());
                }
            }
        }

        auto roracle = brute_force_repairs(kb);
        for (const auto& r : ctx.repair(true, 8)) {
            auto resulting = r.resulting_abox();
            bool member = std::find(roracle.begin(), roracle.end(), resulting) != roracle.end();
            bool consistent_after = kb_consistent(KnowledgeBase(kb.rbox, kb.tbox, resulting));
            if (!member || !consistent_after) {
                ok = false;
                std::printf("  repair disagreement at seed %llu\n", (unsigned long long)seed);
            }
        }

        Assertion ins = seed % 2 == 0 ? Assertion::concept_of("A", "a")
                                      : Assertion::role_of("R1", "a", "b");
        EvolutionResult ir = ctx.insert_instance(ins);
        auto ioracle = brute_force_insertions(kb, ins);
        if (ir.status == EvolutionStatus::Ok) {
            auto resulting = ir.resulting_abox();
            bool member = std::find(ioracle.begin(), ioracle.end(), resulting) != ioracle.end();
            bool contains_d = std::binary_search(resulting.begin(), resulting.end(), ins);
            bool consistent_after = kb_consistent(KnowledgeBase(kb.rbox, kb.tbox, resulting));
            if (!member || !contains_d || !consistent_after) {
                ok = false;
                std::printf("  insert disagreement at seed %llu\n", (unsigned long long)seed);
            }
        } else if (!ioracle.empty()) {
            ok = false;
            std::printf("  insert wrongly impossible at seed %llu\n", (unsigned long long)seed);
        }
    }
    double elapsed = ms_since(start);
    ok = ok && elapsed < 300000.0;
    report(4, "oracle-agreement", ok, elapsed);
    CHECK(ok);
}

TEST_CASE("criterion 5: scaling") {
    auto start = Clock::now();
    const std::size_t kRequests = 150;
    std::map<std::size_t, double> atomic_mean;
    for (std::size_t size : {std::size_t(5000), std::size_t(10000), std::size_t(25000),
                             std::size_t(50000)}) {
        KnowledgeBase kb = generate(bench_profile(size, 1));
        EvolutionContext ctx(kb);
        ctx.warm_up();
        SplitMix64 rng(0x5eedu ^ size);
        double total = 0;
        std::size_t atomic_count = 0;
        for (std::size_t i = 0; i < kRequests; ++i) {
            const Assertion& d = kb.abox[rng.below(kb.abox.size())];
            auto t0 = Clock::now();
            EvolutionResult r = ctx.delete_instance(d);
            double wall = ms_since(t0);
            if (r.status == EvolutionStatus::Ok && r.mode == EvolutionMode::ModelBased &&
                r.removed.size() == 1) {
                total += wall;
                ++atomic_count;
            }
        }
        atomic_mean[size] = atomic_count ? total / atomic_count : 0.0;
        std::printf("  size %zu: mean atomic deletion %.3f ms over %zu requests\n", size,
                    atomic_mean[size], atomic_count);
    }
    bool ok = atomic_mean[50000] <= 3.0 * atomic_mean[5000];
    ok = ok && atomic_mean[50000] <= 5000.0;
    double elapsed = ms_since(start);
    ok = ok && elapsed < 900000.0;
    report(5, "scaling", ok, elapsed);
    CHECK(ok);
}

TEST_CASE("criterion 6: termination") {
    auto start = Clock::now();
    KnowledgeBase kb = parse_kb("TBOX\nA [= exists R.A.\nRBOX\ntrans(R).\nABOX\nA(a).\n");
    PreparedProgram prog = ground_prepare(clausify_kb(kb), kb.individuals());
    bool ok = is_satisfiable(prog);
    double elapsed = ms_since(start);
    ok = ok && elapsed < 1000.0;
    report(6, "termination", ok, elapsed);
    CHECK(ok);
}
