#include <doctest.h>

#include "kbevolve/evolution.hpp"
#include "kbevolve/generator.hpp"
#include "kbevolve/parser.hpp"

using namespace kbevolve;

TEST_CASE("identical profiles produce byte-identical knowledge bases") {
    GeneratorProfile p;
    p.seed = 1;
    p.n_assertions = 100;
    KnowledgeBase a = generate(p);
    KnowledgeBase b = generate(p);
    CHECK(a == b);
    CHECK(serialize_kb(a) == serialize_kb(b));

    GeneratorProfile q = p;
    q.seed = 2;
    CHECK(serialize_kb(generate(q)) != serialize_kb(a));
}

TEST_CASE("requested assertion counts are met") {
    for (std::size_t n : {0u, 1u, 57u, 400u}) {
        GeneratorProfile p;
        p.seed = 9;
        p.n_assertions = n;
        CHECK(generate(p).abox.size() == n);
    }
}

TEST_CASE("generated knowledge bases are consistent by construction") {
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
        GeneratorProfile p;
        p.seed = seed;
        p.n_assertions = 60;
        KnowledgeBase kb = generate(p);
        CHECK(tbox_consistent(kb));
        CHECK(kb_consistent(kb));
    }
}

TEST_CASE("planted inconsistencies are detected and repaired within the bound") {
    GeneratorProfile p;
    p.seed = 4;
    p.n_assertions = 30;
    p.inject_inconsistency = 3;
    KnowledgeBase kb = generate(p);
    CHECK(kb.abox.size() == 36);  // 30 + 3 planted pairs
    CHECK(tbox_consistent(kb));
    CHECK(!kb_consistent(kb));
    auto results = repair(kb);
    REQUIRE(results.size() == 1);
    CHECK(results[0].removed.size() <= 3);
    CHECK(kb_consistent(KnowledgeBase(kb.rbox, kb.tbox, results[0].resulting_abox())));
}

TEST_CASE("the bench profile has exactly fifty TBox axioms") {
    KnowledgeBase kb = generate(bench_profile(500));
    CHECK(kb.tbox.size() == 50);
    CHECK(kb.abox.size() == 500);
    CHECK(kb_consistent(kb));
}

TEST_CASE("generated knowledge bases round-trip through the parser") {
    GeneratorProfile p;
    p.seed = 123;
    p.n_assertions = 80;
    KnowledgeBase kb = generate(p);
    CHECK(parse_kb(serialize_kb(kb)) == kb);
}
