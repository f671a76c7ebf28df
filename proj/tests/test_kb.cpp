#include <doctest.h>

#include "kbevolve/generator.hpp"
#include "kbevolve/kb.hpp"

using namespace kbevolve;

TEST_CASE("role inversion is involutive") {
    RoleExpr r{"R", false};
    CHECK(role_inv(r) == RoleExpr{"R", true});
    CHECK(role_inv(RoleExpr{"R", true}) == r);
    CHECK(role_inv(role_inv(r)) == r);
}

TEST_CASE("subrole closure of a single inclusion") {
    RBox rbox;
    rbox.inclusions.push_back({RoleExpr{"R", false}, RoleExpr{"S", false}});
    auto pairs = subrole_closure(rbox);
    auto has = [&](RoleExpr a, RoleExpr b) { return pairs.count({a, b}) > 0; };
    CHECK(has({"R", false}, {"S", false}));
    CHECK(has({"R", true}, {"S", true}));
    CHECK(has({"R", false}, {"R", false}));
    CHECK(has({"S", false}, {"S", false}));
    CHECK(has({"R", true}, {"R", true}));
    CHECK(has({"S", true}, {"S", true}));
    CHECK(!has({"S", false}, {"R", false}));
}

TEST_CASE("subrole closure is transitive and empty for an empty rbox") {
    CHECK(subrole_closure(RBox{}).empty());

    RBox rbox;
    rbox.inclusions.push_back({RoleExpr{"R", false}, RoleExpr{"S", false}});
    rbox.inclusions.push_back({RoleExpr{"S", false}, RoleExpr{"T", false}});
    auto pairs = subrole_closure(rbox);
    CHECK(pairs.count({RoleExpr{"R", false}, RoleExpr{"T", false}}) > 0);
    CHECK(pairs.count({RoleExpr{"R", true}, RoleExpr{"T", true}}) > 0);
}

TEST_CASE("closure properties: idempotence and inverse mirroring") {
    SplitMix64 rng(7);
    for (int iter = 0; iter < 50; ++iter) {
        RBox rbox;
        std::size_t n = rng.below(5);
        for (std::size_t i = 0; i < n; ++i) {
            RoleExpr a{"R" + std::to_string(rng.below(4)), rng.below(2) == 0};
            RoleExpr b{"R" + std::to_string(rng.below(4)), rng.below(2) == 0};
            rbox.inclusions.push_back({a, b});
        }
        auto pairs = subrole_closure(rbox);
        // mirrored under inversion
        for (const auto& [p, q] : pairs) CHECK(pairs.count({role_inv(p), role_inv(q)}) > 0);
        // idempotent: re-closing the closure as declared inclusions adds nothing
        RBox closed;
        for (const auto& [p, q] : pairs) closed.inclusions.push_back({p, q});
        CHECK(subrole_closure(closed) == pairs);
    }
}

TEST_CASE("transitive and simple role queries") {
    RBox rbox;
    rbox.transitive.push_back(RoleExpr{"R", false});
    CHECK(is_transitive(RoleExpr{"R", false}, rbox));
    CHECK(is_transitive(RoleExpr{"R", true}, rbox));  // Trans(Inv(S)) branch
    CHECK(!is_simple(RoleExpr{"R", false}, rbox));

    RBox incl_only;
    incl_only.inclusions.push_back({RoleExpr{"R", false}, RoleExpr{"S", false}});
    CHECK(!is_transitive(RoleExpr{"S", false}, incl_only));
    CHECK(is_simple(RoleExpr{"R", false}, RBox{}));

    // R transitive and R [= S makes S non-simple
    RBox both;
    both.transitive.push_back(RoleExpr{"R", false});
    both.inclusions.push_back({RoleExpr{"R", false}, RoleExpr{"S", false}});
    CHECK(!is_simple(RoleExpr{"S", false}, both));
    CHECK(!is_transitive(RoleExpr{"S", false}, both));
}

TEST_CASE("signature collects exactly the occurring symbols and grows monotonically") {
    KnowledgeBase kb(RBox{},
                     {GCI{Concept::atomic("B"),
                          Concept::exists(RoleExpr{"R", false}, Concept::atomic("C"))}},
                     {Assertion::concept_of("B", "a")});
    auto sig = kb.signature();
    CHECK(sig.concepts == std::set<std::string>{"B", "C"});
    CHECK(sig.roles == std::set<std::string>{"R"});
    CHECK(sig.individuals == std::set<std::string>{"a"});

    KnowledgeBase bigger = kb;
    bigger.abox.push_back(Assertion::role_of("S", "a", "b"));
    bigger.normalize();
    auto sig2 = bigger.signature();
    CHECK(std::includes(sig2.concepts.begin(), sig2.concepts.end(), sig.concepts.begin(),
                        sig.concepts.end()));
    CHECK(std::includes(sig2.roles.begin(), sig2.roles.end(), sig.roles.begin(),
                        sig.roles.end()));
    CHECK(std::includes(sig2.individuals.begin(), sig2.individuals.end(),
                        sig.individuals.begin(), sig.individuals.end()));
}

TEST_CASE("knowledge bases are sets: duplicates collapse, order is canonical") {
    KnowledgeBase a(RBox{}, {}, {Assertion::concept_of("B", "a"), Assertion::concept_of("B", "a")});
    CHECK(a.abox.size() == 1);
    KnowledgeBase b(RBox{}, {},
                    {Assertion::concept_of("C", "a"), Assertion::concept_of("B", "a")});
    KnowledgeBase c(RBox{}, {},
                    {Assertion::concept_of("B", "a"), Assertion::concept_of("C", "a")});
    CHECK(b == c);
}
