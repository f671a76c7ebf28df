// Random knowledge bases for property tests. Sizes stay inside the bounds
// the brute-force oracles can handle.
#ifndef KBEVOLVE_TESTS_RANDOM_KB_HPP
#define KBEVOLVE_TESTS_RANDOM_KB_HPP

#include <string>
#include <vector>

#include "kbevolve/generator.hpp"
#include "kbevolve/kb.hpp"

namespace kbtest {

using kbevolve::Assertion;
using kbevolve::Concept;
using kbevolve::GCI;
using kbevolve::KnowledgeBase;
using kbevolve::RBox;
using kbevolve::RoleExpr;
using kbevolve::SplitMix64;

struct RandomKbParams {
    std::size_t n_concepts = 4;
    std::size_t n_roles = 2;
    std::size_t n_individuals = 3;
    std::size_t max_gcis = 4;
    std::size_t max_assertions = 6;
    std::size_t max_depth = 2;
    bool allow_exists = true;
    bool allow_forall = true;
    bool allow_role_inclusions = true;
    bool allow_transitivity = false;
};

inline std::string concept_name(std::size_t i) { return std::string(1, char('A' + i)); }
inline std::string role_name(std::size_t i) { return "R" + std::to_string(i + 1); }
inline std::string ind_name(std::size_t i) { return std::string(1, char('a' + i)); }

inline RoleExpr random_role(SplitMix64& rng, const RandomKbParams& p) {
    return RoleExpr{role_name(rng.below(p.n_roles)), rng.below(4) == 0};
}

// A random concept in negation normal form when negative_literals_only is
// set; existential-free generation keeps foralls out of negative positions
// by never negating a non-literal.
inline Concept random_concept(SplitMix64& rng, const RandomKbParams& p, std::size_t depth,
                              bool literals_only) {
    std::size_t pick = rng.below(literals_only || depth == 0 ? 3 : 8);
    switch (pick) {
        case 0:
            return Concept::atomic(concept_name(rng.below(p.n_concepts)));
        case 1:
            return Concept::negation(Concept::atomic(concept_name(rng.below(p.n_concepts))));
        case 2:
            return rng.below(6) == 0 ? (rng.below(2) ? Concept::top() : Concept::bottom())
                                     : Concept::atomic(concept_name(rng.below(p.n_concepts)));
        case 3:
            return Concept::conj(random_concept(rng, p, depth - 1, literals_only),
                                 random_concept(rng, p, depth - 1, literals_only));
        case 4:
            return Concept::disj(random_concept(rng, p, depth - 1, literals_only),
                                 random_concept(rng, p, depth - 1, literals_only));
        case 5:
            if (p.allow_exists)
                return Concept::exists(random_role(rng, p),
                                       random_concept(rng, p, depth - 1, literals_only));
            return Concept::atomic(concept_name(rng.below(p.n_concepts)));
        default:
            if (p.allow_forall)
                return Concept::forall(random_role(rng, p),
                                       random_concept(rng, p, depth - 1, literals_only));
            return Concept::atomic(concept_name(rng.below(p.n_concepts)));
    }
}

/// Existential-free: left sides avoid forall (its negation would introduce
/// an existential), right sides avoid exists.
inline GCI random_existential_free_gci(SplitMix64& rng, const RandomKbParams& p) {
    RandomKbParams lhs_p = p;
    lhs_p.allow_exists = true;   // not exists X on the left is a forall
    lhs_p.allow_forall = false;
    RandomKbParams rhs_p = p;
    rhs_p.allow_exists = false;
    rhs_p.allow_forall = true;
    return GCI{random_concept(rng, lhs_p, p.max_depth, false),
               random_concept(rng, rhs_p, p.max_depth, false)};
}

inline GCI random_gci(SplitMix64& rng, const RandomKbParams& p) {
    return GCI{random_concept(rng, p, p.max_depth, false),
               random_concept(rng, p, p.max_depth, false)};
}

inline KnowledgeBase random_kb(std::uint64_t seed, const RandomKbParams& p,
                               bool existential_free) {
    SplitMix64 rng(seed * 0x2545f4914f6cdd1dull + 1);
    std::vector<GCI> tbox;
    std::size_t n_gcis = rng.below(p.max_gcis + 1);
    for (std::size_t i = 0; i < n_gcis; ++i)
        tbox.push_back(existential_free ? random_existential_free_gci(rng, p)
                                        : random_gci(rng, p));
    RBox rbox;
    if (p.allow_role_inclusions && rng.below(2) == 0) {
        std::size_t n = rng.below(3);
        for (std::size_t i = 0; i < n; ++i)
            rbox.inclusions.push_back({random_role(rng, p), random_role(rng, p)});
    }
    if (p.allow_transitivity && rng.below(3) == 0)
        rbox.transitive.push_back(random_role(rng, p));
    std::vector<Assertion> abox;
    std::size_t n_assert = rng.below(p.max_assertions + 1);
    for (std::size_t i = 0; i < n_assert; ++i) {
        if (rng.below(100) < 65 || p.n_roles == 0)
            abox.push_back(Assertion::concept_of(concept_name(rng.below(p.n_concepts)),
                                                 ind_name(rng.below(p.n_individuals))));
        else
            abox.push_back(Assertion::role_of(role_name(rng.below(p.n_roles)),
                                              ind_name(rng.below(p.n_individuals)),
                                              ind_name(rng.below(p.n_individuals))));
    }
    return KnowledgeBase(std::move(rbox), std::move(tbox), std::move(abox));
}

}  // namespace kbtest

#endif
