/*
 *  Licensed under the Apache License, Version 2.0 (the "License");
 *  you may not use this file except in compliance with the License.
 *  You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 *  Unless required by applicable law or agreed to in writing, software
 *  distributed under the License is distributed on an "AS IS" BASIS,
 *  WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 *  See the License for the specific language governing permissions and
 *  limitations under the License.
 */

// ============================================================================
// kbevolve/generator.hpp — deterministic synthetic knowledge bases
// ============================================================================
//
// The generator produces TBoxes from four axiom forms
//
//     A [= B            subsumption chains (chain-depth x chains)
//     A [= exists R.B   existential axioms over dedicated trigger concepts
//     exists R.A [= B   role-body axioms
//     A and B [= bot    disjointness over a reserved concept pool
//
// and a random ABox over the chain/trigger concepts and roles. Disjoint
// concepts are never asserted (and never derivable), so the generated
// knowledge base is consistent by construction; --inject-inconsistency
// plants a known number of clashing assertion pairs, each repairable by
// removing one assertion.
//
// Identical profiles produce identical knowledge bases, independent of the
// platform (the generator uses its own splitmix64 stream, not std::
// distributions).
// ============================================================================

#ifndef KBEVOLVE_GENERATOR_HPP
#define KBEVOLVE_GENERATOR_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "kbevolve/kb.hpp"

namespace kbevolve {

struct SplitMix64 {
    std::uint64_t state;
    explicit SplitMix64(std::uint64_t seed) : state(seed) {}
    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : next() % n; }
};

struct GeneratorProfile {
    std::uint64_t seed = 1;
    std::size_t n_assertions = 100;
    std::size_t n_concepts = 12;  // chain concepts
    std::size_t n_roles = 3;
    std::size_t n_individuals = 0;  // 0: max(4, n_assertions / 2)
    // TBox shape
    std::size_t chains = 3;
    std::size_t chain_depth = 4;       // concepts per chain => depth-1 GCIs each
    std::size_t exists_axioms = 3;     // A [= exists R.B over trigger concepts
    std::size_t role_body_axioms = 3;  // exists R.A [= B
    std::size_t disjointness = 2;      // A and B [= bot over reserved names
    std::size_t inject_inconsistency = 0;
    // assertion mix in percent; the rest are chain-concept assertions
    std::size_t role_percent = 30;
    std::size_t trigger_percent = 10;

    friend bool operator==(const GeneratorProfile&, const GeneratorProfile&) = default;
};

/// A profile with exactly 50 TBox axioms, used by the scaling benchmark.
inline GeneratorProfile bench_profile(std::size_t n_assertions, std::uint64_t seed = 1) {
    GeneratorProfile p;
    p.seed = seed;
    p.n_assertions = n_assertions;
    p.n_concepts = 25;
    p.n_roles = 4;
    p.chains = 5;
    p.chain_depth = 5;        // 5 * 4 = 20 subsumptions
    p.exists_axioms = 10;     // + 10
    p.role_body_axioms = 10;  // + 10
    p.disjointness = 10;      // + 10 => 50 axioms
    // keep the asserted role graph sparse, in line with concept-heavy
    // real-world ABoxes: requests then touch small components
    p.role_percent = 8;
    p.trigger_percent = 7;
    return p;
}

inline KnowledgeBase generate(const GeneratorProfile& p) {
    SplitMix64 rng(p.seed * 0x9e3779b97f4a7c15ull + 0x853c49e6748fea9bull);

    const std::size_t n_inds =
        p.n_individuals ? p.n_individuals : std::max<std::size_t>(4, p.n_assertions / 2);
    auto concept_name = [](std::size_t i) { return "C" + std::to_string(i + 1); };
    auto trigger_name = [](std::size_t i) { return "E" + std::to_string(i + 1); };
    auto role_name = [](std::size_t i) { return "R" + std::to_string(i + 1); };
    auto ind_name = [](std::size_t i) { return "ind" + std::to_string(i + 1); };

    std::vector<GCI> tbox;
    // subsumption chains over the chain-concept pool
    for (std::size_t c = 0; c < p.chains; ++c) {
        for (std::size_t k = 0; k + 1 < p.chain_depth; ++k) {
            std::size_t from = (c * p.chain_depth + k) % std::max<std::size_t>(1, p.n_concepts);
            std::size_t to = (c * p.chain_depth + k + 1) % std::max<std::size_t>(1, p.n_concepts);
            if (from == to) continue;
            tbox.push_back(
                GCI{Concept::atomic(concept_name(from)), Concept::atomic(concept_name(to))});
        }
    }
    // existential axioms fire only on dedicated trigger concepts, which keeps
    // the number of fresh individuals proportional to the trigger assertions
    for (std::size_t i = 0; i < p.exists_axioms; ++i) {
        std::size_t r = rng.below(std::max<std::size_t>(1, p.n_roles));
        std::size_t b = rng.below(std::max<std::size_t>(1, p.n_concepts));
        tbox.push_back(GCI{Concept::atomic(trigger_name(i)),
                           Concept::exists(RoleExpr{role_name(r), false},
                                           Concept::atomic(concept_name(b)))});
    }
    for (std::size_t i = 0; i < p.role_body_axioms; ++i) {
        // index-derived so the axioms are pairwise distinct
        std::size_t r = i % std::max<std::size_t>(1, p.n_roles);
        std::size_t a = (7 * i + rng.below(2)) % std::max<std::size_t>(1, p.n_concepts);
        std::size_t b = (11 * i + 3) % std::max<std::size_t>(1, p.n_concepts);
        tbox.push_back(GCI{Concept::exists(RoleExpr{role_name(r), false},
                                           Concept::atomic(concept_name(a))),
                           Concept::atomic(concept_name(b))});
    }
    // disjointness over reserved names, never asserted and never derivable
    for (std::size_t i = 0; i < p.disjointness; ++i) {
        tbox.push_back(GCI{Concept::conj(Concept::atomic("Xd" + std::to_string(i + 1)),
                                         Concept::atomic("Yd" + std::to_string(i + 1))),
                           Concept::bottom()});
    }

    std::vector<Assertion> abox;
    std::set<Assertion> seen;
    std::size_t guard = 0;
    while (seen.size() < p.n_assertions && guard < p.n_assertions * 40 + 1000) {
        ++guard;
        std::uint64_t kind = rng.below(100);
        std::size_t concept_share = 100 - std::min<std::size_t>(100, p.role_percent + p.trigger_percent);
        Assertion a;
        if (kind < concept_share || p.n_roles == 0) {
            a = Assertion::concept_of(concept_name(rng.below(std::max<std::size_t>(1, p.n_concepts))),
                                      ind_name(rng.below(n_inds)));
        } else if (kind < concept_share + p.trigger_percent && p.exists_axioms > 0) {
            a = Assertion::concept_of(trigger_name(rng.below(p.exists_axioms)),
                                      ind_name(rng.below(n_inds)));
        } else {
            a = Assertion::role_of(role_name(rng.below(p.n_roles)), ind_name(rng.below(n_inds)),
                                   ind_name(rng.below(n_inds)));
        }
        if (seen.insert(a).second) abox.push_back(a);
    }
    // planted clashes, one per fresh individual, each repairable by one removal
    for (std::size_t i = 0; i < p.inject_inconsistency && p.disjointness > 0; ++i) {
        std::string v = "clash" + std::to_string(i + 1);
        std::size_t d = i % p.disjointness;
        abox.push_back(Assertion::concept_of("Xd" + std::to_string(d + 1), v));
        abox.push_back(Assertion::concept_of("Yd" + std::to_string(d + 1), v));
    }

    return KnowledgeBase(RBox{}, std::move(tbox), std::move(abox));
}

}  // namespace kbevolve

#endif  // KBEVOLVE_GENERATOR_HPP
