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
// kbevolve/clausifier.hpp — translation of a knowledge base into DL-clauses
// ============================================================================
//
// Pipeline for a TBox:
//
//   1. transitivity elimination: for every forall R.C occurring in the
//      NNF of an axiom and every transitive S [=* R, a fresh concept X
//      is introduced together with
//          forall R.C [= forall S.X,   X [= forall S.X,   X [= C
//      after which Trans axioms can be dropped;
//   2. axiom splitting: C [= D1 and D2 becomes C [= D1, C [= D2, and
//      C1 or C2 [= D becomes C1 [= D, C2 [= D;
//   3. per remaining axiom C [= D the disjunction nnf(not C or D) is
//      clausified; non-literal fillers and conjunctive disjuncts get fresh
//      names (__q_1, __q_2, ... in axiom order), keeping the output
//      polynomial in the input;
//   4. each disjunction becomes one DL-clause: negated atomic disjuncts go
//      to the body, atomic and existential disjuncts to the head, and a
//      disjunct forall R.F contributes R(x,y) to the body with F placed at
//      y on the appropriate side.
//
// Role inclusions clausify to S(x,y) <- R(x,y) with argument swaps for
// inverses and are part of the TBox clause set. The ABox clausifies to one
// fact per assertion.
//
// Everything here is pure; fresh names are deterministic given the input.
// ============================================================================

#ifndef KBEVOLVE_CLAUSIFIER_HPP
#define KBEVOLVE_CLAUSIFIER_HPP

#include <deque>
#include <map>
#include <string>
#include <vector>

#include "kbevolve/clause.hpp"
#include "kbevolve/kb.hpp"
#include "kbevolve/parser.hpp"

namespace kbevolve {

// ── Negation normal form ────────────────────────────────────────────────────

/// Pushes negation down to atomic concepts. Logically equivalent to the
/// input.
inline Concept nnf(const Concept& c) {
    switch (c.kind()) {
        case ConceptKind::Top:
        case ConceptKind::Bottom:
        case ConceptKind::Atomic:
            return c;
        case ConceptKind::And:
            return Concept::conj(nnf(c.lhs()), nnf(c.rhs()));
        case ConceptKind::Or:
            return Concept::disj(nnf(c.lhs()), nnf(c.rhs()));
        case ConceptKind::Exists:
            return Concept::exists(c.role(), nnf(c.child()));
        case ConceptKind::Forall:
            return Concept::forall(c.role(), nnf(c.child()));
        case ConceptKind::Not: {
            Concept inner = c.child();
            switch (inner.kind()) {
                case ConceptKind::Top:
                    return Concept::bottom();
                case ConceptKind::Bottom:
                    return Concept::top();
                case ConceptKind::Atomic:
                    return c;
                case ConceptKind::Not:
                    return nnf(inner.child());
                case ConceptKind::And:
                    return Concept::disj(nnf(Concept::negation(inner.lhs())),
                                         nnf(Concept::negation(inner.rhs())));
                case ConceptKind::Or:
                    return Concept::conj(nnf(Concept::negation(inner.lhs())),
                                         nnf(Concept::negation(inner.rhs())));
                case ConceptKind::Exists:
                    return Concept::forall(inner.role(), nnf(Concept::negation(inner.child())));
                case ConceptKind::Forall:
                    return Concept::exists(inner.role(), nnf(Concept::negation(inner.child())));
            }
        }
    }
    return c;
}

namespace detail {

/// Deterministic source of reserved fresh concept names.
struct FreshNamer {
    int counter = 0;
    std::string next() { return "__q_" + std::to_string(++counter); }
};

inline void collect_foralls(const Concept& c, std::vector<Concept>& out) {
    switch (c.kind()) {
        case ConceptKind::Forall:
            out.push_back(c);
            collect_foralls(c.child(), out);
            return;
        case ConceptKind::Exists:
        case ConceptKind::Not:
            collect_foralls(c.child(), out);
            return;
        case ConceptKind::And:
        case ConceptKind::Or:
            collect_foralls(c.lhs(), out);
            collect_foralls(c.rhs(), out);
            return;
        default:
            return;
    }
}

}  // namespace detail

// ── Transitivity elimination ────────────────────────────────────────────────

/// Returns the input TBox plus, for every forall R.C occurring (after NNF)
/// and every transitive S with S [=* R, the axioms
///     forall R.C [= forall S.X,  X [= forall S.X,  X [= C
/// over a fresh concept X. The output makes no use of Trans axioms; it is
/// satisfiability-equivalent to the input over the original signature.
inline std::vector<GCI> eliminate_transitivity(const std::vector<GCI>& tbox, const RBox& rbox,
                                               detail::FreshNamer* namer = nullptr) {
    detail::FreshNamer local;
    if (!namer) namer = &local;
    std::vector<GCI> out = tbox;
    if (rbox.transitive.empty()) return out;

    SubroleClosure cl(rbox);
    std::vector<RoleExpr> candidates;
    for (const auto& r : cl.universe())
        if (is_transitive(r, rbox)) candidates.push_back(r);
    if (candidates.empty()) return out;

    std::vector<Concept> foralls;
    for (const auto& g : tbox)
        detail::collect_foralls(nnf(Concept::disj(Concept::negation(g.lhs), g.rhs)), foralls);
    detail::sort_unique(foralls);

    // one fresh concept per (S, C) pair, shared across universals
    std::map<std::pair<RoleExpr, Concept>, Concept> fresh;
    for (const auto& univ : foralls) {
        const RoleExpr& r = univ.role();
        Concept filler = univ.child();
        for (const auto& s : candidates) {
            if (!cl.subsumed(s, r)) continue;
            auto key = std::make_pair(s, filler);
            auto it = fresh.find(key);
            if (it == fresh.end())
                it = fresh.emplace(key, Concept::atomic(namer->next())).first;
            const Concept& x = it->second;
            out.push_back(GCI{univ, Concept::forall(s, x)});
            out.push_back(GCI{x, Concept::forall(s, x)});
            out.push_back(GCI{x, filler});
        }
    }
    detail::sort_unique(out);
    return out;
}

// ── Structural transformation ───────────────────────────────────────────────

namespace detail {

struct Clausifier {
    FreshNamer& namer;
    ClauseSet& out;
    std::deque<std::pair<Concept, Concept>> work;  // inclusions left to do
    std::string note;

    void axiom(const Concept& lhs, const Concept& rhs, std::string n) {
        note = std::move(n);
        work.emplace_back(nnf(lhs), nnf(rhs));
        while (!work.empty()) {
            auto [l, r] = work.front();
            work.pop_front();
            if (r.kind() == ConceptKind::And) {  // C [= D1 and D2 splits
                work.emplace_front(l, r.rhs());
                work.emplace_front(l, r.lhs());
                continue;
            }
            if (l.kind() == ConceptKind::Or) {  // C1 or C2 [= D splits
                work.emplace_front(l.rhs(), r);
                work.emplace_front(l.lhs(), r);
                continue;
            }
            clausify_disjunction(nnf(Concept::disj(Concept::negation(l), r)));
        }
    }

    /// Names a complex subconcept: replaces it by a fresh atomic concept Q
    /// whose defining inclusion Q [= f is queued.
    std::string name_subconcept(const Concept& f) {
        std::string q = namer.next();
        work.emplace_back(Concept::atomic(q), f);
        return q;
    }

    void clausify_disjunction(const Concept& dis) {
        std::vector<Concept> disjuncts;
        flatten_or(dis, disjuncts);

        std::vector<Atom> head, body;
        int var_counter = 0;
        Term x = Term::var("x");

        auto forall_var = [&]() {
            static const char* names[] = {"y", "z", "w"};
            int i = var_counter++;
            return Term::var(i < 3 ? names[i] : "y" + std::to_string(i + 1));
        };

        for (const auto& d : disjuncts) {
            switch (d.kind()) {
                case ConceptKind::Top:
                    return;  // tautology, no clause
                case ConceptKind::Bottom:
                    break;  // contributes nothing
                case ConceptKind::Atomic:
                    head.push_back(Atom::concept_atom(d.name(), x));
                    break;
                case ConceptKind::Not:
                    // NNF: the child is atomic
                    body.push_back(Atom::concept_atom(d.child().name(), x));
                    break;
                case ConceptKind::Exists: {
                    Concept f = d.child();
                    if (f.kind() == ConceptKind::Bottom) break;  // exists R.bot is false
                    if (f.kind() == ConceptKind::Atomic) {
                        head.push_back(Atom::exists_atom(d.role(), f.name(), true, x));
                    } else if (f.kind() == ConceptKind::Not &&
                               f.child().kind() == ConceptKind::Atomic) {
                        head.push_back(Atom::exists_atom(d.role(), f.child().name(), false, x));
                    } else {
                        head.push_back(Atom::exists_atom(d.role(), name_subconcept(f), true, x));
                    }
                    break;
                }
                case ConceptKind::Forall: {
                    Concept f = d.child();
                    if (f.kind() == ConceptKind::Top) return;  // forall R.top is true
                    Term y = forall_var();
                    body.push_back(Atom::role_atom(d.role(), x, y));
                    if (f.kind() == ConceptKind::Bottom) break;  // no R-successor allowed
                    if (f.kind() == ConceptKind::Atomic) {
                        head.push_back(Atom::concept_atom(f.name(), y));
                    } else if (f.kind() == ConceptKind::Not &&
                               f.child().kind() == ConceptKind::Atomic) {
                        body.push_back(Atom::concept_atom(f.child().name(), y));
                    } else {
                        head.push_back(Atom::concept_atom(name_subconcept(f), y));
                    }
                    break;
                }
                case ConceptKind::And:
                    head.push_back(Atom::concept_atom(name_subconcept(d), x));
                    break;
                case ConceptKind::Or:
                    break;  // unreachable: flattened
            }
        }
        out.add(DLClause(std::move(head), std::move(body)), note);
    }

    static void flatten_or(const Concept& c, std::vector<Concept>& out) {
        if (c.kind() == ConceptKind::Or) {
            flatten_or(c.lhs(), out);
            flatten_or(c.rhs(), out);
        } else {
            out.push_back(c);
        }
    }
};

}  // namespace detail

// ── Public operations ───────────────────────────────────────────────────────

/// Xi(T): DL-clauses for the TBox and RBox. Applies transitivity elimination
/// first; role inclusions are emitted as part of the result.
inline ClauseSet clausify_tbox(const std::vector<GCI>& tbox, const RBox& rbox) {
    detail::FreshNamer namer;
    ClauseSet out;
    std::vector<GCI> flat = eliminate_transitivity(tbox, rbox, &namer);
    detail::Clausifier cf{namer, out, {}, {}};
    for (const auto& g : flat)
        cf.axiom(g.lhs, g.rhs, concept_text(g.lhs) + " [= " + concept_text(g.rhs));
    for (const auto& ri : rbox.inclusions) {
        Term x = Term::var("x"), y = Term::var("y");
        out.add(DLClause({Atom::role_atom(ri.super, x, y)}, {Atom::role_atom(ri.sub, x, y)}),
                role_text(ri.sub) + " [= " + role_text(ri.super));
    }
    return out;
}

/// Xi(A): one fact clause per assertion.
inline ClauseSet clausify_abox(const std::vector<Assertion>& abox) {
    ClauseSet out;
    for (const auto& a : abox) {
        Atom atom = a.is_role ? Atom::role_atom(a.pred, Term::named(a.a), Term::named(a.b))
                              : Atom::concept_atom(a.pred, Term::named(a.a));
        out.add(DLClause::fact(std::move(atom)), a.text());
    }
    return out;
}

/// Xi(K) = Xi(T) u Xi(A).
inline ClauseSet clausify_kb(const KnowledgeBase& kb) {
    ClauseSet out = clausify_tbox(kb.tbox, kb.rbox);
    out.add_all(clausify_abox(kb.abox));
    return out;
}

}  // namespace kbevolve

#endif  // KBEVOLVE_CLAUSIFIER_HPP
