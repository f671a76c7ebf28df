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
// kbevolve/renamer.hpp — Neg/ABox renaming and the K*-transformation
// ============================================================================
//
// Given a set S of tracked atomic concepts and roles, the renaming of a
// clause H <- B is the union of four groups:
//
//   (0) the clause itself;
//   (1) the flipped clause: untracked head atoms plus Neg of tracked body
//       atoms form the new head; untracked body atoms plus Neg of tracked
//       head atoms form the new body;
//   (2) one integrity clause  _|_ <- R(x,y) & NegR(x,y)  for every tracked
//       role occurring as a role atom or as the role of a head existential;
//   (3) one integrity clause  _|_ <- D(x) & NegD(x)  for every tracked
//       concept occurring as a concept atom, and for the filler of every
//       head existential whose role is tracked (keyed on the role, even if
//       the filler itself is untracked; a negated filler contributes its
//       atomic name).
//
// Integrity clauses are deduplicated across the whole set. Renaming is
// recoverable: the original clause can be reconstructed from the flipped
// one (unrename below).
//
// K* of a knowledge base is the renaming of Xi(T) w.r.t. S plus one
// ABox-prefixed fact per assertion; the plain ABox facts are not included.
// The ABox facts are inert for the calculus and serve to introduce the
// named individuals into the engine's grounding domain.
//
// falsify() rewrites every empty clause head to the nullary atom `false`,
// which the repair construction tracks like any other symbol.
// ============================================================================

#ifndef KBEVOLVE_RENAMER_HPP
#define KBEVOLVE_RENAMER_HPP

#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "kbevolve/clause.hpp"
#include "kbevolve/clausifier.hpp"
#include "kbevolve/kb.hpp"

namespace kbevolve {

struct TrackedSymbolSet {
    std::set<std::string> concepts;
    std::set<std::string> roles;
    bool include_false = false;

    bool empty() const { return concepts.empty() && roles.empty() && !include_false; }

    friend bool operator==(const TrackedSymbolSet&, const TrackedSymbolSet&) = default;
};

// ── Renaming functions ──────────────────────────────────────────────────────

/// Neg(A(a)) = NegA(a), Neg(R(a,b)) = NegR(a,b). Injective; rejects
/// existential, ABox, Neg and false atoms.
inline Atom neg(const Atom& a) {
    switch (a.kind) {
        case AtomKind::Concept:
            return Atom::neg_concept(a.pred, a.s);
        case AtomKind::Role:
            return Atom::neg_role(a.pred, a.s, a.t);
        default:
            throw std::invalid_argument("neg: not a concept or role atom: " + a.text());
    }
}

inline std::string neg_symbol(const std::string& s) { return "Neg" + s; }

inline Atom neg(const Assertion& a) {
    return a.is_role ? Atom::neg_role(a.pred, Term::named(a.a), Term::named(a.b))
                     : Atom::neg_concept(a.pred, Term::named(a.a));
}

inline std::vector<Atom> neg_set(const std::vector<Assertion>& assertions) {
    std::vector<Atom> out;
    out.reserve(assertions.size());
    for (const auto& a : assertions) out.push_back(neg(a));
    return out;
}

/// ABox(A(a)) = ABoxA(a), ABox(R(a,b)) = ABoxR(a,b).
inline Atom abox_atom(const Assertion& a) {
    return a.is_role ? Atom::abox_role(a.pred, Term::named(a.a), Term::named(a.b))
                     : Atom::abox_concept(a.pred, Term::named(a.a));
}

namespace detail {

inline bool tracks(const TrackedSymbolSet& s, const Atom& a) {
    switch (a.kind) {
        case AtomKind::Concept:
            return s.concepts.count(a.pred) > 0;
        case AtomKind::Role:
            return s.roles.count(a.pred) > 0;
        case AtomKind::Exists:
            return false;  // the compound token is never an atomic symbol
        case AtomKind::False:
            return s.include_false;
        default:
            throw std::invalid_argument("rename: input clause already contains renamed atoms: " +
                                        a.text());
    }
}

inline Atom neg_any(const Atom& a) {
    if (a.kind == AtomKind::False) return Atom::neg_false();
    return neg(a);
}

inline DLClause concept_integrity(const std::string& d) {
    Term x = Term::var("x");
    return DLClause({}, {Atom::concept_atom(d, x), Atom::neg_concept(d, x)});
}

inline DLClause role_integrity(const std::string& r) {
    Term x = Term::var("x"), y = Term::var("y");
    return DLClause({}, {Atom::role_atom(r, x, y), Atom::neg_role(r, x, y)});
}

inline DLClause false_integrity() {
    return DLClause({}, {Atom::false_atom(), Atom::neg_false()});
}

}  // namespace detail

// ── Clause renaming ─────────────────────────────────────────────────────────

namespace detail {

struct RenamedClauses {
    std::vector<DLClause> main;       // groups (0) and (1)
    std::vector<DLClause> integrity;  // groups (2) and (3)
};

inline RenamedClauses rename_groups(const DLClause& c, const TrackedSymbolSet& s) {
    RenamedClauses out;
    out.main.push_back(c);  // group (0)

    // group (1): flip tracked atoms across the arrow
    std::vector<Atom> head, body;
    for (const auto& a : c.head) {
        if (tracks(s, a))
            body.push_back(neg_any(a));
        else
            head.push_back(a);
    }
    for (const auto& b : c.body) {
        if (tracks(s, b))
            head.push_back(neg_any(b));
        else
            body.push_back(b);
    }
    DLClause flipped(std::move(head), std::move(body));
    if (!(flipped == c)) out.main.push_back(std::move(flipped));

    // groups (2) and (3): integrity constraints
    std::set<std::string> int_roles, int_concepts;
    bool int_false = false;
    auto scan = [&](const Atom& a, bool in_head) {
        switch (a.kind) {
            case AtomKind::Concept:
                if (s.concepts.count(a.pred)) int_concepts.insert(a.pred);
                break;
            case AtomKind::Role:
                if (s.roles.count(a.pred)) int_roles.insert(a.pred);
                break;
            case AtomKind::Exists:
                if (in_head && s.roles.count(a.ex_role.name)) {
                    int_roles.insert(a.ex_role.name);
                    int_concepts.insert(a.ex_filler);
                }
                break;
            case AtomKind::False:
                if (s.include_false) int_false = true;
                break;
            default:
                break;  // unreachable: tracks() above already rejected
        }
    };
    for (const auto& a : c.head) scan(a, true);
    for (const auto& b : c.body) scan(b, false);

    for (const auto& r : int_roles) out.integrity.push_back(role_integrity(r));
    for (const auto& d : int_concepts) out.integrity.push_back(concept_integrity(d));
    if (int_false) out.integrity.push_back(false_integrity());
    return out;
}

}  // namespace detail

/// Groups (0)-(3) for a single clause, duplicates collapsed.
inline std::vector<DLClause> rename_clause(const DLClause& c, const TrackedSymbolSet& s) {
    auto groups = detail::rename_groups(c, s);
    std::vector<DLClause> out;
    for (auto* part : {&groups.main, &groups.integrity})
        for (auto& cl : *part)
            if (std::find(out.begin(), out.end(), cl) == out.end()) out.push_back(std::move(cl));
    return out;
}

/// R_S of a clause set: union of the per-clause renamings, deduplicated.
/// Originals and flipped clauses come first in input order, integrity
/// clauses after them.
inline ClauseSet rename_set(const ClauseSet& dl, const TrackedSymbolSet& s) {
    ClauseSet out;
    ClauseSet integrity;
    for (std::size_t i = 0; i < dl.clauses.size(); ++i) {
        auto groups = detail::rename_groups(dl.clauses[i], s);
        for (auto& cl : groups.main) out.add(std::move(cl), dl.provenance[i]);
        for (auto& cl : groups.integrity) integrity.add(std::move(cl), dl.provenance[i]);
    }
    out.add_all(integrity);
    return out;
}

/// Reconstructs the original clause from its group-(1) flipped form. The
/// composition unrename(flip(c)) is the identity; renamed kinds identify
/// themselves, so the tracked set is not needed.
inline DLClause unrename(const DLClause& flipped) {
    auto un_neg = [](const Atom& a) -> Atom {
        switch (a.kind) {
            case AtomKind::NegConcept:
                return Atom::concept_atom(a.pred, a.s);
            case AtomKind::NegRole:
                return Atom::role_atom(a.pred, a.s, a.t);
            case AtomKind::NegFalse:
                return Atom::false_atom();
            default:
                throw std::invalid_argument("unrename: not a Neg atom: " + a.text());
        }
    };
    std::vector<Atom> head, body;
    for (const auto& a : flipped.body) {
        if (a.kind == AtomKind::NegConcept || a.kind == AtomKind::NegRole ||
            a.kind == AtomKind::NegFalse)
            head.push_back(un_neg(a));
        else
            body.push_back(a);
    }
    for (const auto& a : flipped.head) {
        if (a.kind == AtomKind::NegConcept || a.kind == AtomKind::NegRole ||
            a.kind == AtomKind::NegFalse)
            body.push_back(un_neg(a));
        else
            head.push_back(a);
    }
    return DLClause(std::move(head), std::move(body));
}

// ── Tracked-symbol selection ────────────────────────────────────────────────

enum class TrackedMode { AboxOnly, AboxAndTbox };

/// AboxOnly collects the symbols of the ABox assertions; AboxAndTbox also
/// collects the symbols of the TBox clause set (including fresh names and
/// existential components). Extras are unioned in.
inline TrackedSymbolSet tracked_symbols(const KnowledgeBase& kb, TrackedMode mode,
                                        const std::vector<SymbolRef>& extras = {},
                                        bool include_false = false) {
    TrackedSymbolSet s;
    s.include_false = include_false;
    for (const auto& a : kb.abox)
        (a.is_role ? s.roles : s.concepts).insert(a.pred);
    if (mode == TrackedMode::AboxAndTbox) {
        ClauseSet xt = clausify_tbox(kb.tbox, kb.rbox);
        for (const auto& c : xt.clauses) {
            auto visit = [&](const Atom& a) {
                switch (a.kind) {
                    case AtomKind::Concept:
                        s.concepts.insert(a.pred);
                        break;
                    case AtomKind::Role:
                        s.roles.insert(a.pred);
                        break;
                    case AtomKind::Exists:
                        s.roles.insert(a.ex_role.name);
                        s.concepts.insert(a.ex_filler);
                        break;
                    default:
                        break;
                }
            };
            for (const auto& a : c.head) visit(a);
            for (const auto& a : c.body) visit(a);
        }
    }
    for (const auto& e : extras) {
        switch (e.kind) {
            case SymbolRef::Kind::Concept:
                s.concepts.insert(e.name);
                break;
            case SymbolRef::Kind::Role:
                s.roles.insert(e.name);
                break;
            case SymbolRef::Kind::Exists:
                throw std::invalid_argument(
                    "tracked_symbols: compound existential tokens cannot be tracked");
        }
    }
    return s;
}

// ── K* and the false substitution ───────────────────────────────────────────

/// K* from a precomputed Xi(T): R_S(Xi(T)) plus one ABox fact per assertion.
inline ClauseSet kstar_from(const ClauseSet& xi_tbox, const std::vector<Assertion>& abox,
                            const TrackedSymbolSet& s) {
    ClauseSet out = rename_set(xi_tbox, s);
    for (const auto& a : abox) out.add(DLClause::fact(abox_atom(a)), a.text());
    return out;
}

inline ClauseSet kstar(const KnowledgeBase& kb, const TrackedSymbolSet& s) {
    return kstar_from(clausify_tbox(kb.tbox, kb.rbox), kb.abox, s);
}

/// Replaces every empty clause head by the nullary atom `false`. Idempotent.
inline ClauseSet falsify(const ClauseSet& dl) {
    ClauseSet out;
    for (std::size_t i = 0; i < dl.clauses.size(); ++i) {
        DLClause c = dl.clauses[i];
        if (c.head.empty()) c = DLClause({Atom::false_atom()}, std::move(c.body));
        out.add(std::move(c), dl.provenance[i]);
    }
    return out;
}

}  // namespace kbevolve

#endif  // KBEVOLVE_RENAMER_HPP
