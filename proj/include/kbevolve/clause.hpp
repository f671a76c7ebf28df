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
// kbevolve/clause.hpp — DL-clauses
// ============================================================================
//
// An atom is one of
//     B(s)                 concept atom
//     R(s,t)               role atom (always over an atomic role name; an
//                          inverse role is stored with swapped arguments)
//     exists R.B(s)        existential atom, filler an atomic name with a
//     exists R.not B(s)    positive or negative polarity; the role may be
//                          inverted
//     NegB(s), NegR(s,t)   renamed atoms (introduced by the renamer only)
//     ABoxB(s), ABoxR(s,t) ABox-prefixed facts (renamer only)
//     false, Negfalse      nullary atoms used by the repair construction
//
// A DL-clause is head <- body where the head is a disjunction and the body a
// conjunction of atoms; bodies never contain existential atoms. Both sides
// are kept sorted and duplicate-free, so clause equality is set equality.
//
// Clause sets serialize to a line-oriented listing:
//     H1 | H2 <- B1 & B2.
// with `_|_` for an empty head and `TOP` for an empty body.
// ============================================================================

#ifndef KBEVOLVE_CLAUSE_HPP
#define KBEVOLVE_CLAUSE_HPP

#include <cstddef>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "kbevolve/kb.hpp"

namespace kbevolve {

// ── Terms ───────────────────────────────────────────────────────────────────

struct Term {
    enum class Kind { Named, Var, Fresh };
    Kind kind = Kind::Named;
    std::string name;  // Named/Var
    int index = 0;     // Fresh

    static Term named(std::string n) { return Term{Kind::Named, std::move(n), 0}; }
    static Term var(std::string n) { return Term{Kind::Var, std::move(n), 0}; }
    static Term fresh(int i) { return Term{Kind::Fresh, {}, i}; }

    bool is_var() const { return kind == Kind::Var; }

    std::string text() const {
        return kind == Kind::Fresh ? "__f" + std::to_string(index) : name;
    }

    friend bool operator==(const Term&, const Term&) = default;
    friend auto operator<=>(const Term&, const Term&) = default;
};

// ── Atoms ───────────────────────────────────────────────────────────────────

enum class AtomKind {
    Concept,
    Role,
    Exists,
    NegConcept,
    NegRole,
    ABoxConcept,
    ABoxRole,
    False,
    NegFalse,
};

inline bool is_renamed_kind(AtomKind k) {
    return k == AtomKind::NegConcept || k == AtomKind::NegRole ||
           k == AtomKind::ABoxConcept || k == AtomKind::ABoxRole ||
           k == AtomKind::False || k == AtomKind::NegFalse;
}

struct Atom {
    AtomKind kind = AtomKind::Concept;
    std::string pred;  // concept or role name; empty for nullary kinds
    Term s, t;         // t unused for unary kinds; both unused for nullary
    // existential payload
    RoleExpr ex_role;
    std::string ex_filler;
    bool ex_filler_positive = true;

    static Atom concept_atom(std::string p, Term arg) {
        Atom a;
        a.kind = AtomKind::Concept;
        a.pred = std::move(p);
        a.s = std::move(arg);
        return a;
    }
    static Atom role_atom(std::string p, Term s, Term t) {
        Atom a;
        a.kind = AtomKind::Role;
        a.pred = std::move(p);
        a.s = std::move(s);
        a.t = std::move(t);
        return a;
    }
    /// Role atom over a possibly-inverted role; normalizes by argument swap.
    static Atom role_atom(const RoleExpr& r, Term s, Term t) {
        return r.inverted ? role_atom(r.name, std::move(t), std::move(s))
                          : role_atom(r.name, std::move(s), std::move(t));
    }
    static Atom exists_atom(RoleExpr role, std::string filler, bool positive, Term arg) {
        Atom a;
        a.kind = AtomKind::Exists;
        a.s = std::move(arg);
        a.ex_role = std::move(role);
        a.ex_filler = std::move(filler);
        a.ex_filler_positive = positive;
        return a;
    }
    static Atom neg_concept(std::string p, Term arg) {
        Atom a = concept_atom(std::move(p), std::move(arg));
        a.kind = AtomKind::NegConcept;
        return a;
    }
    static Atom neg_role(std::string p, Term s, Term t) {
        Atom a = role_atom(std::move(p), std::move(s), std::move(t));
        a.kind = AtomKind::NegRole;
        return a;
    }
    static Atom abox_concept(std::string p, Term arg) {
        Atom a = concept_atom(std::move(p), std::move(arg));
        a.kind = AtomKind::ABoxConcept;
        return a;
    }
    static Atom abox_role(std::string p, Term s, Term t) {
        Atom a = role_atom(std::move(p), std::move(s), std::move(t));
        a.kind = AtomKind::ABoxRole;
        return a;
    }
    static Atom false_atom() {
        Atom a;
        a.kind = AtomKind::False;
        return a;
    }
    static Atom neg_false() {
        Atom a;
        a.kind = AtomKind::NegFalse;
        return a;
    }

    int arity() const {
        switch (kind) {
            case AtomKind::Role:
            case AtomKind::NegRole:
            case AtomKind::ABoxRole:
                return 2;
            case AtomKind::False:
            case AtomKind::NegFalse:
                return 0;
            default:
                return 1;
        }
    }

    bool ground() const {
        if (arity() >= 1 && s.is_var()) return false;
        if (arity() >= 2 && t.is_var()) return false;
        return true;
    }

    std::string text() const {
        switch (kind) {
            case AtomKind::False:
                return "false";
            case AtomKind::NegFalse:
                return "Negfalse";
            case AtomKind::Exists: {
                std::string r = ex_role.inverted ? "inv(" + ex_role.name + ")" : ex_role.name;
                std::string f = ex_filler_positive ? ex_filler : "not " + ex_filler;
                return "exists " + r + "." + f + "(" + s.text() + ")";
            }
            default: {
                std::string prefix;
                if (kind == AtomKind::NegConcept || kind == AtomKind::NegRole) prefix = "Neg";
                if (kind == AtomKind::ABoxConcept || kind == AtomKind::ABoxRole) prefix = "ABox";
                if (arity() == 2) return prefix + pred + "(" + s.text() + "," + t.text() + ")";
                return prefix + pred + "(" + s.text() + ")";
            }
        }
    }

    friend bool operator==(const Atom&, const Atom&) = default;
    friend auto operator<=>(const Atom&, const Atom&) = default;
};

// ── Symbol extraction ───────────────────────────────────────────────────────

struct SymbolRef {
    enum class Kind { Concept, Role, Exists } kind = Kind::Concept;
    std::string name;       // concept or role name
    std::string text;       // printable token; for existentials the compound
                            // `exists R.B`, which is never a member of any
                            // tracked-symbol set of atomic names
    friend bool operator==(const SymbolRef&, const SymbolRef&) = default;
};

/// sigma: concept/role symbol of an atom, or the compound existential token.
/// Rejects renamed, ABox and false atoms.
inline SymbolRef sigma(const Atom& a) {
    switch (a.kind) {
        case AtomKind::Concept:
            return {SymbolRef::Kind::Concept, a.pred, a.pred};
        case AtomKind::Role:
            return {SymbolRef::Kind::Role, a.pred, a.pred};
        case AtomKind::Exists: {
            std::string r = a.ex_role.inverted ? "inv(" + a.ex_role.name + ")" : a.ex_role.name;
            std::string f = a.ex_filler_positive ? a.ex_filler : "not " + a.ex_filler;
            return {SymbolRef::Kind::Exists, {}, "exists " + r + "." + f};
        }
        default:
            throw std::invalid_argument("sigma: renamed atom kind has no extractable symbol: " +
                                        a.text());
    }
}

// ── Clauses ─────────────────────────────────────────────────────────────────

struct DLClause {
    std::vector<Atom> head;  // sorted, unique
    std::vector<Atom> body;  // sorted, unique

    DLClause() = default;
    DLClause(std::vector<Atom> h, std::vector<Atom> b) : head(std::move(h)), body(std::move(b)) {
        detail::sort_unique(head);
        detail::sort_unique(body);
        for (const auto& a : body)
            if (a.kind == AtomKind::Exists)
                throw std::invalid_argument("DL-clause body cannot contain existential atoms");
    }

    static DLClause fact(Atom a) { return DLClause({std::move(a)}, {}); }

    std::string text() const {
        std::ostringstream os;
        if (head.empty()) {
            os << "_|_";
        } else {
            for (std::size_t i = 0; i < head.size(); ++i) {
                if (i) os << " | ";
                os << head[i].text();
            }
        }
        os << " <- ";
        if (body.empty()) {
            os << "TOP";
        } else {
            for (std::size_t i = 0; i < body.size(); ++i) {
                if (i) os << " & ";
                os << body[i].text();
            }
        }
        os << ".";
        return os.str();
    }

    friend bool operator==(const DLClause&, const DLClause&) = default;
    friend auto operator<=>(const DLClause&, const DLClause&) = default;
};

/// Number of atoms in the clause; empty head (_|_) and empty body (TOP)
/// contribute nothing.
inline std::size_t clause_size(const DLClause& c) { return c.head.size() + c.body.size(); }

/// A clause set with per-clause provenance notes. Insertion order is kept
/// (listings are stable); duplicates are dropped.
struct ClauseSet {
    std::vector<DLClause> clauses;
    std::vector<std::string> provenance;  // parallel to clauses

    bool contains(const DLClause& c) const { return index_.count(c) > 0; }

    void add(DLClause c, std::string note = {}) {
        if (!index_.insert(c).second) return;
        clauses.push_back(std::move(c));
        provenance.push_back(std::move(note));
    }

    void add_all(const ClauseSet& other) {
        for (std::size_t i = 0; i < other.clauses.size(); ++i)
            add(other.clauses[i], other.provenance[i]);
    }

    std::size_t size() const {
        std::size_t n = 0;
        for (const auto& c : clauses) n += clause_size(c);
        return n;
    }

    std::string listing() const {
        std::ostringstream os;
        for (const auto& c : clauses) os << c.text() << "\n";
        return os.str();
    }

    friend bool operator==(const ClauseSet& x, const ClauseSet& y) {
        return x.clauses == y.clauses;
    }

private:
    std::set<DLClause> index_;  // duplicate detection
};

}  // namespace kbevolve

#endif  // KBEVOLVE_CLAUSE_HPP
