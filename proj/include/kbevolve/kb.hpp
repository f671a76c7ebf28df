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
// kbevolve/kb.hpp — immutable data model for SHI knowledge bases
// ============================================================================
//
//   RoleExpr       atomic role name + inversion flag
//   Concept        shared immutable tree: top | bot | A | not C | C and D |
//                  C or D | exists R.C | forall R.C
//   RBox           role inclusions + transitivity declarations
//   GCI / TBox     general concept inclusions
//   Assertion      A(a) or R(a,b), atomic predicates only
//   KnowledgeBase  (RBox, TBox, ABox); axioms and assertions are kept as
//                  sorted, duplicate-free vectors, so value equality is
//                  set equality and iteration order is canonical.
//
// All values are immutable after construction and safe to share across
// threads.
// ============================================================================

#ifndef KBEVOLVE_KB_HPP
#define KBEVOLVE_KB_HPP

#include <algorithm>
#include <compare>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace kbevolve {

// ── Roles ───────────────────────────────────────────────────────────────────

struct RoleExpr {
    std::string name;
    bool inverted = false;

    friend bool operator==(const RoleExpr&, const RoleExpr&) = default;
    friend auto operator<=>(const RoleExpr&, const RoleExpr&) = default;
};

/// Inv(R) = R-, Inv(R-) = R. Involutive.
inline RoleExpr role_inv(RoleExpr r) {
    r.inverted = !r.inverted;
    return r;
}

// ── Concepts ────────────────────────────────────────────────────────────────

enum class ConceptKind { Top, Bottom, Atomic, Not, And, Or, Exists, Forall };

class Concept {
public:
    Concept() : Concept(top()) {}

    static Concept top()    { return Concept(make(ConceptKind::Top)); }
    static Concept bottom() { return Concept(make(ConceptKind::Bottom)); }
    static Concept atomic(std::string name) {
        auto n = make(ConceptKind::Atomic);
        n->name = std::move(name);
        return Concept(std::move(n));
    }
    static Concept negation(Concept c) {
        auto n = make(ConceptKind::Not);
        n->a = c.node_;
        return Concept(std::move(n));
    }
    static Concept conj(Concept l, Concept r) {
        auto n = make(ConceptKind::And);
        n->a = l.node_;
        n->b = r.node_;
        return Concept(std::move(n));
    }
    static Concept disj(Concept l, Concept r) {
        auto n = make(ConceptKind::Or);
        n->a = l.node_;
        n->b = r.node_;
        return Concept(std::move(n));
    }
    static Concept exists(RoleExpr role, Concept filler) {
        auto n = make(ConceptKind::Exists);
        n->role = std::move(role);
        n->a = filler.node_;
        return Concept(std::move(n));
    }
    static Concept forall(RoleExpr role, Concept filler) {
        auto n = make(ConceptKind::Forall);
        n->role = std::move(role);
        n->a = filler.node_;
        return Concept(std::move(n));
    }

    ConceptKind kind() const { return node_->kind; }
    const std::string& name() const { return node_->name; }
    const RoleExpr& role() const { return node_->role; }
    Concept lhs() const { return Concept(node_->a); }        // And/Or left
    Concept rhs() const { return Concept(node_->b); }        // And/Or right
    Concept child() const { return Concept(node_->a); }      // Not/Exists/Forall

    friend int compare(const Concept& x, const Concept& y) {
        if (x.node_ == y.node_) return 0;
        if (x.kind() != y.kind()) return x.kind() < y.kind() ? -1 : 1;
        switch (x.kind()) {
            case ConceptKind::Top:
            case ConceptKind::Bottom:
                return 0;
            case ConceptKind::Atomic:
                return x.name().compare(y.name());
            case ConceptKind::Not: {
                return compare(x.child(), y.child());
            }
            case ConceptKind::And:
            case ConceptKind::Or: {
                int c = compare(x.lhs(), y.lhs());
                return c != 0 ? c : compare(x.rhs(), y.rhs());
            }
            case ConceptKind::Exists:
            case ConceptKind::Forall: {
                if (x.role() != y.role()) return x.role() < y.role() ? -1 : 1;
                return compare(x.child(), y.child());
            }
        }
        return 0;
    }
    friend bool operator==(const Concept& x, const Concept& y) { return compare(x, y) == 0; }
    friend bool operator<(const Concept& x, const Concept& y) { return compare(x, y) < 0; }

private:
    struct Node {
        ConceptKind kind = ConceptKind::Top;
        std::string name;
        RoleExpr role;
        std::shared_ptr<const Node> a, b;
    };
    using NodePtr = std::shared_ptr<const Node>;

    static std::shared_ptr<Node> make(ConceptKind k) {
        auto n = std::make_shared<Node>();
        n->kind = k;
        return n;
    }
    explicit Concept(NodePtr n) : node_(std::move(n)) {}

    NodePtr node_;
};

// ── Axioms and assertions ───────────────────────────────────────────────────

struct GCI {
    Concept lhs, rhs;

    friend bool operator==(const GCI& x, const GCI& y) {
        return x.lhs == y.lhs && x.rhs == y.rhs;
    }
    friend bool operator<(const GCI& x, const GCI& y) {
        int c = compare(x.lhs, y.lhs);
        return c != 0 ? c < 0 : compare(x.rhs, y.rhs) < 0;
    }
};

struct RoleInclusion {
    RoleExpr sub, super;

    friend bool operator==(const RoleInclusion&, const RoleInclusion&) = default;
    friend auto operator<=>(const RoleInclusion&, const RoleInclusion&) = default;
};

struct RBox {
    std::vector<RoleInclusion> inclusions;  // sorted, unique
    std::vector<RoleExpr> transitive;       // sorted, unique

    friend bool operator==(const RBox&, const RBox&) = default;
};

/// A(a) or R(a,b). Only atomic concept/role names are admitted here; the
/// second individual is empty for concept assertions.
struct Assertion {
    std::string pred;
    bool is_role = false;
    std::string a;
    std::string b;

    static Assertion concept_of(std::string pred, std::string ind) {
        return Assertion{std::move(pred), false, std::move(ind), {}};
    }
    static Assertion role_of(std::string pred, std::string from, std::string to) {
        return Assertion{std::move(pred), true, std::move(from), std::move(to)};
    }

    std::string text() const {
        return is_role ? pred + "(" + a + "," + b + ")" : pred + "(" + a + ")";
    }

    friend bool operator==(const Assertion&, const Assertion&) = default;
    friend auto operator<=>(const Assertion&, const Assertion&) = default;
};

struct Signature {
    std::set<std::string> concepts;
    std::set<std::string> roles;
    std::set<std::string> individuals;
};

// ── Knowledge base ──────────────────────────────────────────────────────────

namespace detail {
template <class T>
void sort_unique(std::vector<T>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
}
}  // namespace detail

struct KnowledgeBase {
    RBox rbox;
    std::vector<GCI> tbox;        // sorted, unique
    std::vector<Assertion> abox;  // sorted, unique

    KnowledgeBase() = default;
    KnowledgeBase(RBox r, std::vector<GCI> t, std::vector<Assertion> a)
        : rbox(std::move(r)), tbox(std::move(t)), abox(std::move(a)) {
        normalize();
    }

    void normalize() {
        detail::sort_unique(rbox.inclusions);
        detail::sort_unique(rbox.transitive);
        std::sort(tbox.begin(), tbox.end());
        tbox.erase(std::unique(tbox.begin(), tbox.end()), tbox.end());
        detail::sort_unique(abox);
    }

    friend bool operator==(const KnowledgeBase&, const KnowledgeBase&) = default;

    Signature signature() const {
        Signature sig;
        auto add_role = [&](const RoleExpr& r) { sig.roles.insert(r.name); };
        auto add_concept = [&](const Concept& c, auto&& self) -> void {
            switch (c.kind()) {
                case ConceptKind::Top:
                case ConceptKind::Bottom:
                    return;
                case ConceptKind::Atomic:
                    sig.concepts.insert(c.name());
                    return;
                case ConceptKind::Not:
                    self(c.child(), self);
                    return;
                case ConceptKind::And:
                case ConceptKind::Or:
                    self(c.lhs(), self);
                    self(c.rhs(), self);
                    return;
                case ConceptKind::Exists:
                case ConceptKind::Forall:
                    add_role(c.role());
                    self(c.child(), self);
                    return;
            }
        };
        for (const auto& ri : rbox.inclusions) {
            add_role(ri.sub);
            add_role(ri.super);
        }
        for (const auto& t : rbox.transitive) add_role(t);
        for (const auto& g : tbox) {
            add_concept(g.lhs, add_concept);
            add_concept(g.rhs, add_concept);
        }
        for (const auto& as : abox) {
            if (as.is_role) {
                sig.roles.insert(as.pred);
                sig.individuals.insert(as.a);
                sig.individuals.insert(as.b);
            } else {
                sig.concepts.insert(as.pred);
                sig.individuals.insert(as.a);
            }
        }
        return sig;
    }

    std::vector<std::string> individuals() const {
        auto sig = signature();
        return {sig.individuals.begin(), sig.individuals.end()};
    }
};

// ── Role hierarchy ──────────────────────────────────────────────────────────

/// The reflexive, transitive closure of the declared inclusions, closed under
/// inversion: R [= S contributes Inv(R) [= Inv(S) as well. Reflexive pairs
/// are included for every role mentioned in the RBox (both polarities).
class SubroleClosure {
public:
    explicit SubroleClosure(const RBox& rbox) {
        std::set<RoleExpr> roles;
        for (const auto& ri : rbox.inclusions) {
            roles.insert(ri.sub);
            roles.insert(ri.super);
            roles.insert(role_inv(ri.sub));
            roles.insert(role_inv(ri.super));
        }
        for (const auto& t : rbox.transitive) {
            roles.insert(t);
            roles.insert(role_inv(t));
        }
        for (const auto& r : roles) pairs_.emplace(r, r);
        for (const auto& ri : rbox.inclusions) {
            pairs_.emplace(ri.sub, ri.super);
            pairs_.emplace(role_inv(ri.sub), role_inv(ri.super));
        }
        // transitive closure; the role universe is small
        bool changed = true;
        while (changed) {
            changed = false;
            std::set<std::pair<RoleExpr, RoleExpr>> next = pairs_;
            for (const auto& [p, q] : pairs_)
                for (const auto& [r, s] : pairs_)
                    if (q == r && next.emplace(p, s).second) changed = true;
            pairs_.swap(next);
        }
    }

    /// True iff sub [=* super. Reflexivity holds for every role, mentioned
    /// or not.
    bool subsumed(const RoleExpr& sub, const RoleExpr& super) const {
        return sub == super || pairs_.count({sub, super}) > 0;
    }

    const std::set<std::pair<RoleExpr, RoleExpr>>& pairs() const { return pairs_; }

    /// Roles appearing in the closure plus the given extras, both polarities.
    std::set<RoleExpr> universe(const std::vector<RoleExpr>& extras = {}) const {
        std::set<RoleExpr> u;
        for (const auto& [p, q] : pairs_) {
            u.insert(p);
            u.insert(q);
        }
        for (const auto& r : extras) {
            u.insert(r);
            u.insert(role_inv(r));
        }
        return u;
    }

private:
    std::set<std::pair<RoleExpr, RoleExpr>> pairs_;
};

inline std::set<std::pair<RoleExpr, RoleExpr>> subrole_closure(const RBox& rbox) {
    return SubroleClosure(rbox).pairs();
}

/// R is transitive iff some S with S [=* R, R [=* S and Trans(S) or
/// Trans(Inv(S)) declared.
inline bool is_transitive(const RoleExpr& r, const RBox& rbox) {
    SubroleClosure cl(rbox);
    for (const auto& s : cl.universe({r})) {
        if (!cl.subsumed(s, r) || !cl.subsumed(r, s)) continue;
        RoleExpr si = role_inv(s);
        for (const auto& t : rbox.transitive)
            if (t == s || t == si) return true;
    }
    return false;
}

/// Simple: no transitive role below it in the hierarchy.
inline bool is_simple(const RoleExpr& r, const RBox& rbox) {
    SubroleClosure cl(rbox);
    for (const auto& s : cl.universe({r}))
        if (cl.subsumed(s, r) && is_transitive(s, rbox)) return false;
    return true;
}

}  // namespace kbevolve

#endif  // KBEVOLVE_KB_HPP
