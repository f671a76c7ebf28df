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
// kbevolve/engine.hpp — model finder for (renamed) DL-clause sets
// ============================================================================
//
// The engine performs bottom-up saturation with depth-first branching over
// disjunctive heads and chronological backtracking:
//
//   * ground_prepare guards every head-only variable with an internal
//     domain predicate and emits one domain fact per named individual;
//     fresh individuals never receive domain facts, so head-only variables
//     range over named individuals only.
//
//   * A clause instance fires when its body is satisfied and no head atom
//     holds. Empty heads close the branch. Disjunctive heads branch
//     left-to-right, with disjuncts whose ground atom lies in Gamma tried
//     last. Instances are processed in derivation order (an agenda fed by
//     semi-naive matching), which is a fixed, deterministic order.
//
//   * An existential head atom exists R.B(s) is first checked for an
//     existing witness; otherwise a fresh individual u is created with
//     R(s,u) and B(u), or a negative constraint on B at u when the filler
//     is negated. Deriving an atom that violates a negative constraint
//     closes the branch.
//
//   * Termination: pairwise anywhere blocking. A fresh individual is
//     blocked when an earlier unblocked fresh individual has an equal
//     label signature (own unary atoms + negative constraints, the edge
//     labels to its parent, and the parent's label). Pending existentials
//     on blocked individuals stay unexpanded; at model extraction each
//     blocked individual is removed and the edge from its parent is
//     redirected to its blocker, yielding a finite structure that
//     satisfies every clause.
//
//   * Gamma costs: the branch cost is |branch atoms ∩ Gamma|; exceeding
//     the cost bound closes the branch and marks the search as
//     bound-limited, so Unsatisfiable is only reported when every branch
//     closed for bound-independent reasons.
//
// A Search owns all mutable state. It supports mark/rollback, so a caller
// can load a clause set once and run many per-request searches against it
// (each find() restores the pre-call state). Options provide resource
// ceilings (converted into ResourceLimitError, never wrong answers) and an
// opt-in lazy-domain mode in which domain facts are injected only for
// individuals touched by the derivation; see SearchOptions::lazy_domain.
// ============================================================================

#ifndef KBEVOLVE_ENGINE_HPP
#define KBEVOLVE_ENGINE_HPP

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "kbevolve/clause.hpp"

namespace kbevolve {

struct ResourceLimitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SearchOptions {
    std::size_t max_fresh = 100000;
    std::size_t max_branch_closures = 1000000;
    /// When set, head-only variables range only over named individuals that
    /// already occur in some derived (non-ABox) atom, instead of over all
    /// named individuals. Sound for satisfiable inputs whose plain clause
    /// form is consistent; callers are responsible for that precondition.
    bool lazy_domain = false;
    /// When false, find() fills only cost/gamma_atoms of a model.
    bool materialize_models = true;
    std::ostream* trace = nullptr;
};

struct SearchStats {
    std::size_t branches_closed = 0;
    std::size_t fresh_created = 0;
    std::size_t blocks = 0;
    std::size_t bound_reached = 0;
};

struct Model {
    std::vector<Atom> atoms;        // ground, sorted, blocked nodes patched out
    std::vector<Term> domain;       // named individuals + kept fresh individuals
    std::vector<Atom> gamma_atoms;  // atoms ∩ Gamma, sorted
    std::size_t fresh_count = 0;    // fresh individuals created by the search
    std::size_t cost = 0;           // |atoms ∩ Gamma|
};

struct SearchResult {
    enum class Kind { ModelFound, Unsatisfiable, BoundExhausted };
    Kind kind = Kind::Unsatisfiable;
    std::optional<Model> model;
    std::size_t bound = 0;  // the bound in effect when the result was produced

    bool found() const { return kind == Kind::ModelFound; }
};

// ── Prepared programs ───────────────────────────────────────────────────────

namespace engine_detail {

using PredId = std::uint32_t;
using TermId = std::int32_t;

constexpr TermId kNoArg = INT32_MIN;      // the argument position does not exist
constexpr TermId kUnbound = INT32_MIN + 1;  // variable not yet bound in a join
inline bool is_var_arg(TermId t) { return t < 0 && t != kNoArg && t != kUnbound; }
inline int var_index(TermId t) { return -1 - t; }
inline TermId var_arg(int idx) { return -1 - idx; }

constexpr int kMaxVars = 12;

struct PredInfo {
    AtomKind kind = AtomKind::Concept;
    std::string name;  // empty for exists/false kinds
    int arity = 1;
    bool is_dom = false;
    // existential payload
    RoleExpr ex_role;
    std::string ex_filler;
    bool ex_filler_positive = true;
    PredId role_pred = 0;
    PredId filler_pred = 0;

    bool label_relevant() const {
        return !is_dom && kind != AtomKind::ABoxConcept && kind != AtomKind::ABoxRole;
    }
};

struct ILit {
    PredId pred = 0;
    TermId a = kNoArg;
    TermId b = kNoArg;
};

struct IClause {
    std::vector<ILit> body;
    std::vector<ILit> head;
    int nvars = 0;
};

inline std::uint64_t pack_atom(PredId p, TermId a, TermId b) {
    // pred:20 | a:22 | b:22 (term ids shifted by one so kNoArg packs as 0)
    auto enc = [](TermId t) -> std::uint64_t {
        return t == kNoArg ? 0 : static_cast<std::uint64_t>(t) + 1;
    };
    return (static_cast<std::uint64_t>(p) << 44) | (enc(a) << 22) | enc(b);
}

inline std::uint64_t pack_parg(PredId p, TermId t) {
    return (static_cast<std::uint64_t>(p) << 32) | static_cast<std::uint32_t>(t);
}

}  // namespace engine_detail

class PreparedProgram {
public:
    using PredId = engine_detail::PredId;
    using TermId = engine_detail::TermId;

    std::vector<engine_detail::PredInfo> preds;
    std::vector<std::string> named;       // full term table, sorted unique
    std::vector<std::uint8_t> dommable;   // parallel: receives a domain fact
    PredId dom_pred = 0;

    std::vector<engine_detail::IClause> rules;  // nonempty body
    std::vector<engine_detail::ILit> facts;     // ground single-head, empty body
    std::vector<engine_detail::IClause> base_disjunctions;  // ground, empty body
    // pred -> (rule index, body position)
    std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> occurrences;

    TermId term_id(const std::string& name) const {
        auto it = term_ids_.find(name);
        return it == term_ids_.end() ? engine_detail::kNoArg : it->second;
    }

    std::optional<PredId> pred_id(const Atom& a) const {
        auto it = pred_ids_.find(pred_key(a));
        if (it == pred_ids_.end()) return std::nullopt;
        return it->second;
    }

    /// The range-restricted clause set the engine actually runs: the input
    /// clauses with `__dom` guards on head-only variables, plus one domain
    /// fact per named individual. Models returned by the engine satisfy
    /// every clause of this set over their own domain.
    ClauseSet symbolic() const {
        ClauseSet out;
        auto var_name = [](int idx) {
            static const char* names[] = {"x", "y", "z", "w"};
            return idx < 4 ? std::string(names[idx]) : "v" + std::to_string(idx + 1);
        };
        auto term_of = [&](engine_detail::TermId t) {
            if (engine_detail::is_var_arg(t))
                return Term::var(var_name(engine_detail::var_index(t)));
            return Term::named(named[static_cast<std::size_t>(t)]);
        };
        auto atom_of = [&](const engine_detail::ILit& l) -> Atom {
            const auto& info = preds[l.pred];
            switch (info.kind) {
                case AtomKind::Concept:
                    return Atom::concept_atom(info.is_dom ? "__dom" : info.name, term_of(l.a));
                case AtomKind::NegConcept:
                    return Atom::neg_concept(info.name, term_of(l.a));
                case AtomKind::ABoxConcept:
                    return Atom::abox_concept(info.name, term_of(l.a));
                case AtomKind::Role:
                    return Atom::role_atom(info.name, term_of(l.a), term_of(l.b));
                case AtomKind::NegRole:
                    return Atom::neg_role(info.name, term_of(l.a), term_of(l.b));
                case AtomKind::ABoxRole:
                    return Atom::abox_role(info.name, term_of(l.a), term_of(l.b));
                case AtomKind::False:
                    return Atom::false_atom();
                case AtomKind::NegFalse:
                    return Atom::neg_false();
                case AtomKind::Exists:
                    return Atom::exists_atom(info.ex_role, info.ex_filler,
                                             info.ex_filler_positive, term_of(l.a));
            }
            return Atom::false_atom();
        };
        auto clause_of = [&](const engine_detail::IClause& c) {
            std::vector<Atom> head, body;
            for (const auto& l : c.head) head.push_back(atom_of(l));
            for (const auto& l : c.body) body.push_back(atom_of(l));
            return DLClause(std::move(head), std::move(body));
        };
        for (const auto& r : rules) out.add(clause_of(r));
        for (const auto& b : base_disjunctions) out.add(clause_of(b));
        for (const auto& f : facts) out.add(DLClause::fact(atom_of(f)));
        for (std::size_t i = 0; i < named.size(); ++i)
            if (dommable[i])
                out.add(DLClause::fact(Atom::concept_atom("__dom", Term::named(named[i]))));
        return out;
    }

    /// Encodes a ground named atom; nullopt if a symbol or individual is
    /// unknown to the program (such an atom can never be derived).
    std::optional<std::uint64_t> encode(const Atom& atom) const {
        auto p = pred_id(atom);
        if (!p) return std::nullopt;
        TermId a = engine_detail::kNoArg, b = engine_detail::kNoArg;
        if (atom.arity() >= 1) {
            if (atom.s.kind != Term::Kind::Named) return std::nullopt;
            a = term_id(atom.s.name);
            if (a == engine_detail::kNoArg) return std::nullopt;
        }
        if (atom.arity() == 2) {
            if (atom.t.kind != Term::Kind::Named) return std::nullopt;
            b = term_id(atom.t.name);
            if (b == engine_detail::kNoArg) return std::nullopt;
        }
        return engine_detail::pack_atom(*p, a, b);
    }

    friend PreparedProgram ground_prepare(const ClauseSet& clauses,
                                          const std::vector<std::string>& named_individuals,
                                          const std::vector<Atom>& extra_atoms);

private:
    static std::string pred_key(const Atom& a) {
        switch (a.kind) {
            case AtomKind::Concept: return "C:" + a.pred;
            case AtomKind::Role: return "R:" + a.pred;
            case AtomKind::NegConcept: return "nC:" + a.pred;
            case AtomKind::NegRole: return "nR:" + a.pred;
            case AtomKind::ABoxConcept: return "aC:" + a.pred;
            case AtomKind::ABoxRole: return "aR:" + a.pred;
            case AtomKind::False: return "F:";
            case AtomKind::NegFalse: return "nF:";
            case AtomKind::Exists:
                return "E:" + a.ex_role.name + (a.ex_role.inverted ? "-" : "+") + ":" +
                       (a.ex_filler_positive ? "+" : "-") + a.ex_filler;
        }
        return {};
    }

    PredId intern_pred(const Atom& proto) {
        std::string key = pred_key(proto);
        auto it = pred_ids_.find(key);
        if (it != pred_ids_.end()) return it->second;
        if (preds.size() >= (1u << 20))
            throw ResourceLimitError("predicate table limit reached");
        engine_detail::PredInfo info;
        info.kind = proto.kind;
        info.name = proto.pred;
        info.arity = proto.arity();
        if (proto.kind == AtomKind::Exists) {
            info.ex_role = proto.ex_role;
            info.ex_filler = proto.ex_filler;
            info.ex_filler_positive = proto.ex_filler_positive;
        }
        PredId id = static_cast<PredId>(preds.size());
        preds.push_back(std::move(info));
        pred_ids_.emplace(std::move(key), id);
        return id;
    }

    std::unordered_map<std::string, PredId> pred_ids_;
    std::unordered_map<std::string, TermId> term_ids_;
};

/// Range-restriction: every variable occurring in a clause head but not its
/// body is guarded by an internal domain predicate; one domain fact is added
/// per named individual. Constants that occur in clauses but not in the
/// named set are interned without a domain fact. Errors if a head-only
/// variable exists and the named set is empty. `extra_atoms` are prototypes
/// whose predicates and constants become known to the program even when no
/// clause mentions them (facts added later and Gamma atoms).
inline PreparedProgram ground_prepare(const ClauseSet& clauses,
                                      const std::vector<std::string>& named_individuals,
                                      const std::vector<Atom>& extra_atoms = {}) {
    using namespace engine_detail;
    PreparedProgram prog;

    // term table: named individuals plus clause constants, sorted
    std::set<std::string> dom_set(named_individuals.begin(), named_individuals.end());
    std::set<std::string> all_terms = dom_set;
    auto scan_terms = [&all_terms](const Atom& a) {
        if (a.arity() >= 1) {
            if (a.s.kind == Term::Kind::Fresh)
                throw std::invalid_argument(
                    "ground_prepare: fresh terms cannot appear in input clauses");
            if (a.s.kind == Term::Kind::Named) all_terms.insert(a.s.name);
        }
        if (a.arity() == 2) {
            if (a.t.kind == Term::Kind::Fresh)
                throw std::invalid_argument(
                    "ground_prepare: fresh terms cannot appear in input clauses");
            if (a.t.kind == Term::Kind::Named) all_terms.insert(a.t.name);
        }
    };
    for (const auto& c : clauses.clauses) {
        for (const auto& a : c.head) scan_terms(a);
        for (const auto& a : c.body) scan_terms(a);
    }
    for (const auto& a : extra_atoms) scan_terms(a);
    if (all_terms.size() >= (1u << 22) - 2)
        throw ResourceLimitError("term table limit reached");
    for (const auto& name : all_terms) {
        TermId id = static_cast<TermId>(prog.named.size());
        prog.named.push_back(name);
        prog.dommable.push_back(dom_set.count(name) ? 1 : 0);
        prog.term_ids_.emplace(name, id);
    }

    // the internal domain predicate is interned first
    Atom dom_proto = Atom::concept_atom("__dom", Term::var("x"));
    prog.dom_pred = prog.intern_pred(dom_proto);
    prog.preds[prog.dom_pred].is_dom = true;

    bool head_only_vars_seen = false;
    for (const auto& c : clauses.clauses) {
        IClause ic;
        std::map<std::string, int> varmap;
        auto var_of = [&](const Term& t) -> TermId {
            if (!t.is_var()) {
                if (t.kind == Term::Kind::Named) return prog.term_id(t.name);
                return kNoArg;
            }
            auto it = varmap.find(t.name);
            if (it == varmap.end()) {
                if (varmap.size() >= kMaxVars)
                    throw std::invalid_argument("ground_prepare: clause exceeds " +
                                                std::to_string(kMaxVars) + " variables");
                it = varmap.emplace(t.name, static_cast<int>(varmap.size())).first;
            }
            return var_arg(it->second);
        };
        auto to_lit = [&](const Atom& a) {
            ILit lit;
            lit.pred = prog.intern_pred(a);
            if (a.arity() >= 1) lit.a = var_of(a.s);
            if (a.arity() == 2) lit.b = var_of(a.t);
            if (a.kind == AtomKind::Exists) {
                // intern first: intern_pred may reallocate prog.preds
                PredId rp =
                    prog.intern_pred(Atom::role_atom(a.ex_role.name, Term::var("x"), Term::var("y")));
                PredId fp = prog.intern_pred(Atom::concept_atom(a.ex_filler, Term::var("x")));
                prog.preds[lit.pred].role_pred = rp;
                prog.preds[lit.pred].filler_pred = fp;
            }
            return lit;
        };

        for (const auto& a : c.body) ic.body.push_back(to_lit(a));
        std::size_t body_vars = varmap.size();
        for (const auto& a : c.head) ic.head.push_back(to_lit(a));
        ic.nvars = static_cast<int>(varmap.size());
        for (std::size_t v = body_vars; v < varmap.size(); ++v) {
            head_only_vars_seen = true;
            ILit guard;
            guard.pred = prog.dom_pred;
            guard.a = var_arg(static_cast<int>(v));
            ic.body.push_back(guard);
        }

        if (ic.body.empty()) {
            if (ic.head.size() == 1 && prog.preds[ic.head[0].pred].kind != AtomKind::Exists)
                prog.facts.push_back(ic.head[0]);
            else
                prog.base_disjunctions.push_back(std::move(ic));
        } else {
            prog.rules.push_back(std::move(ic));
        }
    }
    if (head_only_vars_seen && dom_set.empty())
        throw std::invalid_argument(
            "ground_prepare: clauses with head-only variables need at least one named individual");

    for (const auto& a : extra_atoms) {
        Atom proto = a;
        if (proto.arity() >= 1) proto.s = Term::var("x");
        if (proto.arity() == 2) proto.t = Term::var("y");
        PredId p = prog.intern_pred(proto);
        if (proto.kind == AtomKind::Exists) {
            PredId rp = prog.intern_pred(
                Atom::role_atom(proto.ex_role.name, Term::var("x"), Term::var("y")));
            PredId fp = prog.intern_pred(Atom::concept_atom(proto.ex_filler, Term::var("x")));
            prog.preds[p].role_pred = rp;
            prog.preds[p].filler_pred = fp;
        }
    }

    prog.occurrences.resize(prog.preds.size());
    for (std::uint32_t r = 0; r < prog.rules.size(); ++r)
        for (std::uint32_t i = 0; i < prog.rules[r].body.size(); ++i)
            prog.occurrences[prog.rules[r].body[i].pred].push_back({r, i});
    return prog;
}

// ── Search ──────────────────────────────────────────────────────────────────

class Search {
    using PredId = engine_detail::PredId;
    using TermId = engine_detail::TermId;
    using ILit = engine_detail::ILit;
    using IClause = engine_detail::IClause;

public:
    Search(const PreparedProgram& prog, const std::vector<Atom>& gamma, SearchOptions opts = {})
        : prog_(prog), opts_(opts) {
        for (const auto& g : gamma)
            if (auto code = prog_.encode(g)) gamma_codes_.insert(*code);
        term_count_ = static_cast<TermId>(prog_.named.size());
        grow_term_arrays();
        if (!opts_.lazy_domain)
            for (TermId t = 0; t < static_cast<TermId>(prog_.named.size()); ++t)
                if (prog_.dommable[static_cast<std::size_t>(t)])
                    add_atom(prog_.dom_pred, t, engine_detail::kNoArg, 0);
        for (const auto& f : prog_.facts) add_atom(f.pred, f.a, f.b, 0);
        for (std::uint32_t i = 0; i < prog_.base_disjunctions.size(); ++i)
            agenda_.push_back(Instance{kBaseTag | i, {}});
    }

    struct Mark {
        std::size_t trail, agenda, cursor, resume, deferred, deferred_cursor;
    };

    Mark mark() const {
        return Mark{trail_.size(), agenda_.size(),    cursor_,
                    resume_,       deferred_.size(),  deferred_cursor_};
    }

    void rollback(const Mark& m) {
        undo_to(m.trail);
        agenda_.resize(m.agenda);
        cursor_ = m.cursor;
        resume_ = m.resume;
        deferred_.resize(m.deferred);
        deferred_cursor_ = m.deferred_cursor;
        cps_.clear();
        clash_ = false;
        clash_blame_.reset();
    }

    /// Adds a ground fact on top of the loaded program. Symbols must be
    /// known to the prepared program.
    void add_fact(const Atom& atom) {
        auto p = prog_.pred_id(atom);
        if (!p)
            throw std::invalid_argument("add_fact: unknown predicate: " + atom.text());
        TermId a = engine_detail::kNoArg, b = engine_detail::kNoArg;
        if (atom.arity() >= 1) a = require_term(atom.s);
        if (atom.arity() == 2) b = require_term(atom.t);
        add_atom(*p, a, b, 0);
    }

    /// Forbids a ground conjunction: any branch containing all of the atoms
    /// closes. Returns true when the conjunction already holds in the
    /// current (base) state, i.e. every further search is excluded.
    bool add_forbidden(const std::vector<Atom>& atoms) {
        std::vector<std::uint64_t> codes;
        bool present = true;
        for (const auto& a : atoms) {
            auto code = prog_.encode(a);
            if (!code) return false;  // an underivable atom: the set can never hold
            codes.push_back(*code);
            present = present && atom_set_.count(*code) > 0;
        }
        std::uint32_t idx = static_cast<std::uint32_t>(forbidden_.size());
        for (std::uint64_t c : codes) forbidden_index_[c].push_back(idx);
        forbidden_.push_back(std::move(codes));
        trail_.push_back({TrailEntry::Kind::Forbid, idx, 0, 0});
        return present;
    }

    /// One bounded (or unbounded) model search. The pre-call state is
    /// restored before returning.
    SearchResult find(std::optional<std::size_t> bound) {
        Mark m0 = mark();
        bound_ = bound;
        bound_hit_ = false;
        SearchResult res;
        res.bound = bound.value_or(0);
        if (bound_ && cost_ > *bound_) {  // pre-loaded facts already exceed it
            bound_ = std::nullopt;
            res.kind = SearchResult::Kind::BoundExhausted;
            return res;
        }
        bool stopped = run([&](Search& self) {
            res.kind = SearchResult::Kind::ModelFound;
            res.model = self.extract_model();
            return true;  // stop at the first open saturated branch
        });
        if (!stopped)
            res.kind = bound_hit_ ? SearchResult::Kind::BoundExhausted
                                  : SearchResult::Kind::Unsatisfiable;
        rollback(m0);
        bound_.reset();
        return res;
    }

    /// All models at the given bound, one per distinct Gamma-intersection,
    /// in lexicographic Gamma-intersection order. Enumerates by exclusion:
    /// after each model, its Gamma-set is forbidden as a ground conjunction
    /// and the search restarts, so the work grows with the number of
    /// distinct answers rather than with the branch tree.
    std::vector<Model> enumerate(std::size_t bound) {
        Mark m0 = mark();
        std::map<std::vector<Atom>, Model> found;
        for (;;) {
            SearchResult r = find(bound);
            if (!r.found()) break;
            std::vector<Atom> key = r.model->gamma_atoms;
            if (found.count(key)) break;  // defensive: exclusion failed
            bool exhausted = add_forbidden(key);
            found.emplace(std::move(key), std::move(*r.model));
            if (exhausted) break;
        }
        rollback(m0);
        std::vector<Model> out;
        out.reserve(found.size());
        for (auto& [k, v] : found) out.push_back(std::move(v));
        return out;
    }

    const SearchStats& stats() const { return stats_; }
    std::size_t current_cost() const { return cost_; }

private:
    // ---- data ----------------------------------------------------------

    struct AtomRec {
        PredId pred;
        TermId a, b;
        std::uint32_t level = 0;  // decision level at derivation
        bool gamma = false;
        bool unary_labeled = false;
        bool edge_labeled = false;
        bool adjacency = false;
    };

    struct Instance {
        std::uint32_t clause;  // rule index, or kBaseTag|index for base disjunctions
        std::array<TermId, engine_detail::kMaxVars> bind{};
    };

    struct ChoicePoint {
        Instance inst;
        std::vector<std::uint8_t> order;  // head indices, Gamma-last
        std::size_t next = 0;
        std::size_t trail, agenda, cursor, resume, deferred, deferred_cursor;
    };

    struct FreshInfo {
        TermId parent;
    };

    struct TrailEntry {
        enum class Kind : std::uint8_t {
            Atom,
            Constraint,
            Fresh,
            Pending,
            PendingDone,
            Activate,
            Bucket,
            Forbid
        } kind;
        std::uint32_t x = 0;
        std::uint64_t y = 0, z = 0;
    };

    struct Pending {
        TermId owner;
        PredId pred;
        std::uint32_t level = 0;  // reason level of the exists atom
        bool done = false;
    };

    static constexpr std::uint32_t kBaseTag = 0x80000000u;

    const PreparedProgram& prog_;
    SearchOptions opts_;
    std::unordered_set<std::uint64_t> gamma_codes_;

    std::vector<AtomRec> atoms_;
    std::unordered_map<std::uint64_t, std::uint32_t> atom_set_;  // code -> atom index
    std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> by_arg0_, by_arg1_;
    std::vector<std::vector<std::uint32_t>> by_pred_;

    struct ConstraintRec {
        PredId pred;
        TermId term;
        std::uint32_t level;
    };
    std::unordered_map<std::uint64_t, std::uint32_t> constraint_set_;  // code -> index
    std::vector<ConstraintRec> constraints_;

    TermId term_count_ = 0;  // named + fresh
    std::vector<FreshInfo> fresh_;
    std::vector<std::vector<PredId>> unary_label_, constraint_label_;
    std::vector<std::vector<std::uint64_t>> edge_label_;
    std::vector<std::vector<TermId>> children_;
    std::vector<std::uint32_t> label_version_;
    // cached blocking signature per term: (version + 1, signature); 0 = stale
    std::vector<std::pair<std::uint32_t, std::vector<std::uint64_t>>> sig_cache_;
    std::vector<std::uint8_t> active_, dirty_;
    std::vector<std::vector<TermId>> adjacency_;  // named-named role links
    std::vector<std::uint64_t> last_bucket_hash_;
    std::vector<TermId> dirty_list_;
    std::unordered_map<std::uint64_t, std::vector<TermId>> sig_buckets_;

    std::vector<Pending> pendings_;
    std::vector<Instance> agenda_;
    std::size_t cursor_ = 0;
    std::size_t resume_ = 0;
    std::vector<Instance> deferred_;  // violated disjunctions awaiting a branch
    std::size_t deferred_cursor_ = 0;

    std::vector<TrailEntry> trail_;
    std::vector<ChoicePoint> cps_;

    // forbidden ground conjunctions (enumeration exclusions)
    std::vector<std::vector<std::uint64_t>> forbidden_;
    std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> forbidden_index_;

    std::vector<std::pair<PredId, std::array<TermId, 2>>> gamma_hits_;
    std::vector<std::uint32_t> gamma_levels_;  // decision level per gamma hit
    std::size_t cost_ = 0;
    std::optional<std::size_t> clash_blame_;  // deepest level involved in the clash
    std::optional<std::size_t> bound_;
    bool bound_hit_ = false;
    bool clash_ = false;

    SearchStats stats_;

    // blocking memo, valid while trail size is unchanged
    std::size_t block_stamp_ = SIZE_MAX;
    std::unordered_map<TermId, TermId> block_memo_;  // term -> blocker (or -1)

    // ---- small helpers ---------------------------------------------------

    void grow_term_arrays() {
        std::size_t n = static_cast<std::size_t>(term_count_);
        unary_label_.resize(n);
        constraint_label_.resize(n);
        edge_label_.resize(n);
        children_.resize(n);
        label_version_.resize(n, 0);
        sig_cache_.resize(n);
        active_.resize(n, 0);
        dirty_.resize(n, 0);
        adjacency_.resize(n);
        last_bucket_hash_.resize(n, 0);
    }

    TermId require_term(const Term& t) {
        if (t.kind != Term::Kind::Named)
            throw std::invalid_argument("add_fact: arguments must be named individuals");
        TermId id = prog_.term_id(t.name);
        if (id == engine_detail::kNoArg)
            throw std::invalid_argument("add_fact: unknown individual: " + t.name);
        return id;
    }

    bool is_fresh(TermId t) const { return t >= static_cast<TermId>(prog_.named.size()); }

    Term term_of(TermId t) const {
        if (is_fresh(t)) return Term::fresh(static_cast<int>(t - prog_.named.size()) + 1);
        return Term::named(prog_.named[static_cast<std::size_t>(t)]);
    }

    Atom decode(PredId p, TermId a, TermId b) const {
        const auto& info = prog_.preds[p];
        switch (info.kind) {
            case AtomKind::Concept:
                return Atom::concept_atom(info.name, term_of(a));
            case AtomKind::NegConcept:
                return Atom::neg_concept(info.name, term_of(a));
            case AtomKind::ABoxConcept:
                return Atom::abox_concept(info.name, term_of(a));
            case AtomKind::Role:
                return Atom::role_atom(info.name, term_of(a), term_of(b));
            case AtomKind::NegRole:
                return Atom::neg_role(info.name, term_of(a), term_of(b));
            case AtomKind::ABoxRole:
                return Atom::abox_role(info.name, term_of(a), term_of(b));
            case AtomKind::False:
                return Atom::false_atom();
            case AtomKind::NegFalse:
                return Atom::neg_false();
            case AtomKind::Exists:
                return Atom::exists_atom(info.ex_role, info.ex_filler, info.ex_filler_positive,
                                         term_of(a));
        }
        return Atom::false_atom();
    }

    void mark_dirty(TermId t) {
        ++label_version_[static_cast<std::size_t>(t)];
        if (!dirty_[static_cast<std::size_t>(t)]) {
            dirty_[static_cast<std::size_t>(t)] = 1;
            dirty_list_.push_back(t);
        }
        for (TermId c : children_[static_cast<std::size_t>(t)]) {
            ++label_version_[static_cast<std::size_t>(c)];
            if (!dirty_[static_cast<std::size_t>(c)]) {
                dirty_[static_cast<std::size_t>(c)] = 1;
                dirty_list_.push_back(c);
            }
        }
    }

    // ---- atom insertion --------------------------------------------------

    bool has_atom(PredId p, TermId a, TermId b) const {
        return atom_set_.count(engine_detail::pack_atom(p, a, b)) > 0;
    }

    /// Decision level of a present ground atom; 0 when absent.
    std::uint32_t atom_level(PredId p, TermId a, TermId b) const {
        auto it = atom_set_.find(engine_detail::pack_atom(p, a, b));
        return it == atom_set_.end() ? 0 : atoms_[it->second].level;
    }

    void blame(std::size_t level) {
        if (!clash_blame_ || *clash_blame_ < level) clash_blame_ = level;
    }

    /// Returns false when adding the atom closes the branch (negative
    /// constraint violated or cost bound exceeded). The atom is recorded on
    /// the trail either way. `level` is the reason level: the decision
    /// level of the choice (or derivation) that produced the atom, used
    /// for conflict-directed backjumping.
    bool add_atom(PredId p, TermId a, TermId b, std::uint32_t level) {
        std::uint64_t code = engine_detail::pack_atom(p, a, b);
        if (atom_set_.count(code)) return true;
        const auto& info = prog_.preds[p];
        if (info.arity == 1 && info.kind != AtomKind::Exists) {
            auto ct = constraint_set_.find(engine_detail::pack_parg(p, a));
            if (ct != constraint_set_.end()) {
                blame(std::max<std::size_t>(constraints_[ct->second].level, level));
                trace_clash("constraint");
                return false;
            }
        }

        AtomRec rec{p, a, b};
        rec.level = level;
        std::uint32_t id = static_cast<std::uint32_t>(atoms_.size());
        atom_set_.emplace(code, id);
        if (by_pred_.size() <= p) by_pred_.resize(p + 1);
        by_pred_[p].push_back(id);
        if (info.arity >= 1) by_arg0_[engine_detail::pack_parg(p, a)].push_back(id);
        if (info.arity == 2) by_arg1_[engine_detail::pack_parg(p, b)].push_back(id);

        if (gamma_codes_.count(code)) {
            rec.gamma = true;
            ++cost_;
            gamma_hits_.push_back({p, {a, b}});
            gamma_levels_.push_back(static_cast<std::uint32_t>(cps_.size()));
        }

        if (info.label_relevant()) {
            if (info.arity == 1) {
                unary_label_[static_cast<std::size_t>(a)].push_back(p);
                rec.unary_labeled = true;
                mark_dirty(a);
            } else if (info.arity == 2) {
                TermId child = engine_detail::kNoArg;
                std::uint64_t tag = 0;
                if (is_fresh(b) && fresh_[b - prog_.named.size()].parent == a) {
                    child = b;
                    tag = (static_cast<std::uint64_t>(p) << 1);
                } else if (is_fresh(a) && fresh_[a - prog_.named.size()].parent == b) {
                    child = a;
                    tag = (static_cast<std::uint64_t>(p) << 1) | 1;
                }
                if (child != engine_detail::kNoArg) {
                    edge_label_[static_cast<std::size_t>(child)].push_back(tag);
                    rec.edge_labeled = true;
                    mark_dirty(child);
                }
            }
        }

        // the named-named link structure of the ABox (and of anything
        // derived over it) drives lazy activation
        if (opts_.lazy_domain && info.arity == 2 && !is_fresh(a) && !is_fresh(b) && a != b) {
            adjacency_[static_cast<std::size_t>(a)].push_back(b);
            adjacency_[static_cast<std::size_t>(b)].push_back(a);
            rec.adjacency = true;
        }

        bool want_activate_a = false, want_activate_b = false;
        if (opts_.lazy_domain && !info.is_dom && info.kind != AtomKind::ABoxConcept &&
            info.kind != AtomKind::ABoxRole) {
            want_activate_a = info.arity >= 1 && !is_fresh(a);
            want_activate_b = info.arity == 2 && !is_fresh(b);
        }

        atoms_.push_back(rec);
        trail_.push_back({TrailEntry::Kind::Atom, id, 0, 0});

        if (!forbidden_.empty()) {
            auto it = forbidden_index_.find(code);
            if (it != forbidden_index_.end()) {
                for (std::uint32_t set : it->second) {
                    bool complete = true;
                    std::size_t deepest = 0;
                    for (std::uint64_t c : forbidden_[set]) {
                        auto at = atom_set_.find(c);
                        if (at == atom_set_.end()) {
                            complete = false;
                            break;
                        }
                        deepest = std::max<std::size_t>(deepest, atoms_[at->second].level);
                    }
                    if (complete) {
                        blame(deepest);
                        trace_clash("forbidden");
                        return false;
                    }
                }
            }
        }

        if (info.kind == AtomKind::Exists) {
            pendings_.push_back(Pending{a, p, rec.level, false});
            trail_.push_back({TrailEntry::Kind::Pending, 0, 0, 0});
        }

        bool ok = true;
        if (bound_ && cost_ > *bound_) {
            bound_hit_ = true;
            // only choicepoints at or below the deepest cost contributor
            // can shed the offending cost
            std::size_t deepest = 0;
            for (std::uint32_t l : gamma_levels_) deepest = std::max<std::size_t>(deepest, l);
            blame(deepest);
            trace_clash("bound");
            ok = false;
        }

        // activation-driven domain facts (after the record is in place)
        if (ok && want_activate_a) ok = activate(a, level);
        if (ok && want_activate_b) ok = activate(b, level);

        if (ok) trigger(p, id);
        return ok && !clash_;
    }

    /// Activates a named individual and, transitively, its whole component
    /// in the asserted role graph. Touched individuals interact with their
    /// asserted neighbours through flipped clauses, so the neighbours'
    /// instances must fire too; individuals in other components can always
    /// be completed at zero cost.
    bool activate(TermId t, std::uint32_t level) {
        if (active_[static_cast<std::size_t>(t)] ||
            !prog_.dommable[static_cast<std::size_t>(t)])
            return true;
        std::vector<TermId> stack{t};
        bool ok = true;
        while (!stack.empty()) {
            TermId u = stack.back();
            stack.pop_back();
            if (active_[static_cast<std::size_t>(u)]) continue;
            active_[static_cast<std::size_t>(u)] = 1;
            trail_.push_back({TrailEntry::Kind::Activate, static_cast<std::uint32_t>(u), 0, 0});
            ok = add_atom(prog_.dom_pred, u, engine_detail::kNoArg, level) && ok;
            for (TermId v : adjacency_[static_cast<std::size_t>(u)])
                if (!active_[static_cast<std::size_t>(v)] &&
                    prog_.dommable[static_cast<std::size_t>(v)])
                    stack.push_back(v);
        }
        return ok;
    }

    bool add_constraint(PredId filler, TermId t, std::uint32_t level) {
        std::uint64_t code = engine_detail::pack_parg(filler, t);
        if (constraint_set_.count(code)) return true;
        if (has_atom(filler, t, engine_detail::kNoArg)) {
            blame(std::max<std::size_t>(atom_level(filler, t, engine_detail::kNoArg), level));
            trace_clash("constraint");
            return false;
        }
        constraint_set_.emplace(code, static_cast<std::uint32_t>(constraints_.size()));
        constraints_.push_back({filler, t, level});
        constraint_label_[static_cast<std::size_t>(t)].push_back(filler);
        mark_dirty(t);
        trail_.push_back({TrailEntry::Kind::Constraint, 0, 0, 0});
        return true;
    }

    // ---- semi-naive matching ----------------------------------------------

    void trigger(PredId p, std::uint32_t atom_id) {
        if (p >= prog_.occurrences.size()) return;
        for (auto [rule, pos] : prog_.occurrences[p]) {
            const IClause& c = prog_.rules[rule];
            Instance inst{rule, {}};
            inst.bind.fill(engine_detail::kUnbound);
            if (!bind_lit(c.body[pos], atoms_[atom_id], inst)) continue;
            join(c, inst, 0, pos);
        }
    }

    static bool bind_arg(TermId pattern, TermId value, Instance& inst) {
        if (pattern == engine_detail::kNoArg) return value == engine_detail::kNoArg;
        if (engine_detail::is_var_arg(pattern)) {
            int v = engine_detail::var_index(pattern);
            if (inst.bind[v] == engine_detail::kUnbound) {
                inst.bind[v] = value;
                return true;
            }
            return inst.bind[v] == value;
        }
        return pattern == value;
    }

    static bool bind_lit(const ILit& lit, const AtomRec& rec, Instance& inst) {
        return bind_arg(lit.a, rec.a, inst) && bind_arg(lit.b, rec.b, inst);
    }

    /// Pattern argument under a (possibly partial) binding. kUnbound marks
    /// a variable the join has not bound yet; kNoArg marks a missing
    /// argument position.
    TermId resolve(TermId pattern, const Instance& inst) const {
        if (engine_detail::is_var_arg(pattern)) return inst.bind[engine_detail::var_index(pattern)];
        return pattern;
    }

    void join(const IClause& c, Instance inst, std::uint32_t pos, std::uint32_t skip) {
        if (pos == c.body.size()) {
            agenda_.push_back(inst);
            return;
        }
        if (pos == skip) {
            join(c, inst, pos + 1, skip);
            return;
        }
        const ILit& lit = c.body[pos];
        TermId a = resolve(lit.a, inst);
        TermId b = resolve(lit.b, inst);
        bool a_ground = a != engine_detail::kUnbound;
        bool b_ground = b != engine_detail::kUnbound;

        auto try_atom = [&](std::uint32_t id) {
            Instance next = inst;
            if (bind_lit(lit, atoms_[id], next)) join(c, next, pos + 1, skip);
        };

        if (a_ground && b_ground) {
            if (atom_set_.count(engine_detail::pack_atom(lit.pred, a, b)))
                join(c, inst, pos + 1, skip);
            return;
        }
        if (a_ground && lit.a != engine_detail::kNoArg) {
            auto it = by_arg0_.find(engine_detail::pack_parg(lit.pred, a));
            if (it == by_arg0_.end()) return;
            for (std::uint32_t id : it->second) try_atom(id);
            return;
        }
        if (b_ground && lit.b != engine_detail::kNoArg) {
            auto it = by_arg1_.find(engine_detail::pack_parg(lit.pred, b));
            if (it == by_arg1_.end()) return;
            for (std::uint32_t id : it->second) try_atom(id);
            return;
        }
        if (lit.pred < by_pred_.size())
            for (std::uint32_t id : by_pred_[lit.pred]) try_atom(id);
    }

    // ---- instance processing ----------------------------------------------

    const IClause& clause_of(std::uint32_t tag) const {
        return tag & kBaseTag ? prog_.base_disjunctions[tag & ~kBaseTag] : prog_.rules[tag];
    }

    bool head_lit_satisfied(const ILit& h, const Instance& inst) {
        TermId a = resolve(h.a, inst);
        TermId b = resolve(h.b, inst);
        const auto& info = prog_.preds[h.pred];
        if (has_atom(h.pred, a, b)) return true;
        if (info.kind == AtomKind::Exists) return witness_exists(h.pred, a);
        return false;
    }

    bool witness_exists(PredId exists_pred, TermId owner) {
        const auto& info = prog_.preds[exists_pred];
        const auto& index = info.ex_role.inverted ? by_arg1_ : by_arg0_;
        auto it = index.find(engine_detail::pack_parg(info.role_pred, owner));
        if (it == index.end()) return false;
        for (std::uint32_t id : it->second) {
            TermId w = info.ex_role.inverted ? atoms_[id].a : atoms_[id].b;
            if (info.ex_filler_positive) {
                if (has_atom(info.filler_pred, w, engine_detail::kNoArg)) return true;
            } else {
                if (constraint_set_.count(engine_detail::pack_parg(info.filler_pred, w)))
                    return true;
            }
        }
        return false;
    }

    bool apply_head(const ILit& h, const Instance& inst, std::uint32_t level) {
        TermId a = resolve(h.a, inst);
        TermId b = resolve(h.b, inst);
        return add_atom(h.pred, a, b, level);
    }

    std::uint32_t body_level(const IClause& c, const Instance& inst) {
        std::uint32_t lvl = 0;
        for (const auto& lit : c.body)
            lvl = std::max(lvl, atom_level(lit.pred, resolve(lit.a, inst), resolve(lit.b, inst)));
        return lvl;
    }

    /// Processes one agenda instance: deterministic heads apply at once,
    /// disjunctive ones are deferred until propagation is exhausted.
    /// Returns false on clash.
    bool process(const Instance& inst) {
        const IClause& c = clause_of(inst.clause);
        for (const auto& h : c.head)
            if (head_lit_satisfied(h, inst)) return true;
        if (c.head.empty()) {
            blame(body_level(c, inst));
            trace_clash("empty-head");
            return false;
        }
        if (c.head.size() == 1) return apply_head(c.head[0], inst, body_level(c, inst));
        deferred_.push_back(inst);
        return true;
    }

    /// Branches on one deferred, still-violated disjunction. Disjunct
    /// order: cost-free binary Neg atoms (which end flipped-clause
    /// cascades), other cost-free non-generating atoms, existentials, and
    /// Gamma members last.
    bool branch(const Instance& inst) {
        const IClause& c = clause_of(inst.clause);
        ChoicePoint cp;
        cp.inst = inst;
        cp.order.reserve(c.head.size());
        std::vector<std::uint8_t> plain_mid, exists_mid, gamma_late;
        for (std::uint8_t i = 0; i < c.head.size(); ++i) {
            const ILit& h = c.head[i];
            TermId a = resolve(h.a, inst);
            TermId b = resolve(h.b, inst);
            const auto& info = prog_.preds[h.pred];
            if (gamma_codes_.count(engine_detail::pack_atom(h.pred, a, b)))
                gamma_late.push_back(i);
            else if (info.kind == AtomKind::Exists)
                exists_mid.push_back(i);
            else if (info.kind == AtomKind::NegRole)
                cp.order.push_back(i);
            else
                plain_mid.push_back(i);
        }
        cp.order.insert(cp.order.end(), plain_mid.begin(), plain_mid.end());
        cp.order.insert(cp.order.end(), exists_mid.begin(), exists_mid.end());
        cp.order.insert(cp.order.end(), gamma_late.begin(), gamma_late.end());
        cp.trail = trail_.size();
        cp.agenda = agenda_.size();
        cp.cursor = cursor_;
        cp.resume = resume_;
        cp.deferred = deferred_.size();
        cp.deferred_cursor = deferred_cursor_;
        cps_.push_back(cp);
        trace_branch(cps_.back(), 0);
        return apply_head(c.head[cps_.back().order[0]], inst,
                          static_cast<std::uint32_t>(cps_.size()));
    }

    bool instance_violated(const Instance& inst) {
        const IClause& c = clause_of(inst.clause);
        for (const auto& h : c.head)
            if (head_lit_satisfied(h, inst)) return false;
        return true;
    }

    bool has_gamma_disjunct(const Instance& inst) {
        const IClause& c = clause_of(inst.clause);
        for (const auto& h : c.head) {
            TermId a = resolve(h.a, inst);
            TermId b = resolve(h.b, inst);
            if (gamma_codes_.count(engine_detail::pack_atom(h.pred, a, b))) return true;
        }
        return false;
    }

    // ---- existential expansion and blocking --------------------------------

    void refresh_sigs() {
        while (!dirty_list_.empty()) {
            TermId t = dirty_list_.back();
            dirty_list_.pop_back();
            if (t >= term_count_) continue;  // undone fresh individual
            dirty_[static_cast<std::size_t>(t)] = 0;
            if (!is_fresh(t)) continue;
            std::uint64_t h = sig_hash(t);
            if (last_bucket_hash_[static_cast<std::size_t>(t)] == h) continue;
            trail_.push_back({TrailEntry::Kind::Bucket, static_cast<std::uint32_t>(t), h,
                              last_bucket_hash_[static_cast<std::size_t>(t)]});
            sig_buckets_[h].push_back(t);
            last_bucket_hash_[static_cast<std::size_t>(t)] = h;
        }
    }

    /// Blocking signature of a fresh term, cached against the label
    /// version. The version also covers changes to the parent's label
    /// (mark_dirty bumps every child when the parent changes).
    const std::vector<std::uint64_t>& sig_of(TermId t) {
        auto& entry = sig_cache_[static_cast<std::size_t>(t)];
        std::uint32_t v = label_version_[static_cast<std::size_t>(t)] + 1;
        if (entry.first == v) return entry.second;
        std::vector<std::uint64_t>& out = entry.second;
        out.clear();
        auto push_sorted = [&out](std::vector<std::uint64_t>&& vec) {
            std::sort(vec.begin(), vec.end());
            vec.erase(std::unique(vec.begin(), vec.end()), vec.end());
            out.insert(out.end(), vec.begin(), vec.end());
            out.push_back(UINT64_MAX);  // separator
        };
        auto widen = [](const std::vector<PredId>& vec) {
            return std::vector<std::uint64_t>(vec.begin(), vec.end());
        };
        TermId parent = fresh_[t - prog_.named.size()].parent;
        push_sorted(widen(unary_label_[static_cast<std::size_t>(t)]));
        push_sorted(widen(constraint_label_[static_cast<std::size_t>(t)]));
        push_sorted(std::vector<std::uint64_t>(edge_label_[static_cast<std::size_t>(t)]));
        push_sorted(widen(unary_label_[static_cast<std::size_t>(parent)]));
        push_sorted(widen(constraint_label_[static_cast<std::size_t>(parent)]));
        entry.first = v;
        return entry.second;
    }

    std::uint64_t sig_hash(TermId t) {
        std::uint64_t h = 1469598103934665603ull;
        for (std::uint64_t x : sig_of(t)) {
            h ^= x;
            h *= 1099511628211ull;
        }
        return h | 1;  // zero is reserved for "never inserted"
    }

    /// Blocker of u, or kNoArg. Valid only between mutations (memoized on
    /// trail size).
    TermId blocker_of(TermId u) {
        if (!is_fresh(u)) return engine_detail::kNoArg;
        if (block_stamp_ != trail_.size()) {
            block_memo_.clear();
            block_stamp_ = trail_.size();
        }
        auto memo = block_memo_.find(u);
        if (memo != block_memo_.end()) return memo->second;
        block_memo_[u] = engine_detail::kNoArg;  // cut recursion on cycles

        std::vector<std::uint64_t> sig_u = sig_of(u);
        std::uint64_t h = sig_hash(u);
        TermId result = engine_detail::kNoArg;
        auto it = sig_buckets_.find(h);
        if (it != sig_buckets_.end()) {
            for (TermId v : it->second) {
                if (v >= u || v >= term_count_ || !is_fresh(v)) continue;
                if (sig_of(v) != sig_u) continue;
                if (blocker_of(v) != engine_detail::kNoArg) continue;  // blocker must be unblocked
                result = v;
                break;
            }
        }
        block_memo_[u] = result;
        return result;
    }

    /// Directly or indirectly blocked: the node itself or one of its fresh
    /// ancestors has a blocker. Descendants of blocked nodes must not
    /// expand; this is what terminates chains whose labels lag one step
    /// behind the pattern behind them (inverse-role back-propagation).
    bool blocked_here_or_above(TermId u) {
        for (TermId t = u; is_fresh(t); t = fresh_[t - prog_.named.size()].parent)
            if (blocker_of(t) != engine_detail::kNoArg) return true;
        return false;
    }

    /// Finds and performs one existential expansion. Returns:
    ///   1  expanded or resolved something (state changed or pending settled)
    ///   0  nothing to do (saturated w.r.t. expansions)
    ///  -1  clash during expansion
    int expand_step() {
        refresh_sigs();
        std::size_t n = pendings_.size();
        if (n == 0) return 0;
        for (std::size_t k = 0; k < n; ++k) {
            std::size_t i = (resume_ + k) % n;
            Pending& p = pendings_[i];
            if (p.done) continue;
            if (witness_exists(p.pred, p.owner)) {
                p.done = true;
                trail_.push_back(
                    {TrailEntry::Kind::PendingDone, static_cast<std::uint32_t>(i), 0, 0});
                resume_ = i + 1;
                return 1;
            }
            if (blocked_here_or_above(p.owner)) {
                if (opts_.trace)
                    *opts_.trace << "block node=" << term_of(p.owner).text() << "\n";
                ++stats_.blocks;
                continue;
            }
            resume_ = i + 1;
            return expand(i) ? 1 : -1;
        }
        return 0;
    }

    bool expand(std::size_t pending_idx) {
        Pending& p = pendings_[pending_idx];
        const auto& info = prog_.preds[p.pred];
        if (fresh_.size() >= opts_.max_fresh)
            throw ResourceLimitError("fresh-individual ceiling reached (" +
                                     std::to_string(opts_.max_fresh) + ")");
        if (term_count_ >= static_cast<TermId>((1u << 22) - 2))
            throw ResourceLimitError("term table limit reached");
        TermId u = term_count_;
        fresh_.push_back(FreshInfo{p.owner});
        ++term_count_;
        ++stats_.fresh_created;
        grow_term_arrays();
        unary_label_[static_cast<std::size_t>(u)].clear();
        constraint_label_[static_cast<std::size_t>(u)].clear();
        edge_label_[static_cast<std::size_t>(u)].clear();
        children_[static_cast<std::size_t>(u)].clear();
        label_version_[static_cast<std::size_t>(u)] += 1;
        sig_cache_[static_cast<std::size_t>(u)].first = 0;
        last_bucket_hash_[static_cast<std::size_t>(u)] = 0;
        dirty_[static_cast<std::size_t>(u)] = 0;
        children_[static_cast<std::size_t>(p.owner)].push_back(u);
        trail_.push_back({TrailEntry::Kind::Fresh, static_cast<std::uint32_t>(u), 0, 0});
        mark_dirty(u);

        p.done = true;
        trail_.push_back(
            {TrailEntry::Kind::PendingDone, static_cast<std::uint32_t>(pending_idx), 0, 0});

        bool ok;
        if (info.ex_role.inverted)
            ok = add_atom(info.role_pred, u, p.owner, p.level);
        else
            ok = add_atom(info.role_pred, p.owner, u, p.level);
        if (!ok) return false;
        if (info.ex_filler_positive)
            return add_atom(info.filler_pred, u, engine_detail::kNoArg, p.level);
        return add_constraint(info.filler_pred, u, p.level);
    }

    // ---- DFS driver --------------------------------------------------------

    /// Runs the DFS. on_model returns true to stop at that model. Returns
    /// true when stopped at a model, false when the tree is exhausted.
    bool run(const std::function<bool(Search&)>& on_model) {
        for (;;) {
            if (clash_) {
                std::optional<std::size_t> jump = clash_blame_;
                clash_blame_.reset();
                if (!backtrack(jump)) return false;
                continue;
            }
            if (cursor_ < agenda_.size()) {
                Instance inst = agenda_[cursor_];
                ++cursor_;
                if (!process(inst)) clash_ = true;
                continue;
            }
            if (deferred_cursor_ < deferred_.size()) {
                // satisfied instances stay satisfied within a branch
                while (deferred_cursor_ < deferred_.size() &&
                       !instance_violated(deferred_[deferred_cursor_]))
                    ++deferred_cursor_;
                if (deferred_cursor_ < deferred_.size()) {
                    // cost-relevant disjunctions branch first: under a cost
                    // bound this prunes whole cost-free subtrees at once.
                    // A picked instance becomes satisfied by its chosen
                    // disjunct, so later scans skip it; the list itself is
                    // never reordered (rollback restores it by size).
                    std::size_t pick = deferred_cursor_;
                    if (bound_) {
                        for (std::size_t i = deferred_cursor_; i < deferred_.size(); ++i) {
                            if (!instance_violated(deferred_[i])) continue;
                            if (has_gamma_disjunct(deferred_[i])) {
                                pick = i;
                                break;
                            }
                        }
                    }
                    Instance inst = deferred_[pick];
                    if (pick == deferred_cursor_) ++deferred_cursor_;
                    if (!branch(inst)) clash_ = true;
                    continue;
                }
                continue;
            }
            int e = expand_step();
            if (e == 1) continue;
            if (e == -1) {
                clash_ = true;
                continue;
            }
            // saturated open branch
            if (opts_.trace)
                *opts_.trace << "model cost=" << cost_ << " atoms=" << atoms_.size() << "\n";
            if (on_model(*this)) return true;
            if (!backtrack()) return false;
        }
    }

    bool backtrack(std::optional<std::size_t> blame_level = {}) {
        ++stats_.branches_closed;
        if (stats_.branches_closed > opts_.max_branch_closures)
            throw ResourceLimitError("branch-closure ceiling reached (" +
                                     std::to_string(opts_.max_branch_closures) + ")");
        while (!cps_.empty()) {
            if (blame_level && cps_.size() > *blame_level) {
                // siblings of this choicepoint cannot shed the offending
                // cost: discard without exploring them
                undo_to(cps_.back().trail);
                agenda_.resize(cps_.back().agenda);
                cursor_ = cps_.back().cursor;
                resume_ = cps_.back().resume;
                deferred_.resize(cps_.back().deferred);
                deferred_cursor_ = cps_.back().deferred_cursor;
                cps_.pop_back();
                continue;
            }
            blame_level.reset();
            ChoicePoint& cp = cps_.back();
            undo_to(cp.trail);
            agenda_.resize(cp.agenda);
            cursor_ = cp.cursor;
            resume_ = cp.resume;
            deferred_.resize(cp.deferred);
            deferred_cursor_ = cp.deferred_cursor;
            clash_ = false;
            if (++cp.next < cp.order.size()) {
                trace_branch(cp, cp.next);
                const IClause& c = clause_of(cp.inst.clause);
                if (!apply_head(c.head[cp.order[cp.next]], cp.inst,
                                static_cast<std::uint32_t>(cps_.size())))
                    clash_ = true;
                return true;
            }
            cps_.pop_back();
        }
        return false;
    }

    void undo_to(std::size_t target) {
        while (trail_.size() > target) {
            TrailEntry e = trail_.back();
            trail_.pop_back();
            switch (e.kind) {
                case TrailEntry::Kind::Atom: {
                    AtomRec rec = atoms_.back();
                    atoms_.pop_back();
                    atom_set_.erase(engine_detail::pack_atom(rec.pred, rec.a, rec.b));
                    by_pred_[rec.pred].pop_back();
                    const auto& info = prog_.preds[rec.pred];
                    if (info.arity >= 1)
                        by_arg0_[engine_detail::pack_parg(rec.pred, rec.a)].pop_back();
                    if (info.arity == 2)
                        by_arg1_[engine_detail::pack_parg(rec.pred, rec.b)].pop_back();
                    if (rec.gamma) {
                        --cost_;
                        gamma_hits_.pop_back();
                        gamma_levels_.pop_back();
                    }
                    if (rec.unary_labeled) {
                        unary_label_[static_cast<std::size_t>(rec.a)].pop_back();
                        mark_dirty(rec.a);
                    }
                    if (rec.edge_labeled) {
                        TermId child =
                            is_fresh(rec.b) && fresh_[rec.b - prog_.named.size()].parent == rec.a
                                ? rec.b
                                : rec.a;
                        edge_label_[static_cast<std::size_t>(child)].pop_back();
                        mark_dirty(child);
                    }
                    if (rec.adjacency) {
                        adjacency_[static_cast<std::size_t>(rec.a)].pop_back();
                        adjacency_[static_cast<std::size_t>(rec.b)].pop_back();
                    }
                    break;
                }
                case TrailEntry::Kind::Constraint: {
                    ConstraintRec rec = constraints_.back();
                    constraints_.pop_back();
                    constraint_set_.erase(engine_detail::pack_parg(rec.pred, rec.term));
                    constraint_label_[static_cast<std::size_t>(rec.term)].pop_back();
                    mark_dirty(rec.term);
                    break;
                }
                case TrailEntry::Kind::Fresh: {
                    TermId u = static_cast<TermId>(e.x);
                    children_[static_cast<std::size_t>(fresh_.back().parent)].pop_back();
                    fresh_.pop_back();
                    --term_count_;
                    (void)u;
                    break;
                }
                case TrailEntry::Kind::Pending:
                    pendings_.pop_back();
                    break;
                case TrailEntry::Kind::PendingDone:
                    pendings_[e.x].done = false;
                    break;
                case TrailEntry::Kind::Activate:
                    active_[e.x] = 0;
                    break;
                case TrailEntry::Kind::Bucket: {
                    sig_buckets_[e.y].pop_back();
                    last_bucket_hash_[e.x] = e.z;
                    break;
                }
                case TrailEntry::Kind::Forbid: {
                    for (std::uint64_t c : forbidden_.back()) forbidden_index_[c].pop_back();
                    forbidden_.pop_back();
                    break;
                }
            }
        }
    }

    // ---- model extraction ---------------------------------------------------

    Model extract_model() {
        Model m;
        m.cost = cost_;
        m.fresh_count = fresh_.size();
        for (const auto& [pred, args] : gamma_hits_)
            m.gamma_atoms.push_back(decode(pred, args[0], args[1]));
        detail::sort_unique(m.gamma_atoms);
        if (!opts_.materialize_models) return m;

        refresh_sigs();
        std::size_t named_n = prog_.named.size();
        // directly blocked -> blocker; indirectly blocked (descendants) dropped
        std::vector<TermId> redirect(term_count_);
        std::vector<std::uint8_t> dropped(static_cast<std::size_t>(term_count_), 0);
        for (TermId t = 0; t < term_count_; ++t) redirect[static_cast<std::size_t>(t)] = t;
        for (TermId t = static_cast<TermId>(named_n); t < term_count_; ++t) {
            TermId parent = fresh_[t - named_n].parent;
            if (is_fresh(parent) && (dropped[static_cast<std::size_t>(parent)] ||
                                     redirect[static_cast<std::size_t>(parent)] != parent)) {
                dropped[static_cast<std::size_t>(t)] = 1;
                continue;
            }
            TermId b = blocker_of(t);
            if (b != engine_detail::kNoArg) redirect[static_cast<std::size_t>(t)] = b;
        }

        for (const auto& rec : atoms_) {
            const auto& info = prog_.preds[rec.pred];
            TermId a = rec.a, b = rec.b;
            if (info.arity >= 1) {
                if (dropped[static_cast<std::size_t>(a)]) continue;
                if (info.arity == 1 && redirect[static_cast<std::size_t>(a)] != a)
                    continue;  // unary atom on a directly blocked node
            }
            if (info.arity == 2 && dropped[static_cast<std::size_t>(b)]) continue;
            if (info.arity >= 1) a = redirect[static_cast<std::size_t>(a)];
            if (info.arity == 2) b = redirect[static_cast<std::size_t>(b)];
            m.atoms.push_back(decode(rec.pred, a, b));
        }
        detail::sort_unique(m.atoms);

        for (TermId t = 0; t < term_count_; ++t)
            if (t < static_cast<TermId>(named_n) ||
                (!dropped[static_cast<std::size_t>(t)] && redirect[static_cast<std::size_t>(t)] == t))
                m.domain.push_back(term_of(t));
        return m;
    }

    // ---- tracing -------------------------------------------------------------

    void trace_branch(const ChoicePoint& cp, std::size_t k) {
        if (!opts_.trace) return;
        const IClause& c = clause_of(cp.inst.clause);
        TermId a = resolve(c.head[cp.order[k]].a, cp.inst);
        TermId b = resolve(c.head[cp.order[k]].b, cp.inst);
        *opts_.trace << "branch clause=" << (cp.inst.clause & ~kBaseTag) << " disjunct=" << k + 1
                     << "/" << cp.order.size() << " atom="
                     << decode(c.head[cp.order[k]].pred, a, b).text() << "\n";
    }

    void trace_clash(const char* kind) {
        if (opts_.trace) *opts_.trace << "clash kind=" << kind << "\n";
    }
};

// ── Free-function operations ────────────────────────────────────────────────

/// Bounded saturation search; see the class above for semantics.
inline SearchResult find_model(const PreparedProgram& prog, const std::vector<Atom>& gamma,
                               std::size_t cost_bound, const SearchOptions& opts = {}) {
    Search s(prog, gamma, opts);
    return s.find(cost_bound);
}

/// Iterative deepening over the cost bound: 0, 1, 2, ... until a model or a
/// bound-independent refutation is found. A returned model has minimum
/// possible |M ∩ Gamma| and is therefore Gamma-minimal.
inline SearchResult find_gamma_minimal_model(const PreparedProgram& prog,
                                             const std::vector<Atom>& gamma,
                                             const SearchOptions& opts = {}) {
    Search s(prog, gamma, opts);
    for (std::size_t bound = 0;; ++bound) {
        SearchResult r = s.find(bound);
        if (r.kind != SearchResult::Kind::BoundExhausted) return r;
        if (bound > gamma.size()) return r;  // cost can never exceed |Gamma|
    }
}

/// All models at the minimal cost level, one per distinct
/// Gamma-intersection, lexicographically ordered, up to `limit`.
inline std::vector<Model> enumerate_minimal_models(const PreparedProgram& prog,
                                                   const std::vector<Atom>& gamma,
                                                   std::size_t limit,
                                                   const SearchOptions& opts = {}) {
    Search probe(prog, gamma, opts);
    std::size_t minimal = 0;
    bool sat = false;
    for (std::size_t bound = 0; bound <= gamma.size() + 1; ++bound) {
        SearchResult r = probe.find(bound);
        if (r.kind == SearchResult::Kind::Unsatisfiable) return {};
        if (r.kind == SearchResult::Kind::ModelFound) {
            minimal = bound;
            sat = true;
            break;
        }
    }
    if (!sat) return {};
    std::vector<Model> all = probe.enumerate(minimal);
    if (all.size() > limit) all.resize(limit);
    return all;
}

/// Cost-unbounded satisfiability; terminates via blocking.
inline bool is_satisfiable(const PreparedProgram& prog, const SearchOptions& opts = {}) {
    Search s(prog, {}, opts);
    return s.find(std::nullopt).found();
}

// ── Direct clause evaluation ────────────────────────────────────────────────

/// Satisfaction of one DL-clause in a finite Herbrand-style model: for every
/// mapping of the clause variables into the domain, some head atom must hold
/// whenever all body atoms hold. An existential head atom holds at s iff
/// some witness u in the domain has the role edge and the filler condition.
inline bool evaluate(const Model& model, const DLClause& clause, const std::vector<Term>& domain) {
    std::set<Atom> atom_set(model.atoms.begin(), model.atoms.end());
    std::vector<std::string> vars;
    auto collect_var = [&vars](const Term& t) {
        if (t.is_var() && std::find(vars.begin(), vars.end(), t.name) == vars.end())
            vars.push_back(t.name);
    };
    for (const auto& a : clause.body) {
        collect_var(a.s);
        collect_var(a.t);
    }
    for (const auto& a : clause.head) {
        collect_var(a.s);
        collect_var(a.t);
    }

    std::map<std::string, Term> mu;
    auto subst = [&mu](const Term& t) { return t.is_var() ? mu.at(t.name) : t; };

    auto ground_holds = [&](const Atom& a) {
        Atom g = a;
        if (g.arity() >= 1) g.s = subst(a.s);
        if (g.arity() == 2) g.t = subst(a.t);
        if (g.kind != AtomKind::Exists) return atom_set.count(g) > 0;
        for (const auto& u : domain) {
            Atom edge = Atom::role_atom(g.ex_role, g.s, u);
            if (!atom_set.count(edge)) continue;
            bool filler_in = atom_set.count(Atom::concept_atom(g.ex_filler, u)) > 0;
            if (g.ex_filler_positive == filler_in) return true;
        }
        return false;
    };

    std::function<bool(std::size_t)> check = [&](std::size_t i) -> bool {
        if (i == vars.size()) {
            for (const auto& b : clause.body)
                if (!ground_holds(b)) return true;  // body false: instance satisfied
            for (const auto& h : clause.head)
                if (ground_holds(h)) return true;
            return false;
        }
        for (const auto& d : domain) {
            mu[vars[i]] = d;
            if (!check(i + 1)) return false;
        }
        return true;
    };
    if (!vars.empty() && domain.empty()) return true;  // no mappings exist
    return check(0);
}

}  // namespace kbevolve

#endif  // KBEVOLVE_ENGINE_HPP
