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
// kbevolve/evolution.hpp — instance deletion, ABox repair, instance insertion
// ============================================================================
//
// Deletion of d:
//   S = ABox symbols + sigma(d); search K* u {Neg(d) <- TOP} for a
//   Neg(A)-minimal model M; removed = Del(M) = {A in ABox | Neg(A) in M}.
//   If the set is unsatisfiable and the knowledge base is consistent, fall
//   back to removing every assertion that mentions an individual of d
//   (individual-removal mode); on an inconsistent knowledge base the result
//   is status input_inconsistent (repair first).
//
// Repair:
//   Replace empty heads of Xi(T) by `false`, track ABox+TBox symbols plus
//   false, add Negfalse <- TOP, and read repairs off Neg(A)-minimal models.
//   A model always exists, so repair always succeeds; a consistent input
//   yields an empty removal set.
//
// Insertion of d:
//   Run the repair construction on ABox u {d} with the extra ground
//   constraint _|_ <- Neg(d), so every model keeps d. If that search is
//   unsatisfiable the insertion is impossible.
//
// Entailment (T u A |= d) is decided without the renamer: Xi(T) u Xi(A) u
// {_|_ <- d} is tested for satisfiability. Individuals are the ones that
// occur in the ABox; an assertion about an individual unknown to the ABox
// is never entailed. This named-individual reading matches the deletion
// semantics above.
//
// An EvolutionContext caches the clausified TBox, the consistency checks,
// and a loaded engine per knowledge base, so a batch of requests against
// one knowledge base pays the per-KB setup once. When the knowledge base
// is consistent the cached engine runs in lazy-domain mode, which keeps the
// per-request search local to the individuals the request touches.
// ============================================================================

#ifndef KBEVOLVE_EVOLUTION_HPP
#define KBEVOLVE_EVOLUTION_HPP

#include <chrono>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "kbevolve/clausifier.hpp"
#include "kbevolve/engine.hpp"
#include "kbevolve/kb.hpp"
#include "kbevolve/renamer.hpp"

namespace kbevolve {

struct TBoxInconsistentError : std::runtime_error {
    TBoxInconsistentError() : std::runtime_error("the TBox is inconsistent") {}
};

enum class EvolutionStatus { Ok, Impossible, InputInconsistent };
enum class EvolutionMode { ModelBased, IndividualRemoval };

struct EvolutionStats {
    std::size_t bound = 0;
    std::size_t branches = 0;
    std::size_t fresh = 0;
    double wall_ms = 0.0;
};

struct EvolutionResult {
    EvolutionStatus status = EvolutionStatus::Ok;
    EvolutionMode mode = EvolutionMode::ModelBased;
    std::vector<Assertion> removed;  // subset of the original ABox, sorted
    std::optional<Assertion> added;
    std::size_t cost = 0;  // |M ∩ Neg(A)| of the witnessing model
    EvolutionStats stats;

    std::shared_ptr<const std::vector<Assertion>> base_abox;

    /// (original ABox u added) \ removed; materialized on demand.
    std::vector<Assertion> resulting_abox() const {
        std::vector<Assertion> out;
        if (base_abox) {
            out.reserve(base_abox->size() + 1);
            for (const auto& a : *base_abox)
                if (!std::binary_search(removed.begin(), removed.end(), a)) out.push_back(a);
        }
        if (added) out.push_back(*added);
        detail::sort_unique(out);
        return out;
    }

    std::size_t kept() const {
        std::size_t base = base_abox ? base_abox->size() : 0;
        bool added_new = added && base_abox &&
                         !std::binary_search(base_abox->begin(), base_abox->end(), *added);
        return base - removed.size() + (added_new ? 1 : 0);
    }
};

// ── Del(M) ──────────────────────────────────────────────────────────────────

/// The ABox assertions whose Neg image appears in the model.
inline std::vector<Assertion> del_of_model(const Model& m, const std::vector<Assertion>& abox) {
    std::set<Atom> atoms(m.atoms.begin(), m.atoms.end());
    std::vector<Assertion> out;
    for (const auto& a : abox)
        if (atoms.count(neg(a))) out.push_back(a);
    return out;
}

namespace detail {

inline SymbolRef sigma_of(const Assertion& a) {
    return a.is_role ? SymbolRef{SymbolRef::Kind::Role, a.pred, a.pred}
                     : SymbolRef{SymbolRef::Kind::Concept, a.pred, a.pred};
}

inline Atom plain_atom(const Assertion& a) {
    return a.is_role ? Atom::role_atom(a.pred, Term::named(a.a), Term::named(a.b))
                     : Atom::concept_atom(a.pred, Term::named(a.a));
}

inline std::vector<Assertion> gamma_hits_to_assertions(const std::vector<Atom>& gamma_atoms) {
    std::vector<Assertion> out;
    for (const auto& g : gamma_atoms) {
        if (g.kind == AtomKind::NegConcept)
            out.push_back(Assertion::concept_of(g.pred, g.s.name));
        else if (g.kind == AtomKind::NegRole)
            out.push_back(Assertion::role_of(g.pred, g.s.name, g.t.name));
    }
    sort_unique(out);
    return out;
}

constexpr const char* kProbeIndividual = "__probe";

}  // namespace detail

// ── Context ─────────────────────────────────────────────────────────────────

class EvolutionContext {
    struct AboxIndex {
        std::set<std::string> concepts, roles, individuals;
    };

public:
    explicit EvolutionContext(KnowledgeBase kb, SearchOptions opts = {})
        : kb_(std::move(kb)), opts_(opts) {
        abox_ptr_ = std::make_shared<const std::vector<Assertion>>(kb_.abox);
        xi_t_ = clausify_tbox(kb_.tbox, kb_.rbox);
    }

    const KnowledgeBase& kb() const { return kb_; }
    const ClauseSet& xi_tbox() const { return xi_t_; }

    /// Builds the consistency verdicts and the cached deletion machinery up
    /// front, so a batch of delete requests pays no setup inside the first
    /// timed call.
    void warm_up() {
        if (!tbox_consistent()) throw TBoxInconsistentError();
        consistent();
        abox_index();
        cached_delete_engine();
    }

    bool tbox_consistent() {
        if (!tbox_consistent_) {
            PreparedProgram p = ground_prepare(xi_t_, {detail::kProbeIndividual});
            tbox_consistent_ = is_satisfiable(p, full_opts());
        }
        return *tbox_consistent_;
    }

    /// Consistency of T u A under the named-individual reading.
    bool consistent() {
        if (!kb_consistent_) {
            ClauseSet all = xi_t_;
            all.add_all(clausify_abox(kb_.abox));
            std::vector<std::string> inds = kb_.individuals();
            if (inds.empty()) inds.push_back(detail::kProbeIndividual);
            PreparedProgram p = ground_prepare(all, inds);
            kb_consistent_ = is_satisfiable(p, full_opts());
        }
        return *kb_consistent_;
    }

    /// T u A |= d, tested without the renamer.
    bool entails(const Assertion& d) {
        ClauseSet all = xi_t_;
        all.add_all(clausify_abox(kb_.abox));
        all.add(DLClause({}, {detail::plain_atom(d)}), "goal " + d.text());
        std::vector<std::string> inds = kb_.individuals();
        if (inds.empty()) inds.push_back(detail::kProbeIndividual);
        PreparedProgram p = ground_prepare(all, inds);
        return !is_satisfiable(p, full_opts());
    }

    EvolutionResult delete_instance(const Assertion& d,
                                    std::optional<std::size_t> max_bound = {}) {
        if (!tbox_consistent()) throw TBoxInconsistentError();
        auto t0 = std::chrono::steady_clock::now();
        EvolutionResult res;
        res.base_abox = abox_ptr_;

        // The cached machinery tracks exactly the ABox symbols; a request
        // whose symbol or individuals are foreign to the ABox gets its own
        // one-shot machinery with sigma(d) added to S.
        DeleteEngine local;
        DeleteEngine* de;
        if (delete_request_cacheable(d)) {
            de = &cached_delete_engine();
        } else {
            local = build_delete_engine(&d);
            de = &local;
        }
        Search& search = *de->search;
        auto mark = search.mark();
        std::size_t branches0 = search.stats().branches_closed;
        std::size_t fresh0 = search.stats().fresh_created;

        std::size_t cap = std::min<std::size_t>(kb_.abox.size() + 1,
                                                max_bound.value_or(kb_.abox.size() + 1));
        SearchResult r;
        try {
            search.add_fact(neg(d));
            r = find_minimal(search, cap);
        } catch (...) {
            search.rollback(mark);
            throw;
        }
        search.rollback(mark);
        if (r.kind == SearchResult::Kind::BoundExhausted && max_bound &&
            cap == *max_bound)
            throw ResourceLimitError("cost-bound cap of " + std::to_string(*max_bound) +
                                     " reached without a verdict");

        if (r.kind == SearchResult::Kind::ModelFound) {
            res.status = EvolutionStatus::Ok;
            res.mode = EvolutionMode::ModelBased;
            res.removed = detail::gamma_hits_to_assertions(r.model->gamma_atoms);
            res.cost = r.model->cost;
            res.stats.bound = r.bound;
        } else if (!consistent()) {
            res.status = EvolutionStatus::InputInconsistent;
        } else {
            res.status = EvolutionStatus::Ok;
            res.mode = EvolutionMode::IndividualRemoval;
            for (const auto& a : kb_.abox) {
                bool hit = a.a == d.a || (d.is_role && a.a == d.b);
                hit = hit || (a.is_role && (a.b == d.a || (d.is_role && a.b == d.b)));
                if (hit) res.removed.push_back(a);
            }
            res.cost = res.removed.size();
        }
        res.stats.branches = search.stats().branches_closed - branches0;
        res.stats.fresh = search.stats().fresh_created - fresh0;
        res.stats.wall_ms = std::chrono::duration<double, std::milli>(
                                std::chrono::steady_clock::now() - t0)
                                .count();
        return res;
    }

    /// Enumerates alternative minimal deletions, one per distinct removal
    /// set at the minimal cost, lexicographically ordered.
    std::vector<EvolutionResult> delete_instances(const Assertion& d, std::size_t limit) {
        if (!tbox_consistent()) throw TBoxInconsistentError();
        DeleteEngine local;
        DeleteEngine* de;
        if (delete_request_cacheable(d)) {
            de = &cached_delete_engine();
        } else {
            local = build_delete_engine(&d);
            de = &local;
        }
        Search& search = *de->search;
        auto mark = search.mark();
        std::vector<EvolutionResult> out;
        try {
            search.add_fact(neg(d));
            SearchResult probe = find_minimal(search, kb_.abox.size() + 1);
            if (probe.kind == SearchResult::Kind::ModelFound) {
                for (const Model& m : search.enumerate(probe.bound)) {
                    EvolutionResult res;
                    res.base_abox = abox_ptr_;
                    res.status = EvolutionStatus::Ok;
                    res.mode = EvolutionMode::ModelBased;
                    res.removed = detail::gamma_hits_to_assertions(m.gamma_atoms);
                    res.cost = m.cost;
                    res.stats.bound = probe.bound;
                    out.push_back(std::move(res));
                    if (out.size() == limit) break;
                }
            }
        } catch (...) {
            search.rollback(mark);
            throw;
        }
        search.rollback(mark);
        if (out.empty()) out.push_back(delete_instance(d));
        return out;
    }

    std::vector<EvolutionResult> repair(bool enumerate, std::size_t limit = 16) {
        if (!tbox_consistent()) throw TBoxInconsistentError();
        auto t0 = std::chrono::steady_clock::now();
        std::vector<EvolutionResult> out;
        if (kb_.abox.empty()) {
            EvolutionResult res;
            res.base_abox = abox_ptr_;
            res.status = EvolutionStatus::Ok;
            out.push_back(std::move(res));
            return out;
        }

        ClauseSet clauses = repair_clauses(kb_);
        PreparedProgram prog = ground_prepare(clauses, kb_.individuals());
        std::vector<Atom> gamma = neg_set(kb_.abox);

        auto to_result = [&](const Model& m, std::size_t bound) {
            EvolutionResult res;
            res.base_abox = abox_ptr_;
            res.status = EvolutionStatus::Ok;
            res.removed = detail::gamma_hits_to_assertions(m.gamma_atoms);
            res.cost = m.cost;
            res.stats.bound = bound;
            res.stats.fresh = m.fresh_count;
            return res;
        };

        if (enumerate) {
            std::vector<Model> models = enumerate_minimal_models(prog, gamma, limit, full_opts());
            if (models.empty())
                throw std::logic_error("repair: no minimal model despite a consistent TBox");
            for (const auto& m : models) out.push_back(to_result(m, m.cost));
        } else {
            SearchResult r = find_gamma_minimal_model(prog, gamma, full_opts());
            if (!r.found())
                throw std::logic_error("repair: no minimal model despite a consistent TBox");
            out.push_back(to_result(*r.model, r.bound));
        }
        for (auto& res : out)
            res.stats.wall_ms = std::chrono::duration<double, std::milli>(
                                    std::chrono::steady_clock::now() - t0)
                                    .count();
        return out;
    }

    EvolutionResult insert_instance(const Assertion& d) {
        if (!tbox_consistent()) throw TBoxInconsistentError();
        auto t0 = std::chrono::steady_clock::now();
        EvolutionResult res;
        res.base_abox = abox_ptr_;

        std::vector<Assertion> abox_new = kb_.abox;
        abox_new.push_back(d);
        detail::sort_unique(abox_new);
        KnowledgeBase kb_new(kb_.rbox, kb_.tbox, abox_new);

        ClauseSet clauses = repair_clauses(kb_new);
        clauses.add(DLClause({}, {neg(d)}), "keep " + d.text());
        PreparedProgram prog = ground_prepare(clauses, kb_new.individuals());
        std::vector<Atom> gamma = neg_set(abox_new);

        SearchResult r = find_gamma_minimal_model(prog, gamma, full_opts());
        if (r.found()) {
            res.status = EvolutionStatus::Ok;
            res.added = d;
            res.removed = detail::gamma_hits_to_assertions(r.model->gamma_atoms);
            res.cost = r.model->cost;
            res.stats.bound = r.bound;
            res.stats.fresh = r.model->fresh_count;
        } else {
            res.status = EvolutionStatus::Impossible;
        }
        res.stats.wall_ms = std::chrono::duration<double, std::milli>(
                                std::chrono::steady_clock::now() - t0)
                                .count();
        return res;
    }

private:
    struct DeleteEngine {
        TrackedSymbolSet tracked;
        std::vector<std::string> named;
        std::unique_ptr<PreparedProgram> prog;
        std::unique_ptr<Search> search;
    };

    SearchOptions full_opts() const {
        SearchOptions o = opts_;
        o.lazy_domain = false;
        o.materialize_models = true;
        return o;
    }

    static SearchResult find_minimal(Search& s, std::size_t max_bound) {
        for (std::size_t bound = 0;; ++bound) {
            SearchResult r = s.find(bound);
            if (r.kind != SearchResult::Kind::BoundExhausted) return r;
            if (bound > max_bound) return r;
        }
    }

    ClauseSet repair_clauses(const KnowledgeBase& base) const {
        ClauseSet falsified = falsify(xi_t_);
        TrackedSymbolSet s = tracked_symbols(base, TrackedMode::AboxAndTbox, {}, true);
        ClauseSet clauses = kstar_from(falsified, base.abox, s);
        clauses.add(DLClause::fact(Atom::neg_false()), "Negfalse");
        return clauses;
    }

    /// True when the request's symbol occurs in the ABox and its
    /// individuals are ABox individuals, i.e. the ABox-symbol machinery
    /// already covers it.
    const AboxIndex& abox_index() {
        if (!abox_index_) {
            abox_index_.emplace();
            for (const auto& a : kb_.abox) {
                (a.is_role ? abox_index_->roles : abox_index_->concepts).insert(a.pred);
                abox_index_->individuals.insert(a.a);
                if (a.is_role) abox_index_->individuals.insert(a.b);
            }
            auto sig = kb_.signature();
            abox_index_->individuals.insert(sig.individuals.begin(), sig.individuals.end());
        }
        return *abox_index_;
    }

    bool delete_request_cacheable(const Assertion& d) {
        abox_index();
        if (!(d.is_role ? abox_index_->roles : abox_index_->concepts).count(d.pred)) return false;
        if (!abox_index_->individuals.count(d.a)) return false;
        if (d.is_role && !abox_index_->individuals.count(d.b)) return false;
        return true;
    }

    DeleteEngine& cached_delete_engine() {
        if (!cached_.prog) cached_ = build_delete_engine(nullptr);
        return cached_;
    }

    /// K* machinery for deletion: S = ABox symbols (+ sigma(d) for a
    /// one-shot request), individuals = ABox individuals (+ Ind(d)).
    DeleteEngine build_delete_engine(const Assertion* d) {
        std::vector<SymbolRef> extras;
        std::vector<std::string> named = kb_.individuals();
        if (d) {
            extras.push_back(detail::sigma_of(*d));
            named.push_back(d->a);
            if (d->is_role) named.push_back(d->b);
            detail::sort_unique(named);
        }
        DeleteEngine de;
        de.tracked = tracked_symbols(kb_, TrackedMode::AboxOnly, extras, false);
        de.named = named;
        // Neg(A) and the request fact must be known to the program even when
        // no clause mentions their predicates (empty or unrelated TBox)
        std::vector<Atom> known = neg_set(kb_.abox);
        if (d) known.push_back(neg(*d));
        de.prog = std::make_unique<PreparedProgram>(
            ground_prepare(kstar_from(xi_t_, kb_.abox, de.tracked), named, known));
        SearchOptions o = opts_;
        o.lazy_domain = consistent();
        o.materialize_models = false;
        de.search = std::make_unique<Search>(*de.prog, neg_set(kb_.abox), o);
        return de;
    }

    KnowledgeBase kb_;
    SearchOptions opts_;
    std::shared_ptr<const std::vector<Assertion>> abox_ptr_;
    ClauseSet xi_t_;
    std::optional<bool> tbox_consistent_, kb_consistent_;
    std::optional<AboxIndex> abox_index_;
    DeleteEngine cached_;
};

// ── One-shot operations ─────────────────────────────────────────────────────

inline EvolutionResult delete_instance(const KnowledgeBase& kb, const Assertion& d,
                                       const SearchOptions& opts = {}) {
    EvolutionContext ctx(kb, opts);
    return ctx.delete_instance(d);
}

inline std::vector<EvolutionResult> repair(const KnowledgeBase& kb, bool enumerate = false,
                                           std::size_t limit = 16,
                                           const SearchOptions& opts = {}) {
    EvolutionContext ctx(kb, opts);
    return ctx.repair(enumerate, limit);
}

inline EvolutionResult insert_instance(const KnowledgeBase& kb, const Assertion& d,
                                       const SearchOptions& opts = {}) {
    EvolutionContext ctx(kb, opts);
    return ctx.insert_instance(d);
}

inline bool entails(const KnowledgeBase& kb, const Assertion& d, const SearchOptions& opts = {}) {
    EvolutionContext ctx(kb, opts);
    return ctx.entails(d);
}

inline bool tbox_consistent(const KnowledgeBase& kb, const SearchOptions& opts = {}) {
    EvolutionContext ctx(kb, opts);
    return ctx.tbox_consistent();
}

inline bool kb_consistent(const KnowledgeBase& kb, const SearchOptions& opts = {}) {
    EvolutionContext ctx(kb, opts);
    return ctx.consistent();
}

// ── Brute-force oracles ─────────────────────────────────────────────────────

/// All subset-maximal sub-ABoxes A' with T u A' |/= d, by exhaustive subset
/// enumeration over entails(). Capped.
inline std::vector<std::vector<Assertion>> brute_force_delete(const KnowledgeBase& kb,
                                                              const Assertion& d,
                                                              std::size_t cap = 12,
                                                              const SearchOptions& opts = {}) {
    if (kb.abox.size() > cap)
        throw std::invalid_argument("brute_force_delete: ABox larger than the cap of " +
                                    std::to_string(cap));
    const std::size_t n = kb.abox.size();
    std::vector<std::uint32_t> good;
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        std::vector<Assertion> sub;
        for (std::size_t i = 0; i < n; ++i)
            if (mask & (1u << i)) sub.push_back(kb.abox[i]);
        KnowledgeBase kbsub(kb.rbox, kb.tbox, std::move(sub));
        if (!entails(kbsub, d, opts)) good.push_back(mask);
    }
    std::vector<std::vector<Assertion>> out;
    for (std::uint32_t m : good) {
        bool maximal = true;
        for (std::uint32_t other : good)
            if (other != m && (other & m) == m) {
                maximal = false;
                break;
            }
        if (!maximal) continue;
        std::vector<Assertion> sub;
        for (std::size_t i = 0; i < n; ++i)
            if (m & (1u << i)) sub.push_back(kb.abox[i]);
        out.push_back(std::move(sub));
    }
    std::sort(out.begin(), out.end());
    return out;
}

/// All subset-maximal consistent sub-ABoxes (the repair oracle).
inline std::vector<std::vector<Assertion>> brute_force_repairs(const KnowledgeBase& kb,
                                                               std::size_t cap = 12,
                                                               const SearchOptions& opts = {}) {
    if (kb.abox.size() > cap)
        throw std::invalid_argument("brute_force_repairs: ABox larger than the cap of " +
                                    std::to_string(cap));
    const std::size_t n = kb.abox.size();
    std::vector<std::uint32_t> good;
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        std::vector<Assertion> sub;
        for (std::size_t i = 0; i < n; ++i)
            if (mask & (1u << i)) sub.push_back(kb.abox[i]);
        KnowledgeBase kbsub(kb.rbox, kb.tbox, std::move(sub));
        if (kb_consistent(kbsub, opts)) good.push_back(mask);
    }
    std::vector<std::vector<Assertion>> out;
    for (std::uint32_t m : good) {
        bool maximal = true;
        for (std::uint32_t other : good)
            if (other != m && (other & m) == m) {
                maximal = false;
                break;
            }
        if (!maximal) continue;
        std::vector<Assertion> sub;
        for (std::size_t i = 0; i < n; ++i)
            if (m & (1u << i)) sub.push_back(kb.abox[i]);
        out.push_back(std::move(sub));
    }
    std::sort(out.begin(), out.end());
    return out;
}

/// All maximal insertion results per the insertion definition: ABoxes A''
/// with d in A'', (A'' \ d) ⊆ A, T u A'' consistent, maximal in (A'' \ d).
inline std::vector<std::vector<Assertion>> brute_force_insertions(const KnowledgeBase& kb,
                                                                  const Assertion& d,
                                                                  std::size_t cap = 12,
                                                                  const SearchOptions& opts = {}) {
    if (kb.abox.size() > cap)
        throw std::invalid_argument("brute_force_insertions: ABox larger than the cap of " +
                                    std::to_string(cap));
    std::vector<Assertion> base;
    for (const auto& a : kb.abox)
        if (!(a == d)) base.push_back(a);
    const std::size_t n = base.size();
    std::vector<std::uint32_t> good;
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        std::vector<Assertion> sub{d};
        for (std::size_t i = 0; i < n; ++i)
            if (mask & (1u << i)) sub.push_back(base[i]);
        KnowledgeBase kbsub(kb.rbox, kb.tbox, std::move(sub));
        if (kb_consistent(kbsub, opts)) good.push_back(mask);
    }
    std::vector<std::vector<Assertion>> out;
    for (std::uint32_t m : good) {
        bool maximal = true;
        for (std::uint32_t other : good)
            if (other != m && (other & m) == m) {
                maximal = false;
                break;
            }
        if (!maximal) continue;
        std::vector<Assertion> sub{d};
        for (std::size_t i = 0; i < n; ++i)
            if (m & (1u << i)) sub.push_back(base[i]);
        detail::sort_unique(sub);
        out.push_back(std::move(sub));
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace kbevolve

#endif  // KBEVOLVE_EVOLUTION_HPP
