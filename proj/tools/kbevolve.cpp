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

// kbevolve — command-line front end.
//
// Subcommands: clausify, transform, delete, insert, repair, check, gen,
// bench. Exit codes: 0 ok, 2 usage or parse error, 3 inconsistent TBox,
// 4 inconsistent input where consistency is required, 5 resource limit.

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "kbevolve/clausifier.hpp"
#include "kbevolve/engine.hpp"
#include "kbevolve/evolution.hpp"
#include "kbevolve/generator.hpp"
#include "kbevolve/kb.hpp"
#include "kbevolve/parser.hpp"
#include "kbevolve/renamer.hpp"

using json = nlohmann::json;
using namespace kbevolve;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitTBoxInconsistent = 3;
constexpr int kExitInputInconsistent = 4;
constexpr int kExitResourceLimit = 5;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_output(const std::string& out_path, const std::string& text) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + out_path);
    out << text;
}

SearchOptions options_from_env(bool trace) {
    SearchOptions opts;
    if (const char* env = std::getenv("KBEVOLVE_MAX_FRESH"))
        opts.max_fresh = static_cast<std::size_t>(std::strtoull(env, nullptr, 10));
    if (trace) opts.trace = &std::cerr;
    return opts;
}

const char* status_name(EvolutionStatus s) {
    switch (s) {
        case EvolutionStatus::Ok: return "ok";
        case EvolutionStatus::Impossible: return "impossible";
        case EvolutionStatus::InputInconsistent: return "input-inconsistent";
    }
    return "?";
}

const char* mode_name(EvolutionMode m) {
    return m == EvolutionMode::ModelBased ? "model-based" : "individual-removal";
}

json result_json(const std::string& operation, const std::string& request,
                 const EvolutionResult& r) {
    json removed = json::array();
    for (const auto& a : r.removed) removed.push_back(a.text());
    json stats = {{"bound", r.stats.bound},
                  {"branches", r.stats.branches},
                  {"fresh", r.stats.fresh},
                  {"wall_ms", r.stats.wall_ms}};
    return json{{"operation", operation},
                {"request", request.empty() ? json() : json(request)},
                {"status", status_name(r.status)},
                {"mode", mode_name(r.mode)},
                {"removed", removed},
                {"added", r.added ? json(r.added->text()) : json()},
                {"kept", r.status == EvolutionStatus::Ok ? r.kept() : r.base_abox->size()},
                {"cost", r.cost},
                {"stats", stats}};
}

void print_result_text(std::ostream& os, const std::string& operation, const EvolutionResult& r) {
    os << operation << ": " << status_name(r.status) << "\n";
    if (r.status == EvolutionStatus::Ok) {
        os << "mode: " << mode_name(r.mode) << "\n";
        for (const auto& a : r.removed) os << "removed: " << a.text() << "\n";
        if (r.added) os << "added: " << r.added->text() << "\n";
        os << "kept: " << r.kept() << "\n";
        os << "cost: " << r.cost << "\n";
    }
}

int finish_result(const std::string& operation, const std::string& request,
                  const EvolutionResult& r, bool as_json) {
    if (as_json)
        std::cout << result_json(operation, request, r).dump(2) << "\n";
    else
        print_result_text(std::cout, operation, r);
    return r.status == EvolutionStatus::InputInconsistent ? kExitInputInconsistent : kExitOk;
}

struct BenchRow {
    std::size_t size = 0;
    std::string kind;
    std::size_t count = 0;
    double mean_ms = 0, p50_ms = 0, p90_ms = 0, max_ms = 0;
};

BenchRow summarize(std::size_t size, const std::string& kind, std::vector<double> times) {
    BenchRow row;
    row.size = size;
    row.kind = kind;
    row.count = times.size();
    if (times.empty()) return row;
    std::sort(times.begin(), times.end());
    row.mean_ms = std::accumulate(times.begin(), times.end(), 0.0) / times.size();
    row.p50_ms = times[times.size() / 2];
    row.p90_ms = times[(times.size() * 9) / 10 >= times.size() ? times.size() - 1
                                                               : (times.size() * 9) / 10];
    row.max_ms = times.back();
    return row;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"kbevolve — knowledge-base compilation and ABox evolution"};
    app.require_subcommand(1);

    std::string path, out_path, assertion_text, tracked_mode = "abox", delete_request_text;
    bool as_json = false, trace = false, enumerate = false, all = false, verify = false;
    std::size_t limit = 16;
    std::optional<std::size_t> max_bound;

    auto* clausify_cmd = app.add_subcommand("clausify", "translate the TBox into DL-clauses");
    clausify_cmd->add_option("path", path, "knowledge-base file")->required();
    clausify_cmd->add_option("-o,--out", out_path, "output file (default stdout)");

    auto* transform_cmd = app.add_subcommand("transform", "apply the K*-transformation");
    transform_cmd->add_option("path", path, "knowledge-base file")->required();
    transform_cmd->add_option("-o,--out", out_path, "output file (default stdout)");
    transform_cmd->add_option("--tracked", tracked_mode, "tracked symbols: abox or kb")
        ->check(CLI::IsMember({"abox", "kb"}));
    transform_cmd->add_option("--delete-request", delete_request_text,
                              "extend the tracked set by the request's symbol");

    auto* delete_cmd = app.add_subcommand("delete", "minimal instance deletion");
    delete_cmd->add_option("path", path, "knowledge-base file")->required();
    delete_cmd->add_option("--assertion", assertion_text, "assertion to delete")->required();
    delete_cmd->add_flag("--json", as_json, "JSON output");
    delete_cmd->add_flag("--enumerate", enumerate, "enumerate alternative minimal deletions");
    delete_cmd->add_option("--limit", limit, "enumeration limit");
    delete_cmd->add_option("--max-bound", max_bound, "cap for the cost-bound loop");
    delete_cmd->add_flag("--trace", trace, "engine trace on stderr");

    auto* insert_cmd = app.add_subcommand("insert", "consistency-preserving insertion");
    insert_cmd->add_option("path", path, "knowledge-base file")->required();
    insert_cmd->add_option("--assertion", assertion_text, "assertion to insert")->required();
    insert_cmd->add_flag("--json", as_json, "JSON output");
    insert_cmd->add_flag("--trace", trace, "engine trace on stderr");

    auto* repair_cmd = app.add_subcommand("repair", "minimal ABox repair");
    repair_cmd->add_option("path", path, "knowledge-base file")->required();
    repair_cmd->add_flag("--all", all, "enumerate all minimal repairs");
    repair_cmd->add_option("--limit", limit, "enumeration limit");
    repair_cmd->add_flag("--json", as_json, "JSON output");
    repair_cmd->add_flag("--trace", trace, "engine trace on stderr");

    auto* check_cmd = app.add_subcommand("check", "report TBox and knowledge-base consistency");
    check_cmd->add_option("path", path, "knowledge-base file")->required();
    check_cmd->add_flag("--json", as_json, "JSON output");

    GeneratorProfile profile;
    std::size_t gen_inject = 0;
    auto* gen_cmd = app.add_subcommand("gen", "generate a synthetic knowledge base");
    gen_cmd->add_option("-o,--out", out_path, "output file (default stdout)");
    gen_cmd->add_option("--seed", profile.seed, "generator seed");
    gen_cmd->add_option("--assertions", profile.n_assertions, "number of ABox assertions");
    gen_cmd->add_option("--concepts", profile.n_concepts, "number of chain concepts");
    gen_cmd->add_option("--roles", profile.n_roles, "number of roles");
    gen_cmd->add_option("--individuals", profile.n_individuals, "number of individuals");
    gen_cmd->add_option("--chains", profile.chains, "number of subsumption chains");
    gen_cmd->add_option("--chain-depth", profile.chain_depth, "concepts per chain");
    gen_cmd->add_option("--exists-axioms", profile.exists_axioms, "existential axioms");
    gen_cmd->add_option("--role-body-axioms", profile.role_body_axioms, "role-body axioms");
    gen_cmd->add_option("--disjointness", profile.disjointness, "disjointness axioms");
    gen_cmd->add_option("--inject-inconsistency", gen_inject, "planted clashing pairs");

    std::vector<std::size_t> bench_sizes = {5000, 10000, 25000, 50000};
    std::size_t bench_requests = 20;
    std::uint64_t bench_seed = 1;
    auto* bench_cmd = app.add_subcommand("bench", "scaling benchmark over generated ABoxes");
    bench_cmd->add_option("--sizes", bench_sizes, "ABox sizes to sweep");
    bench_cmd->add_option("--requests", bench_requests, "delete requests per size");
    bench_cmd->add_option("--seed", bench_seed, "sampling seed");
    bench_cmd->add_flag("--verify", verify, "validate each deletion against entailment");
    bench_cmd->add_option("-o,--out", out_path, "CSV output file (default stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        SearchOptions opts = options_from_env(trace);

        if (clausify_cmd->parsed()) {
            KnowledgeBase kb = parse_kb(read_file(path));
            if (!tbox_consistent(kb, opts)) throw TBoxInconsistentError();
            write_output(out_path, clausify_tbox(kb.tbox, kb.rbox).listing());
            return kExitOk;
        }

        if (transform_cmd->parsed()) {
            KnowledgeBase kb = parse_kb(read_file(path));
            if (!tbox_consistent(kb, opts)) throw TBoxInconsistentError();
            std::vector<SymbolRef> extras;
            if (!delete_request_text.empty()) {
                Assertion d = parse_assertion(delete_request_text);
                extras.push_back(d.is_role ? SymbolRef{SymbolRef::Kind::Role, d.pred, d.pred}
                                           : SymbolRef{SymbolRef::Kind::Concept, d.pred, d.pred});
            }
            TrackedMode mode =
                tracked_mode == "kb" ? TrackedMode::AboxAndTbox : TrackedMode::AboxOnly;
            TrackedSymbolSet s = tracked_symbols(kb, mode, extras);
            write_output(out_path, kstar(kb, s).listing());
            return kExitOk;
        }

        if (delete_cmd->parsed()) {
            KnowledgeBase kb = parse_kb(read_file(path));
            Assertion d = parse_assertion(assertion_text);
            EvolutionContext ctx(kb, opts);
            if (enumerate) {
                auto results = ctx.delete_instances(d, limit);
                if (as_json) {
                    json arr = json::array();
                    for (const auto& r : results) arr.push_back(result_json("delete", d.text(), r));
                    std::cout << json{{"operation", "delete"}, {"results", arr}}.dump(2) << "\n";
                } else {
                    for (const auto& r : results) print_result_text(std::cout, "delete", r);
                }
                bool bad = !results.empty() &&
                           results.front().status == EvolutionStatus::InputInconsistent;
                return bad ? kExitInputInconsistent : kExitOk;
            }
            EvolutionResult r = ctx.delete_instance(d, max_bound);
            return finish_result("delete", d.text(), r, as_json);
        }

        if (insert_cmd->parsed()) {
            KnowledgeBase kb = parse_kb(read_file(path));
            Assertion d = parse_assertion(assertion_text);
            EvolutionResult r = insert_instance(kb, d, opts);
            return finish_result("insert", d.text(), r, as_json);
        }

        if (repair_cmd->parsed()) {
            KnowledgeBase kb = parse_kb(read_file(path));
            auto results = repair(kb, all, all ? limit : 1, opts);
            if (as_json) {
                json arr = json::array();
                for (const auto& r : results) arr.push_back(result_json("repair", "", r));
                std::cout << json{{"operation", "repair"}, {"results", arr}}.dump(2) << "\n";
            } else {
                for (const auto& r : results) print_result_text(std::cout, "repair", r);
            }
            return kExitOk;
        }

        if (check_cmd->parsed()) {
            KnowledgeBase kb = parse_kb(read_file(path));
            EvolutionContext ctx(kb, opts);
            bool tc = ctx.tbox_consistent();
            bool kc = tc && ctx.consistent();
            if (as_json) {
                std::cout << json{{"operation", "check"},
                                  {"tbox_consistent", tc},
                                  {"kb_consistent", kc}}
                                 .dump(2)
                          << "\n";
            } else {
                std::cout << "tbox: " << (tc ? "consistent" : "inconsistent") << "\n"
                          << "kb: " << (kc ? "consistent" : "inconsistent") << "\n";
            }
            return kExitOk;
        }

        if (gen_cmd->parsed()) {
            profile.inject_inconsistency = gen_inject;
            write_output(out_path, serialize_kb(generate(profile)));
            return kExitOk;
        }

        if (bench_cmd->parsed()) {
            std::ostringstream csv;
            csv << "size,kind,count,mean_ms,p50_ms,p90_ms,max_ms\n";
            for (std::size_t size : bench_sizes) {
                KnowledgeBase kb = generate(bench_profile(size, bench_seed));
                EvolutionContext ctx(kb, opts);
                ctx.warm_up();  // per-KB setup is not part of request timing
                SplitMix64 rng(bench_seed ^ (size * 0x9e3779b97f4a7c15ull));
                std::vector<double> atomic_ms, non_atomic_ms;
                for (std::size_t i = 0; i < bench_requests; ++i) {
                    const Assertion& d = kb.abox[rng.below(kb.abox.size())];
                    auto t0 = std::chrono::steady_clock::now();
                    EvolutionResult r = ctx.delete_instance(d);
                    double ms = std::chrono::duration<double, std::milli>(
                                    std::chrono::steady_clock::now() - t0)
                                    .count();
                    bool atomic = r.status == EvolutionStatus::Ok &&
                                  r.mode == EvolutionMode::ModelBased && r.removed.size() == 1;
                    (atomic ? atomic_ms : non_atomic_ms).push_back(ms);
                    if (verify && r.status == EvolutionStatus::Ok) {
                        KnowledgeBase after(kb.rbox, kb.tbox, r.resulting_abox());
                        if (entails(after, d, opts))
                            throw std::logic_error("bench --verify: deletion unsound for " +
                                                   d.text());
                    }
                }
                for (const auto& row : {summarize(size, "atomic", atomic_ms),
                                        summarize(size, "non-atomic", non_atomic_ms)}) {
                    csv << row.size << "," << row.kind << "," << row.count << "," << row.mean_ms
                        << "," << row.p50_ms << "," << row.p90_ms << "," << row.max_ms << "\n";
                }
            }
            write_output(out_path, csv.str());
            return kExitOk;
        }
    } catch (const ParseError& e) {
        std::cerr << e.what() << "\n";
        return kExitUsage;
    } catch (const TBoxInconsistentError& e) {
        std::cerr << e.what() << "\n";
        return kExitTBoxInconsistent;
    } catch (const ResourceLimitError& e) {
        std::cerr << e.what() << "\n";
        return kExitResourceLimit;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
