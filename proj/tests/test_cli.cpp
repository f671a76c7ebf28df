// End-to-end checks of the kbevolve binary: exit codes, JSON shapes, and
// the golden command outputs. The binary path comes from the build system.
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include <json.hpp>

using json = nlohmann::json;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_count = 0;

RunResult run_cli(const std::string& args) {
    std::string base = "/tmp/kbevolve_cli_" + std::to_string(::getpid()) + "_" +
                       std::to_string(run_count++);
    std::string cmd = std::string(KBEVOLVE_BIN) + " " + args + " > " + base + ".out 2> " +
                      base + ".err";
    int rc = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    r.out = slurp(base + ".out");
    r.err = slurp(base + ".err");
    std::remove((base + ".out").c_str());
    std::remove((base + ".err").c_str());
    return r;
}

std::string write_kb(const std::string& name, const std::string& text) {
    std::string path = "/tmp/kbevolve_cli_" + std::to_string(::getpid()) + "_" + name + ".kb";
    std::ofstream out(path, std::ios::binary);
    out << text;
    return path;
}

const char* kRunningExample =
    "TBOX\nB [= exists R.C.\nexists R.C [= D.\nD [= C.\n"
    "ABOX\nB(a). D(a). C(b). R(b,b). R(a,a).\n";

// mirrors schemas/kbevolve-result.schema.json
void check_result_schema(const json& j) {
    for (const char* key : {"operation", "request", "status", "mode", "removed", "added",
                            "kept", "cost", "stats"})
        REQUIRE(j.contains(key));
    CHECK(j["removed"].is_array());
    CHECK(j["kept"].is_number_integer());
    CHECK(j["cost"].is_number_integer());
    std::set<std::string> statuses = {"ok", "impossible", "input-inconsistent"};
    CHECK(statuses.count(j["status"].get<std::string>()) == 1);
    std::set<std::string> modes = {"model-based", "individual-removal"};
    CHECK(modes.count(j["mode"].get<std::string>()) == 1);
    for (const char* key : {"bound", "branches", "fresh", "wall_ms"})
        REQUIRE(j["stats"].contains(key));
}

}  // namespace

TEST_CASE("cli: transform reproduces the fifteen-clause listing") {
    std::string kb = write_kb("running", kRunningExample);
    RunResult r = run_cli("transform " + kb + " --tracked abox");
    CHECK(r.exit_code == 0);
    std::istringstream lines(r.out);
    std::set<std::string> got;
    std::string line;
    while (std::getline(lines, line))
        if (!line.empty()) got.insert(line);
    std::set<std::string> expected = {
        "exists R.C(x) <- B(x).",
        "exists R.C(x) | NegB(x) <- TOP.",
        "C(x) <- D(x).",
        "NegD(x) <- NegC(x).",
        "D(x) <- C(y) & R(x,y).",
        "NegC(y) | NegR(x,y) <- NegD(x).",
        "_|_ <- R(x,y) & NegR(x,y).",
        "_|_ <- B(x) & NegB(x).",
        "_|_ <- C(x) & NegC(x).",
        "_|_ <- D(x) & NegD(x).",
        "ABoxB(a) <- TOP.",
        "ABoxD(a) <- TOP.",
        "ABoxC(b) <- TOP.",
        "ABoxR(b,b) <- TOP.",
        "ABoxR(a,a) <- TOP.",
    };
    CHECK(got == expected);
}

TEST_CASE("cli: clausify emits the plain clause listing") {
    std::string kb = write_kb("clausify", "TBOX\ntop [= C.\n");
    RunResult r = run_cli("clausify " + kb);
    CHECK(r.exit_code == 0);
    CHECK(r.out == "C(x) <- TOP.\n");

    std::string empty = write_kb("empty", "");
    RunResult r2 = run_cli("clausify " + empty);
    CHECK(r2.exit_code == 0);
    CHECK(r2.out.empty());
}

TEST_CASE("cli: delete emits the schema-conformant JSON report") {
    std::string kb = write_kb("del", kRunningExample);
    RunResult r = run_cli("delete " + kb + " --assertion 'D(a)' --json");
    REQUIRE(r.exit_code == 0);
    json j = json::parse(r.out);
    check_result_schema(j);
    CHECK(j["operation"] == "delete");
    CHECK(j["request"] == "D(a)");
    CHECK(j["status"] == "ok");
    CHECK(j["mode"] == "model-based");
    CHECK(j["removed"] == json::array({"B(a)", "D(a)"}));
    CHECK(j["cost"] == 2);
    CHECK(j["kept"] == 3);
    CHECK(j["added"].is_null());
}

TEST_CASE("cli: delete falls back to individual removal") {
    std::string kb = write_kb("topc", "TBOX\ntop [= C.\nABOX\nC(a). B(a). C(b). B(b).\n");
    RunResult r = run_cli("delete " + kb + " --assertion 'C(a)' --json");
    REQUIRE(r.exit_code == 0);
    json j = json::parse(r.out);
    check_result_schema(j);
    CHECK(j["mode"] == "individual-removal");
    CHECK(j["removed"] == json::array({"B(a)", "C(a)"}));
}

TEST_CASE("cli: repair --all lists both repairs of the insertion example") {
    std::string kb = write_kb("rep", "TBOX\nC and D [= bot.\nABOX\nC(a). D(a).\n");
    RunResult r = run_cli("repair " + kb + " --all --json");
    REQUIRE(r.exit_code == 0);
    json j = json::parse(r.out);
    REQUIRE(j.contains("results"));
    REQUIRE(j["results"].size() == 2);
    for (const auto& res : j["results"]) check_result_schema(res);
    std::set<json> removed;
    for (const auto& res : j["results"]) removed.insert(res["removed"]);
    CHECK(removed == std::set<json>{json::array({"C(a)"}), json::array({"D(a)"})});
}

TEST_CASE("cli: insert keeps the new assertion") {
    std::string kb = write_kb("ins", "TBOX\nC and D [= bot.\nABOX\nC(a).\n");
    RunResult r = run_cli("insert " + kb + " --assertion 'D(a)' --json");
    REQUIRE(r.exit_code == 0);
    json j = json::parse(r.out);
    check_result_schema(j);
    CHECK(j["status"] == "ok");
    CHECK(j["removed"] == json::array({"C(a)"}));
    CHECK(j["added"] == "D(a)");
}

TEST_CASE("cli: check reports both consistency verdicts") {
    std::string kb = write_kb("chk", "TBOX\nC and D [= bot.\nABOX\nC(a). D(a).\n");
    RunResult r = run_cli("check " + kb + " --json");
    REQUIRE(r.exit_code == 0);
    json j = json::parse(r.out);
    CHECK(j["operation"] == "check");
    CHECK(j["tbox_consistent"] == true);
    CHECK(j["kb_consistent"] == false);
}

TEST_CASE("cli exit codes are a total function of the outcome") {
    std::string bad = write_kb("bad", "TBOX\nB [= .\n");
    CHECK(run_cli("clausify " + bad).exit_code == 2);
    CHECK(run_cli("delete " + bad + " --assertion 'D(a)'").exit_code == 2);

    std::string running = write_kb("codes", kRunningExample);
    CHECK(run_cli("delete " + running).exit_code != 0);  // missing --assertion
    CHECK(run_cli("delete " + running + " --assertion 'exists R.C(a)'").exit_code == 2);

    std::string incons_tbox = write_kb("itbox", "TBOX\ntop [= bot.\nABOX\nC(a).\n");
    CHECK(run_cli("clausify " + incons_tbox).exit_code == 3);
    CHECK(run_cli("delete " + incons_tbox + " --assertion 'C(a)'").exit_code == 3);

    std::string incons_kb =
        write_kb("ikb", "TBOX\ntop [= C.\nC and D [= bot.\nABOX\nD(a).\n");
    CHECK(run_cli("delete " + incons_kb + " --assertion 'C(a)'").exit_code == 4);

    // a tiny fresh-individual ceiling turns into the resource exit code
    std::string deep = write_kb(
        "deep", "TBOX\nA [= exists R.B.\nB [= exists S.C.\nC [= exists T.D.\nABOX\nA(a).\n");
    std::string cmd = "KBEVOLVE_MAX_FRESH=1 " + std::string(KBEVOLVE_BIN) + " check " + deep +
                      " > /dev/null 2>&1";
    int rc = std::system(cmd.c_str());
    CHECK(WEXITSTATUS(rc) == 5);
}

TEST_CASE("cli: gen is deterministic at the byte level") {
    RunResult a = run_cli("gen --seed 1 --assertions 100");
    RunResult b = run_cli("gen --seed 1 --assertions 100");
    RunResult c = run_cli("gen --seed 2 --assertions 100");
    CHECK(a.exit_code == 0);
    CHECK(a.out == b.out);
    CHECK(a.out != c.out);
}

TEST_CASE("cli: gen --inject-inconsistency plants repairable clashes") {
    RunResult g = run_cli("gen --seed 5 --assertions 40 --inject-inconsistency 3");
    REQUIRE(g.exit_code == 0);
    std::string kb = write_kb("inj", g.out);
    RunResult chk = run_cli("check " + kb + " --json");
    json j = json::parse(chk.out);
    CHECK(j["tbox_consistent"] == true);
    CHECK(j["kb_consistent"] == false);
    RunResult rep = run_cli("repair " + kb + " --json");
    json jr = json::parse(rep.out);
    CHECK(jr["results"][0]["removed"].size() <= 3);
}

TEST_CASE("cli: bench emits the CSV table") {
    RunResult r = run_cli("bench --sizes 400 800 --requests 5 --seed 7 --verify");
    REQUIRE(r.exit_code == 0);
    std::istringstream lines(r.out);
    std::string header;
    std::getline(lines, header);
    CHECK(header == "size,kind,count,mean_ms,p50_ms,p90_ms,max_ms");
    std::string line;
    int rows = 0;
    while (std::getline(lines, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 4);  // (atomic, non-atomic) x 2 sizes
    CHECK(r.out.find("400,atomic,") != std::string::npos);
    CHECK(r.out.find("800,non-atomic,") != std::string::npos);
}
