#include <doctest.h>

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>

#include <unistd.h>

#include "nonterm/encoder.hpp"
#include "nonterm/error.hpp"
#include "nonterm/solver.hpp"
#include "oracles.hpp"

using namespace nonterm;
namespace fs = std::filesystem;

namespace {

using Status = SolveResult::Status;
using Reason = SolveResult::Reason;

class ScriptDir {
public:
    ScriptDir() {
        dir_ = fs::temp_directory_path() / ("nonterm-solver-test-" + std::to_string(::getpid()));
        fs::create_directories(dir_);
    }
    ~ScriptDir() {
        std::error_code ec;
        fs::remove_all(dir_, ec);
    }
    std::string script(const std::string& name, const std::string& body) const {
        auto path = dir_ / name;
        std::ofstream(path) << "#!/bin/sh\n" << body << "\n";
        fs::permissions(path, fs::perms::owner_all);
        return path.string();
    }

private:
    fs::path dir_;
};

bool pysat_available() {
    return std::system("python3 -c 'import pysat' >/dev/null 2>&1") == 0;
}

// n+1 pigeons into n holes.
std::vector<Clause> pigeonhole(int n, int& num_vars) {
    auto var = [n](int p, int h) { return p * n + h + 1; };
    std::vector<Clause> out;
    for (int p = 0; p <= n; ++p) {
        Clause c;
        for (int h = 0; h < n; ++h) c.push_back(var(p, h));
        out.push_back(c);
    }
    for (int h = 0; h < n; ++h)
        for (int p = 0; p <= n; ++p)
            for (int q = p + 1; q <= n; ++q) out.push_back({-var(p, h), -var(q, h)});
    num_vars = (n + 1) * n;
    return out;
}

} // namespace

TEST_SUITE("solver-io") {

TEST_CASE("DIMACS output") {
    CHECK(to_dimacs(1, std::vector<Clause>{{1}}) == "p cnf 1 1\n1 0\n");
    CHECK(to_dimacs(4, std::vector<Clause>{}) == "p cnf 4 0\n");
    CHECK(to_dimacs(3, std::vector<Clause>{{-2, 3}}) == "p cnf 3 1\n-2 3 0\n");

    Signature sig;
    sig.add("c", 0);
    Encoder e(2, sig);
    e.nonempty();
    CHECK(to_dimacs(e.problem()) == "p cnf 4 1\n1 2 0\n");
}

TEST_CASE("small instances") {
    auto b = Backend::builtin();
    CHECK(solve(1, std::vector<Clause>{{1}, {-1}}, b).is_unsat());
    auto r = solve(2, std::vector<Clause>{{1, 2}, {-1}}, b);
    REQUIRE(r.is_sat());
    CHECK(r.model[2]);
    CHECK_FALSE(r.model[1]);
    CHECK(solve(2, std::vector<Clause>{{1, 2}, {}}, b).is_unsat());
    CHECK(solve(0, std::vector<Clause>{}, b).is_sat());
    CHECK(solve(3, std::vector<Clause>{}, b).model.size() == 4);
    CHECK(solve(1, std::vector<Clause>{{1, -1}}, b).is_sat());
}

TEST_CASE("builtin agrees with the reference DPLL on random 3-CNF") {
    std::mt19937 rng(2024);
    int sat = 0;
    for (int i = 0; i < 200; ++i) {
        auto cnf = oracle::random_cnf(rng, 30, 128, 3);
        auto ref = oracle::dpll(30, cnf);
        auto got = solve(30, cnf, Backend::builtin());
        REQUIRE(got.status != Status::Unknown);
        CHECK(got.is_sat() == ref.has_value());
        if (got.is_sat()) {
            ++sat;
            CHECK(satisfies(got.model, cnf));
        }
    }
    // the ratio sits near the threshold, so both outcomes occur
    CHECK(sat > 20);
    CHECK(sat < 180);
}

TEST_CASE("reference DPLL agrees with brute force") {
    std::mt19937 rng(99);
    for (int i = 0; i < 40; ++i) {
        auto cnf = oracle::random_cnf(rng, 12, 52, 3);
        CHECK(oracle::dpll(12, cnf).has_value() == oracle::brute_force_sat(12, cnf).has_value());
    }
}

TEST_CASE("builtin on structured instances") {
    int vars = 0;
    auto php = pigeonhole(6, vars);
    CHECK(solve(vars, php, Backend::builtin()).is_unsat());
    std::mt19937 rng(5);
    for (int i = 0; i < 10; ++i) {
        auto cnf = oracle::random_cnf(rng, 200, 600, 3);
        auto r = solve(200, cnf, Backend::builtin());
        REQUIRE(r.is_sat());
        CHECK(satisfies(r.model, cnf));
    }
}

TEST_CASE("builtin honours timeout and cancellation") {
    int vars = 0;
    auto php = pigeonhole(11, vars);
    SolveLimits limits;
    limits.timeout = 0.2;
    const auto start = std::chrono::steady_clock::now();
    auto r = solve(vars, php, Backend::builtin(), limits);
    const std::chrono::duration<double> took = std::chrono::steady_clock::now() - start;
    CHECK(r.status == Status::Unknown);
    CHECK(r.reason == Reason::Timeout);
    CHECK(took.count() < 2.0);
    CHECK(to_string(r) == "unknown(timeout)");

    std::atomic<bool> stop{true};
    SolveLimits cancel;
    cancel.stop = &stop;
    auto c = solve(vars, php, Backend::builtin(), cancel);
    CHECK(c.reason == Reason::Cancelled);
}

TEST_CASE("parsing solver output") {
    auto r = parse_solver_output("c comment\ns SATISFIABLE\nv 1 -2\nv 3 0\n", 10, 3);
    REQUIRE(r.is_sat());
    CHECK(r.model == std::vector<bool>{false, true, false, true});
    // omitted variables default to false
    auto partial = parse_solver_output("s SATISFIABLE\nv 2 0\n", 0, 4);
    REQUIRE(partial.is_sat());
    CHECK(partial.model == std::vector<bool>{false, false, true, false, false});
    CHECK(parse_solver_output("s UNSATISFIABLE\n", 20, 3).is_unsat());
    CHECK(parse_solver_output("", 20, 3).is_unsat());
    CHECK(parse_solver_output("v 1 0\n", 10, 1).is_sat());
    CHECK(parse_solver_output("s UNKNOWN\n", 0, 1).reason == Reason::SolverError);
    CHECK(parse_solver_output("s MAYBE\n", 0, 1).reason == Reason::SolverError);
    CHECK(parse_solver_output("s SATISFIABLE\nv 1 x 0\n", 10, 1).reason == Reason::SolverError);
    CHECK(parse_solver_output("s SATISFIABLE\nv 7 0\n", 10, 2).reason == Reason::SolverError);
    CHECK(parse_solver_output("s SATISFIABLE\n", 10, 2).reason == Reason::SolverError);
    CHECK(parse_solver_output("hello\n", 0, 2).reason == Reason::SolverError);
    CHECK(parse_solver_output("s SATISFIABLE\r\nv -1 0\r\n", 10, 1).is_sat());
}

TEST_CASE("external solver protocol") {
    ScriptDir dir;
    const std::vector<Clause> cnf{{1, 2}, {-1}};

    auto exit_only = dir.script("exit_only", "echo 'v -1 2 0'\nexit 10");
    auto r = solve(2, cnf, Backend::external(exit_only));
    REQUIRE(r.is_sat());
    CHECK(r.model[2]);

    auto unsat = dir.script("unsat", "exit 20");
    CHECK(solve(2, cnf, Backend::external(unsat)).is_unsat());

    auto reads_file = dir.script("reads_file", "head -n 1 \"$1\" | grep -q '^p cnf 2 2$' || exit 1\n"
                                               "echo 's SATISFIABLE'\necho 'v -1 2 0'");
    CHECK(solve(2, cnf, Backend::external(reads_file)).is_sat());

    auto garbage = dir.script("garbage", "echo hello");
    auto g = solve(2, cnf, Backend::external(garbage));
    CHECK(g.status == Status::Unknown);
    CHECK(g.reason == Reason::SolverError);

    auto liar = dir.script("liar", "echo 's SATISFIABLE'\necho 'v 1 2 0'");
    CHECK(solve(2, cnf, Backend::external(liar)).reason == Reason::SolverError);

    auto missing = solve(2, cnf, Backend::external("/nonexistent/solver"));
    CHECK(missing.reason == Reason::SolverError);

    auto slow = dir.script("slow", "sleep 10\necho 's UNSATISFIABLE'");
    SolveLimits limits;
    limits.timeout = 0.3;
    const auto start = std::chrono::steady_clock::now();
    auto t = solve(2, cnf, Backend::external(slow), limits);
    const std::chrono::duration<double> took = std::chrono::steady_clock::now() - start;
    CHECK(t.reason == Reason::Timeout);
    CHECK(took.count() < 3.0);

    std::atomic<bool> stop{true};
    SolveLimits cancel;
    cancel.stop = &stop;
    CHECK(solve(2, cnf, Backend::external(slow), cancel).reason == Reason::Cancelled);
}

TEST_CASE("backend selection") {
    CHECK(Backend::parse("builtin").kind == Backend::Kind::Builtin);
    CHECK(Backend::parse("/usr/bin/kissat").path == "/usr/bin/kissat");
    ::setenv("NONTERM_SOLVER", "/opt/solver", 1);
    CHECK(Backend::parse("").path == "/opt/solver");
    CHECK(Backend::parse("builtin").kind == Backend::Kind::Builtin);
    ::unsetenv("NONTERM_SOLVER");
    CHECK(Backend::parse("").kind == Backend::Kind::Builtin);
    CHECK(Backend::builtin().describe() == "builtin");
}

TEST_CASE("builtin and PySAT wrapper agree on random 3-CNF") {
    if (!pysat_available()) {
        MESSAGE("python3 with pysat not found; skipping external agreement");
        return;
    }
    const std::string wrapper = std::string(NONTERM_TOOLS_DIR) + "/pysat_solver.py";
    std::mt19937 rng(77);
    for (int i = 0; i < 200; ++i) {
        auto cnf = oracle::random_cnf(rng, 30, 128, 3);
        auto ext = solve(30, cnf, Backend::external(wrapper));
        auto own = solve(30, cnf, Backend::builtin());
        REQUIRE(ext.status != Status::Unknown);
        CHECK(ext.is_sat() == own.is_sat());
    }
}

} // TEST_SUITE
