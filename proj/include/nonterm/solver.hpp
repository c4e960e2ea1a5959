#pragma once

#include <atomic>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nonterm/encoder.hpp"

namespace nonterm {

struct SolveResult {
    enum class Status { Sat, Unsat, Unknown };
    enum class Reason { None, Timeout, SolverError, Cancelled };

    Status status = Status::Unknown;
    Reason reason = Reason::None;
    /// Indexed by variable; entry 0 unused. Filled only for Sat.
    std::vector<bool> model;
    /// Free-form detail for solver errors.
    std::string detail;

    static SolveResult sat(std::vector<bool> model) { return {Status::Sat, Reason::None, std::move(model), {}}; }
    static SolveResult unsat() { return {Status::Unsat, Reason::None, {}, {}}; }
    static SolveResult unknown(Reason r, std::string detail = {}) { return {Status::Unknown, r, {}, std::move(detail)}; }

    bool is_sat() const { return status == Status::Sat; }
    bool is_unsat() const { return status == Status::Unsat; }
};

std::string to_string(const SolveResult& r);

struct Backend {
    enum class Kind { Builtin, External };
    Kind kind = Kind::Builtin;
    std::string path;

    static Backend builtin() { return {Kind::Builtin, {}}; }
    static Backend external(std::string path) { return {Kind::External, std::move(path)}; }
    /// `builtin` or a solver path; an empty string falls back to NONTERM_SOLVER, then builtin.
    static Backend parse(const std::string& arg);
    std::string describe() const { return kind == Kind::Builtin ? "builtin" : path; }
};

/// Deterministic DIMACS text.
std::string to_dimacs(int num_vars, std::span<const Clause> clauses);
std::string to_dimacs(const CnfProblem& p);

struct SolveLimits {
    /// Wall-clock budget in seconds; none means unlimited.
    std::optional<double> timeout;
    /// Polled during search; when set the call returns Unknown(Cancelled).
    const std::atomic<bool>* stop = nullptr;
};

/// Solves and verifies: a Sat model is checked against every clause before returning.
SolveResult solve(int num_vars, std::span<const Clause> clauses, const Backend& backend, const SolveLimits& limits = {});
SolveResult solve(const CnfProblem& p, const Backend& backend, const SolveLimits& limits = {});

/// The builtin CDCL solver without the final model check.
SolveResult solve_builtin(int num_vars, std::span<const Clause> clauses, const SolveLimits& limits = {});

/// Runs `path <cnf-file>` and parses competition-style output.
SolveResult solve_external(const std::string& path, int num_vars, std::span<const Clause> clauses,
                           const SolveLimits& limits = {});

/// Parses solver stdout plus exit status into a result over `num_vars` variables.
SolveResult parse_solver_output(const std::string& output, int exit_code, int num_vars);

} // namespace nonterm
