// Command-line front end: prove, check, encode.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "nonterm/checker.hpp"
#include "nonterm/error.hpp"
#include "nonterm/prover.hpp"
#include "nonterm/solver.hpp"
#include "nonterm/syntax.hpp"

namespace {

using nonterm::Error;
using json = nlohmann::json;

constexpr int kProved = 0;
constexpr int kUnknown = 1;
constexpr int kUsage = 2;
constexpr int kInternal = 3;

std::string read_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw Error("cannot read " + path);
    std::stringstream buf;
    buf << is.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream os(path);
    os << text;
    if (!os) throw Error("cannot write " + path);
}

nonterm::Trs load_system(const std::string& path) {
    try {
        return nonterm::parse_trs(read_file(path), nonterm::format_for_path(path));
    } catch (const nonterm::ParseError& e) {
        throw Error(path + ": " + e.what());
    }
}

std::pair<int, int> parse_states(const std::string& arg) {
    auto dots = arg.find("..");
    try {
        std::size_t used = 0;
        if (dots == std::string::npos) {
            int n = std::stoi(arg, &used);
            if (used != arg.size()) throw std::invalid_argument(arg);
            return {n, n};
        }
        auto lo_text = arg.substr(0, dots), hi_text = arg.substr(dots + 2);
        int lo = std::stoi(lo_text, &used);
        if (used != lo_text.size()) throw std::invalid_argument(arg);
        int hi = std::stoi(hi_text, &used);
        if (used != hi_text.size()) throw std::invalid_argument(arg);
        return {lo, hi};
    } catch (const std::logic_error&) {
        throw Error("bad --states value '" + arg + "', expected N or MIN..MAX");
    }
}

std::string trace_text(const nonterm::Preprocessing& t) {
    std::string out;
    if (t.fresh_constant) out += " fresh-constant";
    if (t.uncurried) out += " uncurry";
    if (t.collapsing_eliminated) out += " eliminate-collapsing";
    return out.empty() ? "none" : out.substr(1);
}

json trace_json(const nonterm::Preprocessing& t) {
    json steps = json::array();
    if (t.fresh_constant) steps.push_back("fresh-constant");
    if (t.uncurried) steps.push_back("uncurry");
    if (t.collapsing_eliminated) steps.push_back("eliminate-collapsing");
    return steps;
}

struct ProveArgs {
    std::string input;
    std::string mode = "auto";
    std::string states = "1..5";
    int reduct_steps = 2;
    std::size_t reduct_cap = 64;
    std::string solver;
    double timeout = 0;
    bool no_uncurry = false;
    bool parallel = false;
    std::string certificate;
    bool json = false;
};

int run_prove(const ProveArgs& args) {
    nonterm::ProverConfig cfg;
    cfg.mode = nonterm::parse_mode(args.mode);
    std::tie(cfg.min_states, cfg.max_states) = parse_states(args.states);
    cfg.reducts = {args.reduct_steps, args.reduct_cap};
    cfg.backend = nonterm::Backend::parse(args.solver);
    if (args.timeout > 0) cfg.timeout = args.timeout;
    cfg.uncurry = !args.no_uncurry;
    cfg.parallel = args.parallel;
    cfg.validate();

    const auto trs = load_system(args.input);
    const auto report = nonterm::search(trs, cfg);
    std::string cert_text;
    if (report.certificate) {
        cert_text = nonterm::to_text(*report.certificate);
        if (!args.certificate.empty()) write_file(args.certificate, cert_text);
    }
    const auto timeout_text = cfg.timeout ? std::to_string(*cfg.timeout) : std::string("none");

    if (args.json) {
        json out;
        out["input"] = args.input;
        out["verdict"] = nonterm::to_string(report.verdict);
        out["config"] = {{"mode", nonterm::to_string(cfg.mode)},
                         {"min_states", cfg.min_states},
                         {"max_states", cfg.max_states},
                         {"reduct_steps", cfg.reducts.steps},
                         {"reduct_cap", cfg.reducts.cap},
                         {"solver", cfg.backend.describe()},
                         {"timeout", cfg.timeout ? json(*cfg.timeout) : json(nullptr)},
                         {"uncurry", cfg.uncurry},
                         {"parallel", cfg.parallel}};
        out["preprocessing"] = trace_json(report.trace);
        json attempts = json::array();
        for (const auto& a : report.attempts)
            attempts.push_back({{"method", nonterm::to_string(a.method)},
                                {"states", a.states},
                                {"vars", a.vars},
                                {"clauses", a.clauses},
                                {"result", a.result},
                                {"seconds", a.seconds}});
        out["attempts"] = attempts;
        out["certificate_path"] = report.certificate && !args.certificate.empty() ? json(args.certificate) : json(nullptr);
        out["certificate"] = report.certificate ? json(cert_text) : json(nullptr);
        out["note"] = report.note;
        std::cout << out.dump(2) << "\n";
    } else {
        std::cout << "input: " << args.input << " (" << trs.rules.size() << " rules)\n";
        std::cout << "config: mode=" << nonterm::to_string(cfg.mode) << " states=" << cfg.min_states << ".."
                  << cfg.max_states << " reduct-steps=" << cfg.reducts.steps << " reduct-cap=" << cfg.reducts.cap
                  << " solver=" << cfg.backend.describe() << " timeout=" << timeout_text
                  << " uncurry=" << (cfg.uncurry ? "on" : "off") << " parallel=" << (cfg.parallel ? "on" : "off")
                  << "\n";
        std::cout << "preprocessing: " << trace_text(report.trace) << "\n";
        if (!report.note.empty()) std::cout << "note: " << report.note << "\n";
        for (const auto& a : report.attempts)
            std::cout << "attempt " << nonterm::to_string(a.method) << " n=" << a.states << ": " << a.vars << " vars, "
                      << a.clauses << " clauses, " << a.result << " (" << std::fixed << std::setprecision(2)
                      << a.seconds << "s)\n";
        std::cout << "verdict: " << nonterm::to_string(report.verdict) << "\n";
        if (report.certificate) {
            if (!args.certificate.empty()) std::cout << "certificate: " << args.certificate << "\n";
            else std::cout << "certificate:\n" << cert_text;
        }
    }
    return report.verdict == nonterm::Outcome::Unknown ? kUnknown : kProved;
}

int run_check(const std::string& trs_path, const std::string& cert_path, bool as_json) {
    const auto trs = load_system(trs_path);
    const auto text = read_file(cert_path);
    nonterm::Verdict verdict;
    try {
        verdict = nonterm::check_certificate_text(trs, text);
    } catch (const nonterm::ParseError& e) {
        throw Error(cert_path + ": " + e.what());
    }
    if (as_json) {
        json failures = json::array();
        for (const auto& f : verdict.failures) failures.push_back({{"condition", f.condition}, {"witness", f.witness}});
        std::cout << json{{"accepted", verdict.accepted}, {"failures", failures}}.dump(2) << "\n";
    } else {
        std::cout << nonterm::to_string(verdict);
    }
    return verdict.accepted ? kProved : kUnknown;
}

int run_encode(const std::string& input, const std::string& mode, int states, const std::string& cnf_path,
               const nonterm::ReductBounds& bounds, bool allow_uncurry) {
    if (mode == "auto") throw Error("encode needs a concrete --mode");
    const auto method = nonterm::parse_method(mode);
    if (states < 1) throw Error("--states must be positive");
    const auto pre = nonterm::preprocess(load_system(input), allow_uncurry);
    const auto cnf = nonterm::encode(pre.trs, method, states, bounds);
    write_file(cnf_path, nonterm::to_dimacs(cnf));
    std::cout << "preprocessing: " << trace_text(pre.trace) << "\n";
    std::cout << "vars: " << cnf.num_vars() << "\nclauses: " << cnf.clauses.size() << "\n";
    for (const auto& [name, count] : cnf.sections) std::cout << "  " << name << ": " << count << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"nonterm: SAT-based disproof of termination with tree automata"};
    app.require_subcommand(1);

    ProveArgs prove;
    auto* prove_cmd = app.add_subcommand("prove", "search for a non-termination certificate");
    prove_cmd->add_option("file", prove.input, "rewrite system (.trs or .srs)")->required();
    prove_cmd->add_option("--mode", prove.mode, "wn | sn-basic | sn-improved | auto")->capture_default_str();
    prove_cmd->add_option("--states", prove.states, "automaton sizes, N or MIN..MAX")->capture_default_str();
    prove_cmd->add_option("--reduct-steps", prove.reduct_steps, "rewrite steps for weak-closure reducts")
        ->capture_default_str();
    prove_cmd->add_option("--reduct-cap", prove.reduct_cap, "maximum reducts per rule")->capture_default_str();
    prove_cmd->add_option("--solver", prove.solver, "external solver path or 'builtin' (default: $NONTERM_SOLVER or builtin)");
    prove_cmd->add_option("--timeout", prove.timeout, "seconds per SAT call (0 = none)")->capture_default_str();
    prove_cmd->add_flag("--no-uncurry", prove.no_uncurry, "keep symbols of arity above two");
    prove_cmd->add_flag("--parallel", prove.parallel, "try modes and sizes concurrently");
    prove_cmd->add_option("--certificate", prove.certificate, "write the certificate here");
    prove_cmd->add_flag("--json", prove.json, "machine-readable output");

    std::string check_trs, check_cert;
    bool check_json = false;
    auto* check_cmd = app.add_subcommand("check", "verify a certificate");
    check_cmd->add_option("trs", check_trs, "rewrite system")->required();
    check_cmd->add_option("certificate", check_cert, "certificate file")->required();
    check_cmd->add_flag("--json", check_json, "machine-readable output");

    std::string enc_input, enc_mode, enc_cnf;
    int enc_states = 0;
    int enc_steps = 2;
    std::size_t enc_cap = 64;
    bool enc_no_uncurry = false;
    auto* enc_cmd = app.add_subcommand("encode", "write the DIMACS encoding without solving");
    enc_cmd->add_option("file", enc_input, "rewrite system")->required();
    enc_cmd->add_option("--mode", enc_mode, "wn | sn-basic | sn-improved")->required();
    enc_cmd->add_option("--states", enc_states, "automaton size")->required();
    enc_cmd->add_option("--cnf", enc_cnf, "output file")->required();
    enc_cmd->add_option("--reduct-steps", enc_steps, "rewrite steps for weak-closure reducts")->capture_default_str();
    enc_cmd->add_option("--reduct-cap", enc_cap, "maximum reducts per rule")->capture_default_str();
    enc_cmd->add_flag("--no-uncurry", enc_no_uncurry, "keep symbols of arity above two");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kUsage;
    }

    try {
        if (*prove_cmd) return run_prove(prove);
        if (*check_cmd) return run_check(check_trs, check_cert, check_json);
        if (*enc_cmd)
            return run_encode(enc_input, enc_mode, enc_states, enc_cnf, {enc_steps, enc_cap}, !enc_no_uncurry);
    } catch (const nonterm::SoundnessError& e) {
        std::cerr << "internal soundness error: " << e.what() << "\n";
        return kInternal;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    }
    return kUsage;
}
