#include "nonterm/prover.hpp"

#include <chrono>
#include <memory>
#include <mutex>

#include "nonterm/checker.hpp"
#include "nonterm/error.hpp"
#include "nonterm/redex.hpp"

namespace nonterm {

std::string to_string(Mode m) {
    switch (m) {
    case Mode::Wn: return "wn";
    case Mode::SnBasic: return "sn-basic";
    case Mode::SnImproved: return "sn-improved";
    case Mode::Auto: return "auto";
    }
    return "?";
}

Mode parse_mode(std::string_view s) {
    if (s == "auto") return Mode::Auto;
    switch (parse_method(s)) {
    case Method::Wn: return Mode::Wn;
    case Method::SnBasic: return Mode::SnBasic;
    case Method::SnImproved: return Mode::SnImproved;
    }
    throw Error("unknown mode");
}

std::string to_string(Outcome o) {
    switch (o) {
    case Outcome::NotWN: return "NotWN";
    case Outcome::NotSN: return "NotSN";
    case Outcome::Unknown: return "Unknown";
    }
    return "?";
}

void ProverConfig::validate() const {
    if (min_states < 1) throw Error("state range must start at 1 or above");
    if (min_states > max_states) throw Error("empty state range");
    if (reducts.steps < 1) throw Error("reduct steps must be positive");
    if (reducts.cap < 1) throw Error("reduct cap must be positive");
    if (timeout && *timeout <= 0) throw Error("timeout must be positive");
}

CnfProblem encode(const Trs& trs, Method method, int num_states, const ReductBounds& bounds) {
    Encoder enc(num_states, trs.signature);
    enc.reachability();
    enc.nonempty();
    switch (method) {
    case Method::Wn:
        enc.closure(trs);
        enc.no_normal_forms(normal_form_automaton(trs));
        break;
    case Method::SnBasic:
        enc.weak_closure(trs, reduct_sets(trs, bounds));
        enc.no_normal_forms(normal_form_automaton(trs));
        break;
    case Method::SnImproved: enc.improved(trs, build_redex_automaton(trs)); break;
    }
    return enc.take();
}

std::optional<Certificate> disprove(const Trs& trs, Method method, int num_states, const ProverConfig& cfg,
                                    Attempt* attempt, const std::atomic<bool>* stop) {
    const auto start = std::chrono::steady_clock::now();
    Attempt log{method, num_states, 0, 0, {}, 0.0};
    auto finish = [&](std::string result) {
        log.result = std::move(result);
        log.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (attempt) *attempt = log;
    };

    CnfProblem cnf;
    try {
        cnf = encode(trs, method, num_states, cfg.reducts);
    } catch (const Error& e) {
        finish(std::string("not applicable: ") + e.what());
        return std::nullopt;
    }
    log.vars = cnf.num_vars();
    log.clauses = cnf.clauses.size();

    const auto result = solve(cnf, cfg.backend, SolveLimits{cfg.timeout, stop});
    if (!result.is_sat()) {
        finish(to_string(result));
        return std::nullopt;
    }
    auto model = decode_model(result.model, cnf, method, trs.rules.size());
    Certificate cert{method == Method::Wn ? Claim::NotWN : Claim::NotSN,
                     method,
                     {},
                     cfg.reducts,
                     std::move(model.automaton),
                     std::move(model.order),
                     std::move(model.selection)};
    const auto verdict = check(trs, cert);
    if (!verdict.accepted)
        throw SoundnessError("checker rejected a decoded model (" + to_string(method) + ", n=" +
                             std::to_string(num_states) + "): " + to_string(verdict));
    finish("sat, verified");
    return cert;
}

namespace {

std::vector<Method> methods_for(Mode mode) {
    switch (mode) {
    case Mode::Wn: return {Method::Wn};
    case Mode::SnBasic: return {Method::SnBasic};
    case Mode::SnImproved: return {Method::SnImproved};
    case Mode::Auto: return {Method::Wn, Method::SnBasic, Method::SnImproved};
    }
    return {};
}

} // namespace

Report search(const Trs& input, const ProverConfig& cfg) {
    cfg.validate();
    auto pre = preprocess(input, cfg.uncurry);
    Report report;
    report.system = pre.trs;
    report.trace = pre.trace;
    if (!pre.trs.left_linear()) {
        report.note = "system is not left-linear; no method applies";
        return report;
    }

    struct Job {
        Method method;
        int n;
    };
    std::vector<Job> jobs;
    for (auto m : methods_for(cfg.mode))
        for (int n = cfg.min_states; n <= cfg.max_states; ++n) jobs.push_back({m, n});

    std::vector<Attempt> logs(jobs.size());
    std::vector<char> ran(jobs.size(), 0);
    std::vector<std::optional<Certificate>> found(jobs.size());

    if (!cfg.parallel) {
        for (std::size_t i = 0; i < jobs.size(); ++i) {
            found[i] = disprove(pre.trs, jobs[i].method, jobs[i].n, cfg, &logs[i]);
            ran[i] = 1;
            if (found[i]) break;
        }
    } else {
        // A success at job i cancels every later job; earlier ones keep running so the
        // winner matches the sequential order unless a timeout intervenes.
        auto stops = std::make_unique<std::atomic<bool>[]>(jobs.size());
        for (std::size_t i = 0; i < jobs.size(); ++i) stops[i] = false;
        std::mutex mu;
        std::exception_ptr failure;
        const auto total = static_cast<long long>(jobs.size());
#pragma omp parallel for schedule(dynamic, 1)
        for (long long k = 0; k < total; ++k) {
            const auto i = static_cast<std::size_t>(k);
            if (stops[i]) continue;
            try {
                Attempt log;
                auto cert = disprove(pre.trs, jobs[i].method, jobs[i].n, cfg, &log, &stops[i]);
                std::lock_guard lock(mu);
                logs[i] = log;
                ran[i] = 1;
                if (cert) {
                    found[i] = std::move(cert);
                    for (std::size_t j = i + 1; j < jobs.size(); ++j) stops[j] = true;
                }
            } catch (...) {
                std::lock_guard lock(mu);
                if (!failure) failure = std::current_exception();
                for (std::size_t j = 0; j < jobs.size(); ++j) stops[j] = true;
            }
        }
        if (failure) std::rethrow_exception(failure);
    }

    for (std::size_t i = 0; i < jobs.size(); ++i) {
        if (ran[i]) report.attempts.push_back(logs[i]);
        if (found[i] && !report.certificate) {
            report.certificate = std::move(found[i]);
            report.certificate->trace = pre.trace;
            report.verdict = jobs[i].method == Method::Wn ? Outcome::NotWN : Outcome::NotSN;
        }
    }
    return report;
}

} // namespace nonterm
