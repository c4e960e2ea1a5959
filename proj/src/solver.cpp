#include "nonterm/solver.hpp"

#include <fcntl.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "nonterm/error.hpp"

namespace nonterm {

std::string to_string(const SolveResult& r) {
    switch (r.status) {
    case SolveResult::Status::Sat: return "sat";
    case SolveResult::Status::Unsat: return "unsat";
    case SolveResult::Status::Unknown:
        switch (r.reason) {
        case SolveResult::Reason::Timeout: return "unknown(timeout)";
        case SolveResult::Reason::Cancelled: return "unknown(cancelled)";
        default: return "unknown(solver-error)";
        }
    }
    return "?";
}

Backend Backend::parse(const std::string& arg) {
    if (arg == "builtin") return builtin();
    if (!arg.empty()) return external(arg);
    if (const char* env = std::getenv("NONTERM_SOLVER"); env && *env) return parse(env);
    return builtin();
}

std::string to_dimacs(int num_vars, std::span<const Clause> clauses) {
    std::string out = "p cnf " + std::to_string(num_vars) + " " + std::to_string(clauses.size()) + "\n";
    for (const auto& c : clauses) {
        for (int l : c) {
            out += std::to_string(l);
            out += ' ';
        }
        out += "0\n";
    }
    return out;
}

std::string to_dimacs(const CnfProblem& p) { return to_dimacs(p.num_vars(), p.clauses); }

namespace {

using Clock = std::chrono::steady_clock;

class Deadline {
public:
    explicit Deadline(const SolveLimits& limits) : stop_(limits.stop) {
        if (limits.timeout) end_ = Clock::now() + std::chrono::duration_cast<Clock::duration>(
                                                      std::chrono::duration<double>(*limits.timeout));
    }
    std::optional<SolveResult::Reason> expired() const {
        if (stop_ && stop_->load(std::memory_order_relaxed)) return SolveResult::Reason::Cancelled;
        if (end_ && Clock::now() >= *end_) return SolveResult::Reason::Timeout;
        return std::nullopt;
    }
    std::optional<Clock::time_point> end() const { return end_; }

private:
    const std::atomic<bool>* stop_;
    std::optional<Clock::time_point> end_;
};

// Conflict-driven clause learning with two watched literals, VSIDS,
// first-UIP learning, phase saving, Luby restarts and learnt-clause reduction.
class Cdcl {
public:
    Cdcl(int num_vars, const Deadline& deadline)
        : n_(num_vars), deadline_(deadline), value_(static_cast<std::size_t>(n_), kUndef),
          level_(static_cast<std::size_t>(n_), 0), reason_(static_cast<std::size_t>(n_), -1),
          phase_(static_cast<std::size_t>(n_), 0), activity_(static_cast<std::size_t>(n_), 0.0),
          seen_(static_cast<std::size_t>(n_), 0), heap_pos_(static_cast<std::size_t>(n_), -1),
          watches_(static_cast<std::size_t>(2 * n_)) {
        for (int v = 0; v < n_; ++v) heap_insert(v);
    }

    // False if the clause set is already contradictory at level 0.
    bool add_clause(std::span<const int> dimacs) {
        std::vector<int> lits;
        for (int l : dimacs) {
            int v = std::abs(l) - 1;
            if (v < 0 || v >= n_) throw Error("literal " + std::to_string(l) + " out of range");
            lits.push_back(2 * v + (l < 0 ? 1 : 0));
        }
        std::sort(lits.begin(), lits.end());
        lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
        std::vector<int> kept;
        for (std::size_t i = 0; i < lits.size(); ++i) {
            if (i + 1 < lits.size() && (lits[i] ^ 1) == lits[i + 1]) return true;
            int val = lit_value(lits[i]);
            if (val == 1) return true;
            if (val == 0) continue;
            kept.push_back(lits[i]);
        }
        if (kept.empty()) return false;
        if (kept.size() == 1) {
            enqueue(kept[0], -1);
            return propagate() < 0;
        }
        attach(new_clause(std::move(kept), false));
        return true;
    }

    SolveResult run() {
        if (propagate() >= 0) return SolveResult::unsat();
        max_learnts_ = std::max<double>(static_cast<double>(clauses_.size()) / 3.0, 1000.0);
        int restart = 0;
        while (true) {
            const auto budget = static_cast<long>(luby(restart++) * 100);
            auto r = search(budget);
            if (r) return *r;
        }
    }

private:
    static constexpr signed char kUndef = -1;

    struct ClauseData {
        std::vector<int> lits;
        bool learnt = false;
        bool removed = false;
        double activity = 0.0;
    };
    struct Watch {
        int cref;
        int blocker;
    };

    int lit_value(int lit) const {
        auto v = value_[static_cast<std::size_t>(lit >> 1)];
        if (v == kUndef) return kUndef;
        return v ^ (lit & 1);
    }
    int decision_level() const { return static_cast<int>(trail_lim_.size()); }

    int new_clause(std::vector<int> lits, bool learnt) {
        clauses_.push_back({std::move(lits), learnt, false, 0.0});
        return static_cast<int>(clauses_.size()) - 1;
    }
    void attach(int cref) {
        const auto& c = clauses_[static_cast<std::size_t>(cref)].lits;
        watches_[static_cast<std::size_t>(c[0] ^ 1)].push_back({cref, c[1]});
        watches_[static_cast<std::size_t>(c[1] ^ 1)].push_back({cref, c[0]});
    }

    void enqueue(int lit, int reason) {
        auto v = static_cast<std::size_t>(lit >> 1);
        value_[v] = static_cast<signed char>((lit & 1) ^ 1);
        level_[v] = decision_level();
        reason_[v] = reason;
        trail_.push_back(lit);
    }

    // Returns the conflicting clause or -1.
    int propagate() {
        while (qhead_ < trail_.size()) {
            const int p = trail_[qhead_++];
            auto& ws = watches_[static_cast<std::size_t>(p)];
            const int false_lit = p ^ 1;
            std::size_t i = 0, j = 0;
            while (i < ws.size()) {
                Watch w = ws[i];
                if (lit_value(w.blocker) == 1) {
                    ws[j++] = ws[i++];
                    continue;
                }
                auto& cd = clauses_[static_cast<std::size_t>(w.cref)];
                if (cd.removed) {
                    ++i;
                    continue;
                }
                auto& c = cd.lits;
                if (c[0] == false_lit) std::swap(c[0], c[1]);
                ++i;
                const int first = c[0];
                if (first != w.blocker && lit_value(first) == 1) {
                    ws[j++] = {w.cref, first};
                    continue;
                }
                bool moved = false;
                for (std::size_t k = 2; k < c.size(); ++k)
                    if (lit_value(c[k]) != 0) {
                        std::swap(c[1], c[k]);
                        watches_[static_cast<std::size_t>(c[1] ^ 1)].push_back({w.cref, first});
                        moved = true;
                        break;
                    }
                if (moved) continue;
                ws[j++] = {w.cref, first};
                if (lit_value(first) == 0) {
                    while (i < ws.size()) ws[j++] = ws[i++];
                    ws.resize(j);
                    qhead_ = trail_.size();
                    return w.cref;
                }
                enqueue(first, w.cref);
            }
            ws.resize(j);
        }
        return -1;
    }

    void bump_var(int v) {
        auto& a = activity_[static_cast<std::size_t>(v)];
        a += var_inc_;
        if (a > 1e100) {
            for (auto& x : activity_) x *= 1e-100;
            var_inc_ *= 1e-100;
        }
        if (heap_pos_[static_cast<std::size_t>(v)] >= 0) heap_up(heap_pos_[static_cast<std::size_t>(v)]);
    }
    void bump_clause(ClauseData& c) {
        c.activity += cla_inc_;
        if (c.activity > 1e20) {
            for (auto& x : clauses_)
                if (x.learnt) x.activity *= 1e-20;
            cla_inc_ *= 1e-20;
        }
    }

    void analyze(int confl, std::vector<int>& learnt, int& back_level) {
        learnt.assign(1, 0);
        int path = 0;
        int p = -1;
        std::size_t index = trail_.size();
        do {
            auto& c = clauses_[static_cast<std::size_t>(confl)];
            if (c.learnt) bump_clause(c);
            for (std::size_t k = (p == -1 ? 0 : 1); k < c.lits.size(); ++k) {
                const int q = c.lits[k];
                const auto v = static_cast<std::size_t>(q >> 1);
                if (seen_[v] || level_[v] == 0) continue;
                seen_[v] = 1;
                bump_var(static_cast<int>(v));
                if (level_[v] >= decision_level()) ++path;
                else learnt.push_back(q);
            }
            while (!seen_[static_cast<std::size_t>(trail_[--index] >> 1)]) {
            }
            p = trail_[index];
            confl = reason_[static_cast<std::size_t>(p >> 1)];
            seen_[static_cast<std::size_t>(p >> 1)] = 0;
            --path;
            // The reason clause keeps its implied literal first.
            if (confl >= 0) {
                auto& rc = clauses_[static_cast<std::size_t>(confl)].lits;
                if (rc[0] != p) std::swap(*std::find(rc.begin(), rc.end(), p), rc[0]);
            }
        } while (path > 0);
        learnt[0] = p ^ 1;

        // Drop literals implied by the rest of the clause through their reasons.
        const std::vector<int> marked(learnt.begin() + 1, learnt.end());
        std::size_t keep = 1;
        for (std::size_t k = 1; k < learnt.size(); ++k) {
            const auto v = static_cast<std::size_t>(learnt[k] >> 1);
            const int r = reason_[v];
            bool redundant = r >= 0;
            if (redundant)
                for (std::size_t m = 1; m < clauses_[static_cast<std::size_t>(r)].lits.size(); ++m) {
                    const auto u = static_cast<std::size_t>(clauses_[static_cast<std::size_t>(r)].lits[m] >> 1);
                    if (!seen_[u] && level_[u] > 0) {
                        redundant = false;
                        break;
                    }
                }
            if (!redundant) learnt[keep++] = learnt[k];
        }
        for (int q : marked) seen_[static_cast<std::size_t>(q >> 1)] = 0;
        learnt.resize(keep);

        back_level = 0;
        if (learnt.size() > 1) {
            std::size_t max_i = 1;
            for (std::size_t k = 2; k < learnt.size(); ++k)
                if (level_[static_cast<std::size_t>(learnt[k] >> 1)] > level_[static_cast<std::size_t>(learnt[max_i] >> 1)])
                    max_i = k;
            std::swap(learnt[1], learnt[max_i]);
            back_level = level_[static_cast<std::size_t>(learnt[1] >> 1)];
        }
    }

    void cancel_until(int level) {
        if (decision_level() <= level) return;
        const auto lim = static_cast<std::size_t>(trail_lim_[static_cast<std::size_t>(level)]);
        for (std::size_t k = trail_.size(); k-- > lim;) {
            const auto v = static_cast<std::size_t>(trail_[k] >> 1);
            phase_[v] = static_cast<signed char>(value_[v]);
            value_[v] = kUndef;
            reason_[v] = -1;
            if (heap_pos_[v] < 0) heap_insert(static_cast<int>(v));
        }
        trail_.resize(lim);
        trail_lim_.resize(static_cast<std::size_t>(level));
        qhead_ = trail_.size();
    }

    bool locked(int cref) const {
        const auto& c = clauses_[static_cast<std::size_t>(cref)].lits;
        const auto v = static_cast<std::size_t>(c[0] >> 1);
        return reason_[v] == cref && lit_value(c[0]) == 1;
    }

    void reduce_db() {
        std::vector<int> learnts;
        for (std::size_t i = 0; i < clauses_.size(); ++i)
            if (clauses_[i].learnt && !clauses_[i].removed) learnts.push_back(static_cast<int>(i));
        std::sort(learnts.begin(), learnts.end(), [&](int a, int b) {
            return clauses_[static_cast<std::size_t>(a)].activity < clauses_[static_cast<std::size_t>(b)].activity;
        });
        for (std::size_t i = 0; i < learnts.size() / 2; ++i) {
            auto& c = clauses_[static_cast<std::size_t>(learnts[i])];
            if (c.lits.size() > 2 && !locked(learnts[i])) {
                c.removed = true;
                c.lits.shrink_to_fit();
                --num_learnts_;
            }
        }
        for (auto& ws : watches_)
            ws.erase(std::remove_if(ws.begin(), ws.end(),
                                    [&](const Watch& w) { return clauses_[static_cast<std::size_t>(w.cref)].removed; }),
                     ws.end());
    }

    int pick_branch() {
        while (!heap_.empty()) {
            int v = heap_pop();
            if (value_[static_cast<std::size_t>(v)] == kUndef) return v;
        }
        return -1;
    }

    std::optional<SolveResult> search(long budget) {
        long conflicts = 0;
        std::vector<int> learnt;
        while (true) {
            const int confl = propagate();
            if (confl >= 0) {
                ++conflicts;
                if (decision_level() == 0) return SolveResult::unsat();
                int back = 0;
                analyze(confl, learnt, back);
                cancel_until(back);
                if (learnt.size() == 1) {
                    enqueue(learnt[0], -1);
                } else {
                    int cref = new_clause(learnt, true);
                    attach(cref);
                    bump_clause(clauses_[static_cast<std::size_t>(cref)]);
                    ++num_learnts_;
                    enqueue(learnt[0], cref);
                }
                var_inc_ /= 0.95;
                cla_inc_ /= 0.999;
                if ((conflicts & 255) == 0)
                    if (auto why = deadline_.expired()) return SolveResult::unknown(*why);
                continue;
            }
            if (conflicts >= budget) {
                cancel_until(0);
                return std::nullopt;
            }
            if (static_cast<double>(num_learnts_) - static_cast<double>(trail_.size()) >= max_learnts_) {
                reduce_db();
                max_learnts_ *= 1.1;
            }
            if ((++decisions_ & 1023) == 0)
                if (auto why = deadline_.expired()) return SolveResult::unknown(*why);
            const int v = pick_branch();
            if (v < 0) {
                std::vector<bool> model(static_cast<std::size_t>(n_) + 1, false);
                for (int i = 0; i < n_; ++i) model[static_cast<std::size_t>(i) + 1] = value_[static_cast<std::size_t>(i)] == 1;
                return SolveResult::sat(std::move(model));
            }
            trail_lim_.push_back(static_cast<int>(trail_.size()));
            // Saved phase; untouched variables start false.
            enqueue(2 * v + (phase_[static_cast<std::size_t>(v)] == 1 ? 0 : 1), -1);
        }
    }

    static double luby(int x) {
        int size = 1, seq = 0;
        while (size < x + 1) {
            ++seq;
            size = 2 * size + 1;
        }
        while (size - 1 != x) {
            size = (size - 1) >> 1;
            --seq;
            x %= size;
        }
        return static_cast<double>(1 << seq);
    }

    // Max-heap on activity.
    bool heap_less(int a, int b) const {
        return activity_[static_cast<std::size_t>(a)] > activity_[static_cast<std::size_t>(b)];
    }
    void heap_swap(std::size_t i, std::size_t j) {
        std::swap(heap_[i], heap_[j]);
        heap_pos_[static_cast<std::size_t>(heap_[i])] = static_cast<int>(i);
        heap_pos_[static_cast<std::size_t>(heap_[j])] = static_cast<int>(j);
    }
    void heap_up(int pos) {
        auto i = static_cast<std::size_t>(pos);
        while (i > 0) {
            auto parent = (i - 1) / 2;
            if (!heap_less(heap_[i], heap_[parent])) break;
            heap_swap(i, parent);
            i = parent;
        }
    }
    void heap_down(std::size_t i) {
        while (true) {
            auto l = 2 * i + 1, r = l + 1, best = i;
            if (l < heap_.size() && heap_less(heap_[l], heap_[best])) best = l;
            if (r < heap_.size() && heap_less(heap_[r], heap_[best])) best = r;
            if (best == i) return;
            heap_swap(i, best);
            i = best;
        }
    }
    void heap_insert(int v) {
        heap_pos_[static_cast<std::size_t>(v)] = static_cast<int>(heap_.size());
        heap_.push_back(v);
        heap_up(heap_pos_[static_cast<std::size_t>(v)]);
    }
    int heap_pop() {
        int top = heap_[0];
        heap_swap(0, heap_.size() - 1);
        heap_.pop_back();
        heap_pos_[static_cast<std::size_t>(top)] = -1;
        if (!heap_.empty()) heap_down(0);
        return top;
    }

    int n_;
    const Deadline& deadline_;
    std::vector<signed char> value_;
    std::vector<int> level_;
    std::vector<int> reason_;
    std::vector<signed char> phase_;
    std::vector<double> activity_;
    std::vector<char> seen_;
    std::vector<int> heap_;
    std::vector<int> heap_pos_;
    std::vector<std::vector<Watch>> watches_;
    std::vector<ClauseData> clauses_;
    std::vector<int> trail_;
    std::vector<int> trail_lim_;
    std::size_t qhead_ = 0;
    double var_inc_ = 1.0;
    double cla_inc_ = 1.0;
    double max_learnts_ = 0.0;
    long num_learnts_ = 0;
    unsigned long decisions_ = 0;
};

} // namespace

SolveResult solve_builtin(int num_vars, std::span<const Clause> clauses, const SolveLimits& limits) {
    Deadline deadline(limits);
    Cdcl solver(num_vars, deadline);
    for (const auto& c : clauses)
        if (!solver.add_clause(c)) return SolveResult::unsat();
    return solver.run();
}

SolveResult parse_solver_output(const std::string& output, int exit_code, int num_vars) {
    std::istringstream is(output);
    std::string line;
    std::optional<SolveResult::Status> status;
    std::vector<bool> model(static_cast<std::size_t>(num_vars) + 1, false);
    bool saw_values = false;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.rfind("s ", 0) == 0) {
            auto word = line.substr(2);
            word.erase(0, word.find_first_not_of(' '));
            word.erase(word.find_last_not_of(' ') + 1);
            if (word == "SATISFIABLE") status = SolveResult::Status::Sat;
            else if (word == "UNSATISFIABLE") status = SolveResult::Status::Unsat;
            else if (word == "UNKNOWN") status = SolveResult::Status::Unknown;
            else return SolveResult::unknown(SolveResult::Reason::SolverError, "unrecognised status line: " + line);
        } else if (line.rfind("v", 0) == 0) {
            std::istringstream vs(line.substr(1));
            std::string tok;
            while (vs >> tok) {
                long lit = 0;
                try {
                    std::size_t used = 0;
                    lit = std::stol(tok, &used);
                    if (used != tok.size()) throw std::invalid_argument(tok);
                } catch (const std::exception&) {
                    return SolveResult::unknown(SolveResult::Reason::SolverError, "bad model token '" + tok + "'");
                }
                if (lit == 0) continue;
                auto v = std::labs(lit);
                if (v > num_vars)
                    return SolveResult::unknown(SolveResult::Reason::SolverError, "model variable out of range: " + tok);
                model[static_cast<std::size_t>(v)] = lit > 0;
                saw_values = true;
            }
        }
    }
    if (!status) {
        if (exit_code == 10) status = SolveResult::Status::Sat;
        else if (exit_code == 20) status = SolveResult::Status::Unsat;
        else return SolveResult::unknown(SolveResult::Reason::SolverError, "no status line, exit code " + std::to_string(exit_code));
    }
    switch (*status) {
    case SolveResult::Status::Sat:
        if (!saw_values && num_vars > 0)
            return SolveResult::unknown(SolveResult::Reason::SolverError, "satisfiable without a model");
        return SolveResult::sat(std::move(model));
    case SolveResult::Status::Unsat: return SolveResult::unsat();
    default: return SolveResult::unknown(SolveResult::Reason::SolverError, "solver reported UNKNOWN");
    }
}

namespace {

class TempFile {
public:
    explicit TempFile(const std::string& stem) {
        auto pattern = (std::filesystem::temp_directory_path() / (stem + "-XXXXXX")).string();
        std::vector<char> buf(pattern.begin(), pattern.end());
        buf.push_back('\0');
        int fd = mkstemp(buf.data());
        if (fd < 0) throw Error("cannot create a temporary file");
        close(fd);
        path_ = buf.data();
    }
    ~TempFile() {
        std::error_code ec;
        std::filesystem::remove(path_, ec);
    }
    TempFile(const TempFile&) = delete;
    TempFile& operator=(const TempFile&) = delete;
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

} // namespace

SolveResult solve_external(const std::string& path, int num_vars, std::span<const Clause> clauses,
                           const SolveLimits& limits) {
    Deadline deadline(limits);
    TempFile cnf("nonterm-cnf");
    TempFile out("nonterm-out");
    {
        std::ofstream os(cnf.path());
        os << to_dimacs(num_vars, clauses);
        if (!os) return SolveResult::unknown(SolveResult::Reason::SolverError, "cannot write CNF file");
    }

    pid_t pid = fork();
    if (pid < 0) return SolveResult::unknown(SolveResult::Reason::SolverError, "fork failed");
    if (pid == 0) {
        int fd = open(out.path().c_str(), O_WRONLY | O_TRUNC);
        int devnull = open("/dev/null", O_WRONLY);
        if (fd >= 0) dup2(fd, STDOUT_FILENO);
        if (devnull >= 0) dup2(devnull, STDERR_FILENO);
        setpgid(0, 0);
        execl(path.c_str(), path.c_str(), cnf.path().c_str(), static_cast<char*>(nullptr));
        _exit(127);
    }

    int status = 0;
    auto sleep_for = std::chrono::milliseconds(1);
    while (true) {
        pid_t done = waitpid(pid, &status, WNOHANG);
        if (done == pid) break;
        if (done < 0) return SolveResult::unknown(SolveResult::Reason::SolverError, "waitpid failed");
        if (auto why = deadline.expired()) {
            kill(-pid, SIGKILL);
            kill(pid, SIGKILL);
            waitpid(pid, &status, 0);
            return SolveResult::unknown(*why);
        }
        std::this_thread::sleep_for(sleep_for);
        sleep_for = std::min(sleep_for * 2, std::chrono::milliseconds(50));
    }
    if (!WIFEXITED(status)) return SolveResult::unknown(SolveResult::Reason::SolverError, "solver terminated by a signal");
    const int code = WEXITSTATUS(status);
    if (code == 127) return SolveResult::unknown(SolveResult::Reason::SolverError, "cannot execute " + path);

    std::ifstream is(out.path());
    std::stringstream buf;
    buf << is.rdbuf();
    return parse_solver_output(buf.str(), code, num_vars);
}

SolveResult solve(int num_vars, std::span<const Clause> clauses, const Backend& backend, const SolveLimits& limits) {
    if (backend.kind == Backend::Kind::Builtin) {
        auto r = solve_builtin(num_vars, clauses, limits);
        if (r.is_sat() && !satisfies(r.model, clauses)) throw SoundnessError("builtin solver returned a non-model");
        return r;
    }
    auto r = solve_external(backend.path, num_vars, clauses, limits);
    if (r.is_sat() && !satisfies(r.model, clauses))
        return SolveResult::unknown(SolveResult::Reason::SolverError, "external model violates a clause");
    return r;
}

SolveResult solve(const CnfProblem& p, const Backend& backend, const SolveLimits& limits) {
    return solve(p.num_vars(), p.clauses, backend, limits);
}

} // namespace nonterm
