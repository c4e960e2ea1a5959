#include "nonterm/kernels.hpp"

#include <algorithm>
#include <climits>
#include <functional>

#include "nonterm/error.hpp"

namespace nonterm {

namespace {

// Flattened (rule, assignment) index space.
class Sweep {
public:
    Sweep(const Trs& trs, int n) : n_(n) {
        offsets_.push_back(0);
        for (const auto& r : trs.rules) {
            vars_.push_back(variables(r.lhs));
            long long count = 1;
            for (std::size_t i = 0; i < vars_.back().size(); ++i) {
                count *= n;
                if (count > (1LL << 40)) throw Error("assignment space too large");
            }
            offsets_.push_back(offsets_.back() + count);
        }
    }

    long long size() const { return offsets_.back(); }

    std::pair<std::size_t, StateAssignment> at(long long index, std::vector<State>& alpha) const {
        auto rule = static_cast<std::size_t>(std::upper_bound(offsets_.begin(), offsets_.end(), index) - offsets_.begin() - 1);
        long long code = index - offsets_[rule];
        const auto& vars = vars_[rule];
        alpha.assign(vars.size(), 0);
        for (std::size_t i = vars.size(); i-- > 0;) {
            alpha[i] = static_cast<State>(code % n_);
            code /= n_;
        }
        StateAssignment named;
        for (std::size_t i = 0; i < vars.size(); ++i) named.emplace(vars[i], alpha[i]);
        return {rule, std::move(named)};
    }

private:
    int n_;
    std::vector<long long> offsets_;
    std::vector<std::vector<std::string>> vars_;
};

// Smallest index whose probe reports a violating state.
std::optional<RuleViolation> first_violation(const Sweep& sweep, Exec exec,
                                             const std::function<std::optional<State>(long long, RuleViolation&)>& probe) {
    const long long total = sweep.size();
    long long best = LLONG_MAX;
    if (exec == Exec::Serial) {
        for (long long i = 0; i < total; ++i) {
            RuleViolation v;
            if (probe(i, v)) {
                best = i;
                break;
            }
        }
    } else {
#pragma omp parallel for schedule(dynamic, 16) reduction(min : best)
        for (long long i = 0; i < total; ++i) {
            if (i > best) continue;
            RuleViolation v;
            if (probe(i, v)) best = std::min(best, i);
        }
    }
    if (best == LLONG_MAX) return std::nullopt;
    RuleViolation v;
    v.q = *probe(best, v);
    return v;
}

} // namespace

std::optional<RuleViolation> find_closure_violation(const Trs& trs, const TreeAutomaton& a,
                                                    const std::vector<std::vector<Term>>& targets, Exec exec) {
    if (targets.size() != trs.rules.size()) throw Error("one target list per rule expected");
    Sweep sweep(trs, a.num_states());
    auto probe = [&](long long index, RuleViolation& out) -> std::optional<State> {
        auto [rule, alpha] = sweep.at(index, out.alpha);
        out.rule = rule;
        const auto lhs_states = states_of(trs.rules[rule].lhs, a, alpha);
        if (lhs_states.empty()) return std::nullopt;
        StateSet covered(a.num_states());
        for (const auto& t : targets[rule]) covered |= states_of(t, a, alpha);
        for (auto q : lhs_states.elements())
            if (!covered.contains(q)) return q;
        return std::nullopt;
    };
    return first_violation(sweep, exec, probe);
}

std::optional<RuleViolation> find_model_violation(const Trs& trs, const TreeAutomaton& a, const QuasiOrder& order,
                                                  const Selection& selection, Exec exec) {
    const int n = a.num_states();
    if (order.size() != n || static_cast<int>(selection.size()) != n) throw Error("order or selection size mismatch");
    std::vector<std::vector<Term>> rhs_subterms;
    for (const auto& r : trs.rules) rhs_subterms.push_back(subterms(r.rhs));
    Sweep sweep(trs, n);
    auto probe = [&](long long index, RuleViolation& out) -> std::optional<State> {
        auto [rule, alpha] = sweep.at(index, out.alpha);
        out.rule = rule;
        const auto lhs_states = states_of(trs.rules[rule].lhs, a, alpha);
        if (lhs_states.empty()) return std::nullopt;
        bool escape = false;
        for (const auto& s : rhs_subterms[rule])
            if (states_of(s, a, alpha).intersects(a.finals())) {
                escape = true;
                break;
            }
        if (escape) return std::nullopt;
        const auto rhs_states = states_of(trs.rules[rule].rhs, a, alpha);
        for (auto q : lhs_states.elements()) {
            if (!selection[static_cast<std::size_t>(q)].contains(rule)) continue;
            bool above = false;
            for (auto p : rhs_states.elements())
                if (order.leq(q, p)) {
                    above = true;
                    break;
                }
            if (!above) return q;
        }
        return std::nullopt;
    };
    return first_violation(sweep, exec, probe);
}

std::vector<char> accepts_all(std::span<const Term> terms, const TreeAutomaton& a, Exec exec) {
    std::vector<char> out(terms.size(), 0);
    const auto total = static_cast<long long>(terms.size());
    if (exec == Exec::Serial) {
        for (long long i = 0; i < total; ++i) out[static_cast<std::size_t>(i)] = accepts(terms[static_cast<std::size_t>(i)], a);
    } else {
#pragma omp parallel for schedule(dynamic, 256)
        for (long long i = 0; i < total; ++i) out[static_cast<std::size_t>(i)] = accepts(terms[static_cast<std::size_t>(i)], a);
    }
    return out;
}

} // namespace nonterm
