#include "nonterm/rewrite.hpp"

#include <unordered_set>

#include "nonterm/error.hpp"

namespace nonterm {

std::vector<Term> one_step_reducts_ordered(const Term& t, const Trs& trs) {
    std::vector<Term> out;
    std::unordered_set<Term, TermHash> seen;
    for (const auto& p : positions(t)) {
        const auto& s = subterm_at(t, p);
        if (s.is_variable()) continue;
        for (const auto& rule : trs.rules) {
            auto sigma = match(rule.lhs, s);
            if (!sigma) continue;
            auto reduct = replace_at(t, p, substitute(rule.rhs, *sigma));
            if (seen.insert(reduct).second) out.push_back(std::move(reduct));
        }
    }
    return out;
}

std::set<Term> one_step_reducts(const Term& t, const Trs& trs) {
    auto ordered = one_step_reducts_ordered(t, trs);
    return {ordered.begin(), ordered.end()};
}

std::vector<Term> reducts_up_to(const Term& t, const Trs& trs, int steps, std::size_t cap) {
    if (steps < 1) throw Error("reducts_up_to needs at least one step");
    std::vector<Term> out;
    std::unordered_set<Term, TermHash> seen;
    std::vector<Term> frontier{t};
    for (int step = 0; step < steps && !frontier.empty(); ++step) {
        std::vector<Term> next;
        for (const auto& s : frontier) {
            auto reducts = one_step_reducts_ordered(s, trs);
            if (step == 0 && reducts.size() > cap)
                throw Error("reduct cap " + std::to_string(cap) + " is below the " +
                            std::to_string(reducts.size()) + " one-step reducts; raise the cap");
            for (auto& r : reducts) {
                if (out.size() >= cap) return out;
                if (!seen.insert(r).second) continue;
                out.push_back(r);
                next.push_back(std::move(r));
            }
        }
        frontier = std::move(next);
    }
    return out;
}

bool is_normal_form(const Term& t, const Trs& trs) {
    if (t.is_variable()) return true;
    for (const auto& rule : trs.rules)
        if (match(rule.lhs, t)) return false;
    for (const auto& a : t.args())
        if (!is_normal_form(a, trs)) return false;
    return true;
}

} // namespace nonterm
