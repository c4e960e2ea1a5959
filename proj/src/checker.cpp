#include "nonterm/checker.hpp"

#include <algorithm>
#include <sstream>

#include "nonterm/error.hpp"
#include "nonterm/redex.hpp"
#include "nonterm/rewrite.hpp"
#include "nonterm/syntax.hpp"

namespace nonterm {

void Verdict::fail(std::string condition, std::string witness) {
    accepted = false;
    failures.push_back({std::move(condition), std::move(witness)});
}

std::string to_string(const Verdict& v) {
    if (v.accepted) return "accepted\n";
    std::string out = "rejected\n";
    for (const auto& f : v.failures) out += "  " + f.condition + ": " + f.witness + "\n";
    return out;
}

namespace {

void require_shape(const Trs& trs, const TreeAutomaton& a) {
    if (!(trs.signature == a.signature())) throw Error("automaton signature does not match the system");
    if (!trs.left_linear()) throw Error("checker requires a left-linear system");
    if (trs.has_collapsing_rule()) throw Error("checker requires a non-collapsing system");
}

// Reachability of every state and a reachable final state.
Reachability check_inhabited(const TreeAutomaton& a, Verdict& v) {
    auto reach = reachability(a);
    for (State q = 0; q < a.num_states(); ++q)
        if (!reach.reached.contains(q)) v.fail("reachability", "state " + std::to_string(q) + " is not reachable");
    if (a.finals().empty()) v.fail("non-emptiness", "no final state");
    else if (!reach.reached.intersects(a.finals())) v.fail("non-emptiness", "no final state is reachable");
    return reach;
}

std::string describe(const Trs& trs, const RuleViolation& viol, const Reachability& reach, std::string_view what) {
    const auto& rule = trs.rules[viol.rule];
    const auto vars = variables(rule.lhs);
    std::ostringstream os;
    os << "rule " << viol.rule << " (" << to_string(rule, trs.signature) << "), alpha {";
    Substitution sigma;
    bool ground = true;
    for (std::size_t i = 0; i < vars.size(); ++i) {
        os << (i ? ", " : "") << vars[i] << "=" << viol.alpha[i];
        if (reach.reached.contains(viol.alpha[i])) sigma.emplace(vars[i], reach.witness(viol.alpha[i]));
        else ground = false;
    }
    os << "}, state " << viol.q << ": " << what;
    if (ground) os << "; instance " << to_string(substitute(rule.lhs, sigma), trs.signature);
    return os.str();
}

void check_no_normal_forms(const Trs& trs, const TreeAutomaton& a, Verdict& v) {
    const auto nf = normal_form_automaton(trs);
    const auto prod = product(a, nf);
    const auto reach = reachability(prod);
    const int m = nf.num_states();
    for (auto q : a.finals().elements())
        for (auto p : nf.finals().elements()) {
            const auto s = product_state(q, p, m);
            if (reach.reached.contains(s)) {
                v.fail("no-normal-forms", "accepted normal form " + to_string(reach.witness(s), trs.signature));
                return;
            }
        }
}

} // namespace

std::vector<std::vector<Term>> reduct_sets(const Trs& trs, const ReductBounds& bounds) {
    std::vector<std::vector<Term>> out;
    for (const auto& r : trs.rules) out.push_back(reducts_up_to(r.lhs, trs, bounds.steps, bounds.cap));
    return out;
}

Verdict check_wn(const Trs& trs, const TreeAutomaton& a, Exec exec) {
    require_shape(trs, a);
    Verdict v;
    const auto reach = check_inhabited(a, v);
    std::vector<std::vector<Term>> targets;
    for (const auto& r : trs.rules) targets.push_back({r.rhs});
    if (auto viol = find_closure_violation(trs, a, targets, exec))
        v.fail("closure", describe(trs, *viol, reach, "lhs reaches it, rhs does not"));
    check_no_normal_forms(trs, a, v);
    return v;
}

Verdict check_sn_basic(const Trs& trs, const TreeAutomaton& a, const std::vector<std::vector<Term>>& sets, Exec exec) {
    require_shape(trs, a);
    if (sets.size() != trs.rules.size()) throw Error("one reduct set per rule expected");
    Verdict v;
    for (std::size_t i = 0; i < sets.size(); ++i) {
        const auto lvars = variables(trs.rules[i].lhs);
        for (const auto& t : sets[i])
            for (const auto& x : variables(t))
                if (!std::binary_search(lvars.begin(), lvars.end(), x))
                    throw Error("reduct " + to_string(t, trs.signature) + " has a variable not in the lhs");
    }
    const auto reach = check_inhabited(a, v);
    if (auto viol = find_closure_violation(trs, a, sets, exec))
        v.fail("weak-closure", describe(trs, *viol, reach, "lhs reaches it, no listed reduct does"));
    check_no_normal_forms(trs, a, v);
    return v;
}

Verdict check_sn_improved(const Trs& trs, const Certificate& cert, Exec exec) {
    const auto& a = cert.automaton;
    require_shape(trs, a);
    if (!cert.order || !cert.selection) throw Error("improved certificate needs an order and a selection");
    const auto& order = *cert.order;
    const auto& sel = *cert.selection;
    const int n = a.num_states();
    if (order.size() != n || static_cast<int>(sel.size()) != n) throw Error("order or selection size mismatch");

    Verdict v;
    const auto reach = check_inhabited(a, v);

    if (auto bad = order.check()) v.fail("order", *bad);
    if (auto bad = check_monotonic(a, order)) v.fail("monotonicity", *bad);

    bool selection_ok = true;
    for (State q = 0; q < n; ++q)
        for (auto r : sel[static_cast<std::size_t>(q)])
            if (r >= trs.rules.size()) {
                v.fail("selection", "state " + std::to_string(q) + " selects unknown rule " + std::to_string(r));
                selection_ok = false;
            }
    if (!selection_ok) return v;

    if (auto viol = find_model_violation(trs, a, order, sel, exec))
        v.fail("model", describe(trs, *viol, reach, "rule selected, rhs reaches no larger state and no subterm is accepted"));

    // Runs that never enter a product state with a selected redex at its root.
    const auto redex = build_redex_automaton(trs);
    const int m = redex.automaton.num_states();
    const auto prod = product(a, redex.automaton);
    auto allowed = [&](State s) {
        const State q = s / m, p = s % m;
        for (auto r : sel[static_cast<std::size_t>(q)])
            if (redex.pattern_finals[r].contains(p)) return false;
        return true;
    };
    const auto pruned = reachability(prod, allowed);
    for (auto q : a.finals().elements())
        for (State p = 0; p < m; ++p) {
            const auto s = product_state(q, p, m);
            if (pruned.reached.contains(s)) {
                v.fail("reducibility", "accepted without a selected redex: " + to_string(pruned.witness(s), trs.signature));
                return v;
            }
        }
    return v;
}

Verdict check(const Trs& trs, const Certificate& cert, Exec exec) {
    const Claim expected = cert.method == Method::Wn ? Claim::NotWN : Claim::NotSN;
    if (cert.claim != expected) {
        Verdict v;
        v.fail("claim", "method " + to_string(cert.method) + " cannot establish " + to_string(cert.claim));
        return v;
    }
    switch (cert.method) {
    case Method::Wn: return check_wn(trs, cert.automaton, exec);
    case Method::SnBasic: {
        std::vector<std::vector<Term>> sets;
        try {
            sets = reduct_sets(trs, cert.reducts);
        } catch (const Error& e) {
            Verdict v;
            v.fail("reducts", e.what());
            return v;
        }
        return check_sn_basic(trs, cert.automaton, sets, exec);
    }
    case Method::SnImproved: return check_sn_improved(trs, cert, exec);
    }
    throw Error("unknown method");
}

Verdict check_certificate_text(const Trs& original, std::string_view text, Exec exec) {
    const auto header = parse_certificate_header(text);
    const auto trs = apply_preprocessing(original, header.trace);
    const auto cert = parse_certificate(text, trs.signature);
    return check(trs, cert, exec);
}

} // namespace nonterm
