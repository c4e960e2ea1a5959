#include "nonterm/redex.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_map>

#include "nonterm/error.hpp"

namespace nonterm {

namespace {

Term wildcard_form(const Term& t) {
    if (t.is_variable()) return Term::variable("_");
    std::vector<Term> args;
    for (const auto& a : t.args()) args.push_back(wildcard_form(a));
    return Term::apply(t.symbol(), std::move(args));
}

struct PatternNode {
    SymbolId symbol;
    std::vector<int> args; // index into the node table, -1 for a wildcard
};

// Key of a state: sorted root match set and the redex-below flag.
using StateKey = std::pair<std::vector<int>, bool>;

} // namespace

RedexAutomaton build_redex_automaton(const Signature& sig, std::span<const Term> patterns) {
    std::vector<PatternNode> nodes;
    std::map<Term, int> node_index;
    std::vector<int> pattern_node;

    for (const auto& p : patterns) {
        if (p.is_variable()) throw Error("redex pattern is a variable");
        if (!is_linear(p)) throw Error("redex pattern is not linear");
        for (const auto& s : subterms(wildcard_form(p))) {
            if (s.is_variable() || node_index.contains(s)) continue;
            PatternNode node{s.symbol(), {}};
            for (const auto& a : s.args()) node.args.push_back(a.is_variable() ? -1 : node_index.at(a));
            node_index.emplace(s, static_cast<int>(nodes.size()));
            nodes.push_back(std::move(node));
        }
        pattern_node.push_back(node_index.at(wildcard_form(p)));
    }
    std::set<int> full_patterns(pattern_node.begin(), pattern_node.end());

    std::vector<StateKey> keys;
    std::map<StateKey, State> ids;
    auto intern = [&](StateKey key) {
        auto [it, inserted] = ids.emplace(key, static_cast<State>(keys.size()));
        if (inserted) keys.push_back(std::move(key));
        return it->second;
    };

    auto step = [&](SymbolId f, const std::vector<State>& args) {
        StateKey key{{}, false};
        for (auto q : args) key.second = key.second || keys[static_cast<std::size_t>(q)].second;
        for (std::size_t m = 0; m < nodes.size(); ++m) {
            const auto& node = nodes[m];
            if (node.symbol != f) continue;
            bool ok = true;
            for (std::size_t i = 0; i < node.args.size() && ok; ++i) {
                if (node.args[i] < 0) continue;
                const auto& set = keys[static_cast<std::size_t>(args[i])].first;
                ok = std::binary_search(set.begin(), set.end(), node.args[i]);
            }
            if (ok) {
                key.first.push_back(static_cast<int>(m));
                key.second = key.second || full_patterns.contains(static_cast<int>(m));
            }
        }
        return intern(std::move(key));
    };

    // Saturate: evaluate every symbol on every tuple of known states until no new state appears.
    std::map<std::pair<SymbolId, std::vector<State>>, State> table;
    bool grew = true;
    while (grew) {
        grew = false;
        const auto known = static_cast<State>(keys.size());
        for (SymbolId f = 0; f < sig.size(); ++f) {
            const auto k = static_cast<std::size_t>(sig.arity(f));
            if (k > 0 && known == 0) continue;
            std::vector<State> idx(k, 0);
            while (true) {
                auto key = std::make_pair(f, idx);
                if (!table.contains(key)) {
                    table.emplace(std::move(key), step(f, idx));
                    grew = true;
                }
                std::size_t i = k;
                while (i > 0 && ++idx[i - 1] == known) idx[--i] = 0;
                if (i == 0) break;
            }
        }
        grew = grew || static_cast<State>(keys.size()) != known;
    }

    const auto n = static_cast<int>(keys.size());
    RedexAutomaton out{TreeAutomaton(sig, n), {}};
    for (const auto& [key, target] : table) out.automaton.add_transition(key.first, key.second, target);
    for (State q = 0; q < n; ++q)
        if (keys[static_cast<std::size_t>(q)].second) out.automaton.set_final(q);
    for (auto pn : pattern_node) {
        StateSet finals(n);
        for (State q = 0; q < n; ++q) {
            const auto& set = keys[static_cast<std::size_t>(q)].first;
            if (std::binary_search(set.begin(), set.end(), pn)) finals.insert(q);
        }
        out.pattern_finals.push_back(std::move(finals));
    }
    return out;
}

namespace {

std::vector<Term> lhs_patterns(const Trs& trs) {
    std::vector<Term> out;
    out.reserve(trs.rules.size());
    for (const auto& r : trs.rules) out.push_back(r.lhs);
    return out;
}

} // namespace

RedexAutomaton build_redex_automaton(const Trs& trs) {
    auto patterns = lhs_patterns(trs);
    return build_redex_automaton(trs.signature, patterns);
}

TreeAutomaton normal_form_automaton(const Signature& sig, std::span<const Term> patterns) {
    return complement_finals(build_redex_automaton(sig, patterns).automaton);
}

TreeAutomaton normal_form_automaton(const Trs& trs) {
    auto patterns = lhs_patterns(trs);
    return normal_form_automaton(trs.signature, patterns);
}

} // namespace nonterm
