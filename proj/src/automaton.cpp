#include "nonterm/automaton.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

#include "nonterm/error.hpp"

namespace nonterm {

TreeAutomaton::TreeAutomaton(Signature signature, int num_states)
    : signature_(std::move(signature)), num_states_(num_states), finals_(num_states),
      by_symbol_(static_cast<std::size_t>(signature_.size())) {
    if (num_states < 0) throw Error("negative state count");
}

void TreeAutomaton::check_state(State q) const {
    if (q < 0 || q >= num_states_)
        throw Error("state " + std::to_string(q) + " out of range 0.." + std::to_string(num_states_ - 1));
}

void TreeAutomaton::set_final(State q, bool final) {
    check_state(q);
    if (final) finals_.insert(q);
    else finals_.erase(q);
}

void TreeAutomaton::set_finals(const StateSet& finals) {
    if (finals.universe() != num_states_) throw Error("final set over the wrong state space");
    finals_ = finals;
}

void TreeAutomaton::add_transition(SymbolId f, std::vector<State> args, State target) {
    if (f < 0 || f >= signature_.size()) throw Error("unknown symbol id " + std::to_string(f));
    if (static_cast<int>(args.size()) != signature_.arity(f))
        throw Error("transition for " + signature_.name(f) + " has " + std::to_string(args.size()) +
                    " arguments, expected " + std::to_string(signature_.arity(f)));
    for (auto q : args) check_state(q);
    check_state(target);
    Transition t{f, std::move(args), target};
    auto& list = by_symbol_[static_cast<std::size_t>(f)];
    auto it = std::lower_bound(list.begin(), list.end(), t);
    if (it == list.end() || *it != t) list.insert(it, std::move(t));
}

void TreeAutomaton::add_transitions(SymbolId f, std::vector<Transition> transitions) {
    if (f < 0 || f >= signature_.size()) throw Error("unknown symbol id " + std::to_string(f));
    for (const auto& t : transitions) {
        if (t.symbol != f || static_cast<int>(t.args.size()) != signature_.arity(f))
            throw Error("malformed bulk transition for " + signature_.name(f));
        for (auto q : t.args) check_state(q);
        check_state(t.target);
    }
    auto& list = by_symbol_[static_cast<std::size_t>(f)];
    list.insert(list.end(), std::make_move_iterator(transitions.begin()), std::make_move_iterator(transitions.end()));
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
}

void TreeAutomaton::remove_transition(SymbolId f, const std::vector<State>& args, State target) {
    auto& list = by_symbol_.at(static_cast<std::size_t>(f));
    Transition t{f, args, target};
    auto it = std::lower_bound(list.begin(), list.end(), t);
    if (it != list.end() && *it == t) list.erase(it);
}

bool TreeAutomaton::has_transition(SymbolId f, std::span<const State> args, State target) const {
    for (const auto& t : transitions_from(f, args))
        if (t.target == target) return true;
    return false;
}

std::span<const Transition> TreeAutomaton::transitions_from(SymbolId f, std::span<const State> args) const {
    const auto& list = transitions(f);
    auto cmp_lo = [](const Transition& t, std::span<const State> key) {
        return std::lexicographical_compare(t.args.begin(), t.args.end(), key.begin(), key.end());
    };
    auto cmp_hi = [](std::span<const State> key, const Transition& t) {
        return std::lexicographical_compare(key.begin(), key.end(), t.args.begin(), t.args.end());
    };
    auto lo = std::lower_bound(list.begin(), list.end(), args, cmp_lo);
    auto hi = std::upper_bound(lo, list.end(), args, cmp_hi);
    return {lo, hi};
}

std::size_t TreeAutomaton::transition_count() const {
    std::size_t n = 0;
    for (const auto& l : by_symbol_) n += l.size();
    return n;
}

StateSet states_of(const Term& t, const TreeAutomaton& a, const StateAssignment& alpha) {
    StateSet out(a.num_states());
    if (t.is_variable()) {
        auto it = alpha.find(t.name());
        if (it == alpha.end()) throw Error("no state assigned to variable " + t.name());
        out.insert(it->second);
        return out;
    }
    const auto& sig = a.signature();
    if (t.symbol() >= sig.size() || sig.arity(t.symbol()) != static_cast<int>(t.arity()))
        throw Error("term symbol " + std::to_string(t.symbol()) + " is not in the automaton signature");
    std::vector<StateSet> args;
    args.reserve(t.arity());
    for (const auto& s : t.args()) {
        args.push_back(states_of(s, a, alpha));
        if (args.back().empty()) return out;
    }
    for (const auto& tr : a.transitions(t.symbol())) {
        bool ok = true;
        for (std::size_t i = 0; i < tr.args.size() && ok; ++i) ok = args[i].contains(tr.args[i]);
        if (ok) out.insert(tr.target);
    }
    return out;
}

bool accepts(const Term& t, const TreeAutomaton& a) {
    return states_of(t, a).intersects(a.finals());
}

Term Reachability::witness(State q) const {
    if (!reached.contains(q)) throw Error("state " + std::to_string(q) + " is not reachable");
    const auto& tr = *via[static_cast<std::size_t>(q)];
    std::vector<Term> args;
    for (auto p : tr.args) args.push_back(witness(p));
    return Term::apply(tr.symbol, std::move(args));
}

Reachability reachability(const TreeAutomaton& a, const std::function<bool(State)>& allowed) {
    const int n = a.num_states();
    Reachability result{StateSet(n), std::vector<std::optional<Transition>>(static_cast<std::size_t>(n))};

    std::vector<const Transition*> all;
    for (SymbolId f = 0; f < a.signature().size(); ++f)
        for (const auto& t : a.transitions(f)) all.push_back(&t);

    // Counter per transition of argument positions not yet reached.
    std::vector<std::size_t> pending(all.size());
    std::vector<std::vector<std::size_t>> occurrences(static_cast<std::size_t>(n));
    std::deque<State> work;

    auto fire = [&](std::size_t i) {
        auto q = all[i]->target;
        if (result.reached.contains(q) || (allowed && !allowed(q))) return;
        result.reached.insert(q);
        result.via[static_cast<std::size_t>(q)] = *all[i];
        work.push_back(q);
    };

    for (std::size_t i = 0; i < all.size(); ++i) {
        pending[i] = all[i]->args.size();
        for (auto q : all[i]->args) occurrences[static_cast<std::size_t>(q)].push_back(i);
    }
    for (std::size_t i = 0; i < all.size(); ++i)
        if (pending[i] == 0) fire(i);
    while (!work.empty()) {
        auto q = work.front();
        work.pop_front();
        for (auto i : occurrences[static_cast<std::size_t>(q)])
            if (--pending[i] == 0) fire(i);
    }
    return result;
}

StateSet reachable_states(const TreeAutomaton& a) {
    return reachability(a).reached;
}

TreeAutomaton product(const TreeAutomaton& a, const TreeAutomaton& b) {
    if (!(a.signature() == b.signature())) throw Error("product of automata over different signatures");
    const int nb = b.num_states();
    TreeAutomaton c(a.signature(), a.num_states() * nb);
    for (auto q : a.finals().elements())
        for (auto p : b.finals().elements()) c.set_final(product_state(q, p, nb));
    for (SymbolId f = 0; f < a.signature().size(); ++f) {
        std::vector<Transition> merged;
        merged.reserve(a.transitions(f).size() * b.transitions(f).size());
        for (const auto& ta : a.transitions(f))
            for (const auto& tb : b.transitions(f)) {
                Transition t{f, std::vector<State>(ta.args.size()), product_state(ta.target, tb.target, nb)};
                for (std::size_t i = 0; i < ta.args.size(); ++i) t.args[i] = product_state(ta.args[i], tb.args[i], nb);
                merged.push_back(std::move(t));
            }
        c.add_transitions(f, std::move(merged));
    }
    return c;
}

TreeAutomaton complement_finals(const TreeAutomaton& b) {
    if (!is_deterministic(b)) throw Error("complement_finals needs a deterministic automaton");
    if (!is_complete(b)) throw Error("complement_finals needs a complete automaton");
    TreeAutomaton out = b;
    out.set_finals(b.finals().complement());
    return out;
}

bool intersection_empty(const TreeAutomaton& a, const TreeAutomaton& b) {
    auto c = product(a, b);
    return !reachable_states(c).intersects(c.finals());
}

bool is_deterministic(const TreeAutomaton& a) {
    for (SymbolId f = 0; f < a.signature().size(); ++f) {
        const auto& list = a.transitions(f);
        for (std::size_t i = 1; i < list.size(); ++i)
            if (list[i].args == list[i - 1].args) return false;
    }
    return true;
}

bool is_complete(const TreeAutomaton& a) {
    const int n = a.num_states();
    for (SymbolId f = 0; f < a.signature().size(); ++f) {
        const auto k = static_cast<std::size_t>(a.signature().arity(f));
        if (n == 0) return false;
        // Distinct argument tuples present must cover all n^k tuples.
        const auto& list = a.transitions(f);
        std::size_t distinct = 0;
        for (std::size_t i = 0; i < list.size(); ++i)
            if (i == 0 || list[i].args != list[i - 1].args) ++distinct;
        std::size_t expected = 1;
        for (std::size_t i = 0; i < k; ++i) expected *= static_cast<std::size_t>(n);
        if (distinct != expected) return false;
    }
    return true;
}

QuasiOrder QuasiOrder::identity(int n) {
    QuasiOrder o(n);
    for (State q = 0; q < n; ++q) o.set(q, q);
    return o;
}

std::optional<std::string> QuasiOrder::check() const {
    for (State q = 0; q < n_; ++q)
        if (!leq(q, q)) return "not reflexive at " + std::to_string(q);
    for (State a = 0; a < n_; ++a)
        for (State b = 0; b < n_; ++b) {
            if (!leq(a, b)) continue;
            for (State c = 0; c < n_; ++c)
                if (leq(b, c) && !leq(a, c))
                    return "not transitive: " + std::to_string(a) + "<=" + std::to_string(b) + "<=" +
                           std::to_string(c);
        }
    return std::nullopt;
}

std::optional<std::string> check_monotonic(const TreeAutomaton& a, const QuasiOrder& order) {
    const int n = a.num_states();
    if (order.size() != n) return "order over " + std::to_string(order.size()) + " states";
    for (State q = 0; q < n; ++q)
        for (State p = 0; p < n; ++p)
            if (a.is_final(q) && order.leq(q, p) && !a.is_final(p))
                return "final state " + std::to_string(q) + " <= non-final " + std::to_string(p);

    for (SymbolId f = 0; f < a.signature().size(); ++f) {
        const auto k = static_cast<std::size_t>(a.signature().arity(f));
        for (const auto& tr : a.transitions(f)) {
            // Every tuple b with tr.args[i] <= b[i] must reach something above tr.target.
            std::vector<std::vector<State>> above(k);
            for (std::size_t i = 0; i < k; ++i)
                for (State s = 0; s < n; ++s)
                    if (order.leq(tr.args[i], s)) above[i].push_back(s);
            // Possible only for a non-reflexive relation; then there is nothing to cover.
            if (std::any_of(above.begin(), above.end(), [](const auto& v) { return v.empty(); })) continue;
            std::vector<std::size_t> idx(k, 0);
            std::vector<State> tuple(k);
            while (true) {
                for (std::size_t i = 0; i < k; ++i) tuple[i] = above[i][idx[i]];
                bool found = false;
                for (const auto& t2 : a.transitions_from(f, tuple))
                    if (order.leq(tr.target, t2.target)) {
                        found = true;
                        break;
                    }
                if (!found) {
                    std::ostringstream os;
                    os << a.signature().name(f) << "(";
                    for (std::size_t i = 0; i < k; ++i) os << (i ? "," : "") << tr.args[i];
                    os << ") -> " << tr.target << " has no compatible transition from (";
                    for (std::size_t i = 0; i < k; ++i) os << (i ? "," : "") << tuple[i];
                    os << ")";
                    return os.str();
                }
                std::size_t i = 0;
                while (i < k && ++idx[i] == above[i].size()) idx[i++] = 0;
                if (i == k) break;
            }
        }
    }
    return std::nullopt;
}

std::string to_text(const TreeAutomaton& a) {
    std::ostringstream os;
    os << "states " << a.num_states() << "\n";
    os << "final";
    for (auto q : a.finals().elements()) os << " " << q;
    os << "\n";
    for (SymbolId f = 0; f < a.signature().size(); ++f)
        for (const auto& t : a.transitions(f)) {
            os << a.signature().name(f);
            for (auto q : t.args) os << " " << q;
            os << " -> " << t.target << "\n";
        }
    return os.str();
}

namespace {

State parse_state(const std::string& token, std::size_t line) {
    try {
        std::size_t used = 0;
        auto v = std::stoi(token, &used);
        if (used != token.size() || v < 0) throw std::invalid_argument(token);
        return v;
    } catch (const std::exception&) {
        throw ParseError(line, 1, "expected a state number, got '" + token + "'");
    }
}

std::vector<std::string> tokens(std::string_view line) {
    std::vector<std::string> out;
    std::istringstream is{std::string(line)};
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

} // namespace

TreeAutomaton parse_automaton(std::string_view text, const Signature& sig) {
    std::optional<TreeAutomaton> a;
    std::vector<std::pair<std::size_t, std::vector<std::string>>> pending_finals;
    std::istringstream is{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        auto toks = tokens(line);
        if (toks.empty() || toks[0].starts_with("%")) continue;
        if (toks[0] == "states") {
            if (a) throw ParseError(line_no, 1, "duplicate 'states' line");
            if (toks.size() != 2) throw ParseError(line_no, 1, "expected 'states <n>'");
            a.emplace(sig, parse_state(toks[1], line_no));
            continue;
        }
        if (!a) throw ParseError(line_no, 1, "'states' line must come first");
        if (toks[0] == "final") {
            for (std::size_t i = 1; i < toks.size(); ++i) {
                auto q = parse_state(toks[i], line_no);
                if (q >= a->num_states()) throw ParseError(line_no, 1, "final state out of range");
                a->set_final(q);
            }
            continue;
        }
        auto arrow = std::find(toks.begin(), toks.end(), "->");
        if (arrow == toks.end()) throw ParseError(line_no, 1, "unrecognized line '" + line + "'");
        if (arrow + 2 != toks.end()) throw ParseError(line_no, 1, "expected a single target state after '->'");
        auto f = sig.find(toks[0]);
        if (!f) throw ParseError(line_no, 1, "unknown symbol '" + toks[0] + "'");
        std::vector<State> args;
        for (auto it = toks.begin() + 1; it != arrow; ++it) args.push_back(parse_state(*it, line_no));
        try {
            a->add_transition(*f, std::move(args), parse_state(*(arrow + 1), line_no));
        } catch (const ParseError&) {
            throw;
        } catch (const Error& e) {
            throw ParseError(line_no, 1, e.what());
        }
    }
    if (!a) throw ParseError(line_no, 1, "missing 'states' line");
    return std::move(*a);
}

std::vector<Term> enumerate_ground_terms(const Signature& sig, int max_depth) {
    std::vector<Term> all;
    std::size_t prev_end = 0; // terms [prev_begin, prev_end) have depth d-1
    std::size_t prev_begin = 0;
    for (int depth = 1; depth <= max_depth; ++depth) {
        const std::size_t pool = all.size();
        std::vector<Term> level;
        for (SymbolId f = 0; f < sig.size(); ++f) {
            const auto k = static_cast<std::size_t>(sig.arity(f));
            if (k == 0) {
                if (depth == 1) level.push_back(Term::apply(f));
                continue;
            }
            if (depth == 1 || pool == 0) continue;
            std::vector<std::size_t> idx(k, 0);
            while (true) {
                bool has_deepest = false;
                for (auto i : idx) has_deepest = has_deepest || (i >= prev_begin && i < prev_end);
                if (has_deepest) {
                    std::vector<Term> args;
                    args.reserve(k);
                    for (auto i : idx) args.push_back(all[i]);
                    level.push_back(Term::apply(f, std::move(args)));
                }
                // Odometer with the last argument varying fastest.
                std::size_t i = k;
                while (i > 0 && ++idx[i - 1] == pool) idx[--i] = 0;
                if (i == 0) break;
            }
        }
        prev_begin = all.size();
        all.insert(all.end(), level.begin(), level.end());
        prev_end = all.size();
    }
    return all;
}

} // namespace nonterm
