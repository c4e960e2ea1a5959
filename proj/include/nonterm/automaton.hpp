#pragma once

#include <compare>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nonterm/state_set.hpp"
#include "nonterm/term.hpp"

namespace nonterm {

struct Transition {
    SymbolId symbol = 0;
    std::vector<State> args;
    State target = 0;

    friend auto operator<=>(const Transition&, const Transition&) = default;
};

/// Bottom-up nondeterministic finite tree automaton over states 0..n-1.
///
/// Transitions are kept sorted per symbol by (args, target) and free of duplicates.
class TreeAutomaton {
public:
    TreeAutomaton(Signature signature, int num_states);

    int num_states() const { return num_states_; }
    const Signature& signature() const { return signature_; }
    const StateSet& finals() const { return finals_; }
    bool is_final(State q) const { return finals_.contains(q); }

    void set_final(State q, bool final = true);
    void set_finals(const StateSet& finals);
    void add_transition(SymbolId f, std::vector<State> args, State target);
    /// Bulk insertion; entries must all carry symbol `f`.
    void add_transitions(SymbolId f, std::vector<Transition> transitions);
    void remove_transition(SymbolId f, const std::vector<State>& args, State target);

    bool has_transition(SymbolId f, std::span<const State> args, State target) const;
    /// Transitions of `f` whose argument tuple equals `args`.
    std::span<const Transition> transitions_from(SymbolId f, std::span<const State> args) const;
    const std::vector<Transition>& transitions(SymbolId f) const {
        return by_symbol_.at(static_cast<std::size_t>(f));
    }
    std::size_t transition_count() const;

private:
    void check_state(State q) const;

    Signature signature_;
    int num_states_;
    StateSet finals_;
    std::vector<std::vector<Transition>> by_symbol_;
};

/// States assigned to variables when evaluating open terms.
using StateAssignment = std::map<std::string, State>;

/// { q | t ~>* q }, bottom-up over state sets. Variables evaluate to their assigned state.
StateSet states_of(const Term& t, const TreeAutomaton& a, const StateAssignment& alpha = {});
bool accepts(const Term& t, const TreeAutomaton& a);

/// Least fixpoint of reachability, remembering which transition first produced each state.
struct Reachability {
    StateSet reached;
    std::vector<std::optional<Transition>> via;

    /// A ground term evaluating to `q`, rebuilt from the derivation. `q` must be reached.
    Term witness(State q) const;
};

/// Reachable states; when `allowed` is given, states it rejects are never entered.
Reachability reachability(const TreeAutomaton& a, const std::function<bool(State)>& allowed = {});
StateSet reachable_states(const TreeAutomaton& a);

/// State (q, p) of a product is numbered q * b.num_states() + p.
inline State product_state(State q, State p, int b_states) { return q * b_states + p; }

TreeAutomaton product(const TreeAutomaton& a, const TreeAutomaton& b);
TreeAutomaton complement_finals(const TreeAutomaton& b);
bool intersection_empty(const TreeAutomaton& a, const TreeAutomaton& b);
bool is_deterministic(const TreeAutomaton& a);
bool is_complete(const TreeAutomaton& a);

/// Reflexive-transitive relation on states; stored as a dense matrix.
class QuasiOrder {
public:
    explicit QuasiOrder(int n) : n_(n), rel_(static_cast<std::size_t>(n * n), 0) {}

    static QuasiOrder identity(int n);

    int size() const { return n_; }
    bool leq(State a, State b) const { return rel_[index(a, b)] != 0; }
    void set(State a, State b, bool value = true) { rel_[index(a, b)] = value ? 1 : 0; }

    /// Description of the first reflexivity or transitivity violation, if any.
    std::optional<std::string> check() const;

    friend bool operator==(const QuasiOrder&, const QuasiOrder&) = default;

private:
    std::size_t index(State a, State b) const { return static_cast<std::size_t>(a * n_ + b); }

    int n_;
    std::vector<char> rel_;
};

/// Monotonicity of `a` with respect to `order`: transitions are compatible
/// argument-wise and finals are upward closed. Returns the first violation.
std::optional<std::string> check_monotonic(const TreeAutomaton& a, const QuasiOrder& order);

/// Text form: `states n`, `final q...`, then `f q1 ... qk -> q` per transition.
std::string to_text(const TreeAutomaton& a);
/// Parses the text form; lines without `->` other than `states`/`final` are rejected.
TreeAutomaton parse_automaton(std::string_view text, const Signature& sig);

/// All ground terms of depth <= max_depth, ordered by depth, then by symbol index and arguments.
std::vector<Term> enumerate_ground_terms(const Signature& sig, int max_depth);

} // namespace nonterm
