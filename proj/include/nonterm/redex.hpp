#pragma once

#include <span>
#include <vector>

#include "nonterm/automaton.hpp"
#include "nonterm/term.hpp"

namespace nonterm {

/// Deterministic complete automaton accepting the ground terms that contain an
/// instance of some pattern, with one final set per pattern.
///
/// A state records which non-variable pattern subterms match at the root of the
/// terms it accepts, plus whether some pattern instance occurs anywhere in them.
/// pattern_finals[i] are the states whose root match set contains pattern i, so
/// t ~>* q with q in pattern_finals[i] iff t is an instance of pattern i.
struct RedexAutomaton {
    TreeAutomaton automaton;
    std::vector<StateSet> pattern_finals;
};

/// Patterns must be linear and not variables.
RedexAutomaton build_redex_automaton(const Signature& sig, std::span<const Term> patterns);
/// One pattern per rule, in rule order.
RedexAutomaton build_redex_automaton(const Trs& trs);

/// Accepts exactly the ground normal forms.
TreeAutomaton normal_form_automaton(const Signature& sig, std::span<const Term> patterns);
TreeAutomaton normal_form_automaton(const Trs& trs);

} // namespace nonterm
