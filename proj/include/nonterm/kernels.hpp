#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "nonterm/automaton.hpp"
#include "nonterm/certificate.hpp"
#include "nonterm/term.hpp"

namespace nonterm {

/// Serial loops are the reference; Parallel must give identical results.
enum class Exec { Serial, Parallel };

/// A rule, an assignment of its lhs variables (sorted by name) and a state the lhs reaches.
struct RuleViolation {
    std::size_t rule = 0;
    std::vector<State> alpha;
    State q = 0;
};

/// First (rule, alpha, q) in enumeration order where lhs reaches q but no term of
/// targets[rule] does. Closure uses targets = {rhs}, weak closure the reduct sets.
std::optional<RuleViolation> find_closure_violation(const Trs& trs, const TreeAutomaton& a,
                                                    const std::vector<std::vector<Term>>& targets, Exec exec);

/// First (rule, alpha, q) with the rule selected at q, lhs reaching q, no q' >= q
/// reached by the rhs, and no subterm of the rhs reaching a final state.
std::optional<RuleViolation> find_model_violation(const Trs& trs, const TreeAutomaton& a, const QuasiOrder& order,
                                                  const Selection& selection, Exec exec);

/// accepts(t, a) for each term.
std::vector<char> accepts_all(std::span<const Term> terms, const TreeAutomaton& a, Exec exec);

} // namespace nonterm
