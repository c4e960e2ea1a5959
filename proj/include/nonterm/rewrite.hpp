#pragma once

#include <cstddef>
#include <set>
#include <vector>

#include "nonterm/term.hpp"

namespace nonterm {

/// One-step reducts in post-order position order, then rule order; duplicates removed.
std::vector<Term> one_step_reducts_ordered(const Term& t, const Trs& trs);

std::set<Term> one_step_reducts(const Term& t, const Trs& trs);

/// Terms reachable from `t` in 1..steps steps, breadth first, at most `cap` of them.
/// Throws if `cap` is smaller than the number of one-step reducts.
std::vector<Term> reducts_up_to(const Term& t, const Trs& trs, int steps, std::size_t cap);

bool is_normal_form(const Term& t, const Trs& trs);

/// True iff some subterm of `t` is an instance of some lhs.
inline bool is_reducible(const Term& t, const Trs& trs) { return !is_normal_form(t, trs); }

} // namespace nonterm
