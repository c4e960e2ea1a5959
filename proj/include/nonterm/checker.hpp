#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "nonterm/automaton.hpp"
#include "nonterm/certificate.hpp"
#include "nonterm/kernels.hpp"
#include "nonterm/term.hpp"

namespace nonterm {

struct Failure {
    /// One of: reachability, non-emptiness, closure, weak-closure, no-normal-forms,
    /// order, monotonicity, selection, model, reducibility, claim, reducts.
    std::string condition;
    std::string witness;
};

struct Verdict {
    bool accepted = true;
    std::vector<Failure> failures;

    void fail(std::string condition, std::string witness);
};

/// All conditions are checked; every violated one contributes a failure.
/// The system must be left-linear, non-collapsing and over the automaton's signature.
Verdict check_wn(const Trs& trs, const TreeAutomaton& a, Exec exec = Exec::Parallel);
/// reduct_sets[i] lists terms t with lhs_i ->+ t.
Verdict check_sn_basic(const Trs& trs, const TreeAutomaton& a, const std::vector<std::vector<Term>>& reduct_sets,
                       Exec exec = Exec::Parallel);
/// Requires order and selection in `cert`.
Verdict check_sn_improved(const Trs& trs, const Certificate& cert, Exec exec = Exec::Parallel);

/// Reduct sets recomputed from the system with the given bounds.
std::vector<std::vector<Term>> reduct_sets(const Trs& trs, const ReductBounds& bounds);

/// Dispatches on the certificate's method; `trs` is the preprocessed system.
Verdict check(const Trs& trs, const Certificate& cert, Exec exec = Exec::Parallel);

/// Applies the certificate's preprocessing trace to `original`, parses and checks it.
Verdict check_certificate_text(const Trs& original, std::string_view text, Exec exec = Exec::Parallel);

std::string to_string(const Verdict& v);

} // namespace nonterm
