#pragma once

#include <climits>
#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "nonterm/automaton.hpp"
#include "nonterm/certificate.hpp"
#include "nonterm/redex.hpp"
#include "nonterm/term.hpp"

namespace nonterm {

/// Semantic meaning of a propositional variable.
///
/// Data layouts (states are 0-based):
///   Final   [q]                      q is final
///   Trans   [f, q1..qk, q]           f(q1..qk) ~> q
///   Eval    [t, a1..am, q]           t with vars := a1..am evaluates to q
///   EvalAux [t, a1..am, q, p1..pj]   one disjunct of the Eval definition (p = states of non-variable args)
///   Leq     [q, q']                  q <= q'
///   Select  [q, rule]                rule is selected at q
///   Mono    [f, q1..qk, q, q']       q <= q' and f(q1..qk) ~> q'
///   MonoR   [rule, a1..am, q, q']    q <= q' and rhs with vars := a evaluates to q'
///   MonoF   [rule, s, a1..am, q]     q final and subterm s of the rhs evaluates to q
///   Prod    [tag, q, q']             (q,q') in the closed product set; tag 0 = normal forms, 1 = redexes
struct Atom {
    enum class Kind { Final, Trans, Eval, EvalAux, Leq, Select, Mono, MonoR, MonoF, Prod };
    Kind kind;
    std::vector<int> data;

    friend auto operator<=>(const Atom&, const Atom&) = default;
};

struct AtomHash {
    std::size_t operator()(const Atom& a) const;
};

/// Bijection between atoms and variables 1..size().
class VarMap {
public:
    int add(Atom atom);
    std::optional<int> find(const Atom& atom) const;
    int at(const Atom& atom) const;
    const Atom& atom(int var) const { return atoms_.at(static_cast<std::size_t>(var - 1)); }
    int size() const { return static_cast<int>(atoms_.size()); }

private:
    std::vector<Atom> atoms_;
    std::unordered_map<Atom, int, AtomHash> index_;
};

using Clause = std::vector<int>;

struct CnfProblem {
    VarMap var_map;
    std::vector<Clause> clauses;
    int num_states = 0;
    Signature signature;
    /// Clause counts per encoding section, in emission order.
    std::vector<std::pair<std::string, std::size_t>> sections;

    int num_vars() const { return var_map.size(); }
    std::size_t section_size(const std::string& name) const;
};

/// Builds the CNF for a fixed automaton size. Each method adds one group of constraints.
///
/// Literals of evaluation atoms for variable terms are constants; lit() encodes
/// them as kTrue/kFalse, and constant literals are folded while clauses are built.
class Encoder {
public:
    static constexpr int kTrue = INT_MAX;
    static constexpr int kFalse = INT_MIN;

    /// Allocates Final and Trans variables; no clauses.
    Encoder(int num_states, const Signature& sig);

    /// One clause per state q: some transition into q uses only states below q.
    void reachability();
    /// Some state is final.
    void nonempty();
    /// Adds the non-variable subterms of `terms` to the subterm index and defines their Eval atoms.
    void term_evaluation(std::span<const Term> terms);
    /// lhs evaluating to q implies rhs evaluating to q, for every assignment.
    void closure(const Trs& trs);
    /// lhs evaluating to q implies some listed reduct evaluating to q; one reduct list per rule.
    void weak_closure(const Trs& trs, const std::vector<std::vector<Term>>& reduct_sets);
    /// No accepted term is accepted by `nf`, via a transition-closed set of product states.
    void no_normal_forms(const TreeAutomaton& nf);
    /// Quasi-order, monotonicity, selected-rule model condition, and reducibility of accepted runs.
    void improved(const Trs& trs, const RedexAutomaton& redex);

    int final_var(State q) const;
    int trans_var(SymbolId f, std::span<const State> args, State q) const;
    /// Literal for Eval(t, alpha, q); `alpha` assigns the sorted variables of `t`.
    int eval_lit(const Term& t, std::span<const State> alpha, State q) const;
    int leq_var(State a, State b) const;
    int select_var(State q, std::size_t rule) const;

    const CnfProblem& problem() const { return problem_; }
    CnfProblem take() { return std::move(problem_); }

    /// Terms currently in the subterm index, in insertion order.
    const std::vector<Term>& indexed_terms() const { return terms_; }

private:
    struct TermInfo {
        std::vector<std::string> vars;
        // For every argument: positions of its variables within `vars`.
        std::vector<std::vector<int>> arg_var_pos;
        int base = 0; // first Eval variable
    };

    int index_term(const Term& t);
    void define_eval(int id);
    void begin_section(const std::string& name);
    void emit(std::initializer_list<int> lits);
    void emit(std::vector<int> lits);
    int fresh(Atom atom) { return problem_.var_map.add(std::move(atom)); }
    int assignments(std::size_t m) const;
    int eval_lit_indexed(int id, std::span<const State> alpha, State q) const;
    std::vector<State> restrict(std::span<const std::string> from, std::span<const State> alpha,
                                std::span<const std::string> to) const;

    int n_;
    CnfProblem problem_;
    std::vector<int> final_base_;
    std::vector<int> trans_base_;
    std::vector<Term> terms_;
    std::unordered_map<Term, int, TermHash> term_ids_;
    std::vector<TermInfo> info_;
};

/// Decodes a model (index 0 unused) into the automaton and, for the improved
/// method, the order and selection. Only Final/Trans/Leq/Select atoms are read.
struct DecodedModel {
    TreeAutomaton automaton;
    std::optional<QuasiOrder> order;
    std::optional<Selection> selection;
};

DecodedModel decode_model(const std::vector<bool>& model, const CnfProblem& problem, Method method,
                          std::size_t num_rules);

/// True iff every clause has a literal true under `model`.
bool satisfies(const std::vector<bool>& model, std::span<const Clause> clauses);

/// Enumerates all assignments of `m` variables over `n` states, first variable most significant.
template <typename Fn>
void for_each_assignment(std::size_t m, int n, Fn&& fn) {
    std::vector<State> alpha(m, 0);
    while (true) {
        fn(std::span<const State>(alpha));
        std::size_t i = m;
        while (i > 0 && ++alpha[i - 1] == n) alpha[--i] = 0;
        if (i == 0) return;
    }
}

} // namespace nonterm
