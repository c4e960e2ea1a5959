#include "nonterm/encoder.hpp"

#include <algorithm>

#include "nonterm/error.hpp"

namespace nonterm {

std::size_t AtomHash::operator()(const Atom& a) const {
    std::size_t h = static_cast<std::size_t>(a.kind) * 0x9e3779b97f4a7c15ULL;
    for (int v : a.data) h ^= static_cast<std::size_t>(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
}

int VarMap::add(Atom atom) {
    auto var = static_cast<int>(atoms_.size()) + 1;
    auto [it, inserted] = index_.emplace(atom, var);
    if (!inserted) throw Error("duplicate atom in variable map");
    atoms_.push_back(std::move(atom));
    return var;
}

std::optional<int> VarMap::find(const Atom& atom) const {
    if (auto it = index_.find(atom); it != index_.end()) return it->second;
    return std::nullopt;
}

int VarMap::at(const Atom& atom) const {
    if (auto v = find(atom)) return *v;
    throw Error("atom has no variable");
}

std::size_t CnfProblem::section_size(const std::string& name) const {
    std::size_t total = 0;
    for (const auto& [n, c] : sections)
        if (n == name) total += c;
    return total;
}

namespace {

int power(int base, std::size_t exp) {
    long long r = 1;
    for (std::size_t i = 0; i < exp; ++i) {
        r *= base;
        if (r > INT_MAX) throw Error("encoding too large");
    }
    return static_cast<int>(r);
}

int code_of(std::span<const State> tuple, int n) {
    int c = 0;
    for (auto s : tuple) c = c * n + s;
    return c;
}

std::vector<int> with(std::vector<int> base, std::span<const State> more) {
    base.insert(base.end(), more.begin(), more.end());
    return base;
}

} // namespace

Encoder::Encoder(int num_states, const Signature& sig) : n_(num_states) {
    if (num_states < 1) throw Error("automaton needs at least one state");
    problem_.num_states = num_states;
    problem_.signature = sig;
    begin_section("automaton");
    for (State q = 0; q < n_; ++q) {
        int v = fresh({Atom::Kind::Final, {q}});
        if (q == 0) final_base_.push_back(v);
    }
    for (SymbolId f = 0; f < sig.size(); ++f) {
        const auto k = static_cast<std::size_t>(sig.arity(f));
        trans_base_.push_back(problem_.num_vars() + 1);
        for_each_assignment(k + 1, n_, [&](std::span<const State> tuple) {
            fresh({Atom::Kind::Trans, with({f}, tuple)});
        });
    }
}

int Encoder::final_var(State q) const { return final_base_[0] + q; }

int Encoder::trans_var(SymbolId f, std::span<const State> args, State q) const {
    return trans_base_.at(static_cast<std::size_t>(f)) + code_of(args, n_) * n_ + q;
}

int Encoder::assignments(std::size_t m) const { return power(n_, m); }

void Encoder::begin_section(const std::string& name) {
    if (problem_.sections.empty() || problem_.sections.back().first != name) problem_.sections.emplace_back(name, 0);
}

void Encoder::emit(std::initializer_list<int> lits) { emit(std::vector<int>(lits)); }

void Encoder::emit(std::vector<int> lits) {
    Clause clause;
    clause.reserve(lits.size());
    for (int l : lits) {
        if (l == kTrue) return;
        if (l == kFalse) continue;
        if (std::find(clause.begin(), clause.end(), l) == clause.end()) clause.push_back(l);
    }
    problem_.clauses.push_back(std::move(clause));
    ++problem_.sections.back().second;
}

void Encoder::reachability() {
    begin_section("reachability");
    const auto& sig = problem_.signature;
    for (State q = 0; q < n_; ++q) {
        std::vector<int> clause;
        for (SymbolId f = 0; f < sig.size(); ++f) {
            auto k = static_cast<std::size_t>(sig.arity(f));
            if (k > 0 && q == 0) continue;
            // Arguments range over states strictly below q.
            std::vector<State> args(k, 0);
            while (true) {
                clause.push_back(trans_var(f, args, q));
                std::size_t i = k;
                while (i > 0 && ++args[i - 1] == q) args[--i] = 0;
                if (i == 0) break;
            }
        }
        emit(std::move(clause));
    }
}

void Encoder::nonempty() {
    begin_section("nonempty");
    std::vector<int> clause;
    for (State q = 0; q < n_; ++q) clause.push_back(final_var(q));
    emit(std::move(clause));
}

int Encoder::index_term(const Term& t) {
    if (auto it = term_ids_.find(t); it != term_ids_.end()) return it->second;
    TermInfo info;
    info.vars = variables(t);
    for (const auto& a : t.args()) {
        std::vector<int> pos;
        for (const auto& v : variables(a))
            pos.push_back(static_cast<int>(std::lower_bound(info.vars.begin(), info.vars.end(), v) - info.vars.begin()));
        info.arg_var_pos.push_back(std::move(pos));
    }
    auto id = static_cast<int>(terms_.size());
    info.base = problem_.num_vars() + 1;
    for_each_assignment(info.vars.size(), n_, [&](std::span<const State> alpha) {
        for (State q = 0; q < n_; ++q) {
            std::vector<int> data{id};
            data.insert(data.end(), alpha.begin(), alpha.end());
            data.push_back(q);
            fresh({Atom::Kind::Eval, std::move(data)});
        }
    });
    terms_.push_back(t);
    term_ids_.emplace(t, id);
    info_.push_back(std::move(info));
    return id;
}

int Encoder::eval_lit_indexed(int id, std::span<const State> alpha, State q) const {
    return info_[static_cast<std::size_t>(id)].base + code_of(alpha, n_) * n_ + q;
}

int Encoder::eval_lit(const Term& t, std::span<const State> alpha, State q) const {
    if (t.is_variable()) return alpha.size() == 1 && alpha[0] == q ? kTrue : kFalse;
    auto it = term_ids_.find(t);
    if (it == term_ids_.end()) throw Error("term is not in the subterm index");
    return eval_lit_indexed(it->second, alpha, q);
}

std::vector<State> Encoder::restrict(std::span<const std::string> from, std::span<const State> alpha,
                                     std::span<const std::string> to) const {
    std::vector<State> out;
    out.reserve(to.size());
    for (const auto& v : to) {
        auto it = std::lower_bound(from.begin(), from.end(), v);
        if (it == from.end() || *it != v) throw Error("variable " + v + " not in the source assignment");
        out.push_back(alpha[static_cast<std::size_t>(it - from.begin())]);
    }
    return out;
}

void Encoder::define_eval(int id) {
    const Term t = terms_[static_cast<std::size_t>(id)];
    const TermInfo& info = info_[static_cast<std::size_t>(id)];
    const auto k = t.arity();

    std::vector<int> child_ids(k, -1);
    std::vector<std::size_t> free_args;
    for (std::size_t i = 0; i < k; ++i)
        if (!t.arg(i).is_variable()) {
            child_ids[i] = term_ids_.at(t.arg(i));
            free_args.push_back(i);
        }

    for_each_assignment(info.vars.size(), n_, [&](std::span<const State> alpha) {
        std::vector<State> states(k, 0);
        std::vector<std::vector<State>> child_alpha(k);
        for (std::size_t i = 0; i < k; ++i) {
            for (auto p : info.arg_var_pos[i]) child_alpha[i].push_back(alpha[static_cast<std::size_t>(p)]);
            if (child_ids[i] < 0) states[i] = child_alpha[i][0];
        }
        for (State q = 0; q < n_; ++q) {
            const int v = eval_lit_indexed(id, alpha, q);
            const bool single = assignments(free_args.size()) == 1;
            std::vector<int> disjuncts{-v};
            for_each_assignment(free_args.size(), n_, [&](std::span<const State> picked) {
                std::vector<int> conj;
                for (std::size_t j = 0; j < free_args.size(); ++j) {
                    auto i = free_args[j];
                    states[i] = picked[j];
                    conj.push_back(eval_lit_indexed(child_ids[i], child_alpha[i], picked[j]));
                }
                conj.push_back(trans_var(t.symbol(), states, q));
                // conj -> v
                std::vector<int> back;
                for (int l : conj) back.push_back(-l);
                back.push_back(v);
                if (single) {
                    for (int l : conj) emit({-v, l});
                    emit(std::move(back));
                    return;
                }
                std::vector<int> data{id};
                data.insert(data.end(), alpha.begin(), alpha.end());
                data.push_back(q);
                data.insert(data.end(), picked.begin(), picked.end());
                int aux = fresh({Atom::Kind::EvalAux, std::move(data)});
                for (int l : conj) emit({-aux, l});
                emit(std::move(back));
                disjuncts.push_back(aux);
            });
            if (!single) emit(std::move(disjuncts));
        }
    });
}

void Encoder::term_evaluation(std::span<const Term> terms) {
    begin_section("evaluation");
    for (const auto& t : terms)
        for (const auto& s : subterms(t)) {
            if (s.is_variable() || term_ids_.contains(s)) continue;
            define_eval(index_term(s));
        }
}

namespace {

void require_left_linear(const Trs& trs) {
    if (!trs.left_linear()) throw Error("the encoding requires a left-linear system");
}

} // namespace

void Encoder::closure(const Trs& trs) {
    require_left_linear(trs);
    for (const auto& r : trs.rules) term_evaluation(std::vector<Term>{r.lhs, r.rhs});
    begin_section("closure");
    for (const auto& rule : trs.rules) {
        const auto lvars = variables(rule.lhs);
        const auto rvars = variables(rule.rhs);
        for_each_assignment(lvars.size(), n_, [&](std::span<const State> alpha) {
            auto ralpha = restrict(lvars, alpha, rvars);
            for (State q = 0; q < n_; ++q) emit({-eval_lit(rule.lhs, alpha, q), eval_lit(rule.rhs, ralpha, q)});
        });
    }
}

void Encoder::weak_closure(const Trs& trs, const std::vector<std::vector<Term>>& reduct_sets) {
    require_left_linear(trs);
    if (reduct_sets.size() != trs.rules.size()) throw Error("one reduct set per rule expected");
    for (std::size_t i = 0; i < trs.rules.size(); ++i) {
        if (reduct_sets[i].empty()) throw Error("empty reduct set for rule " + std::to_string(i));
        term_evaluation(std::vector<Term>{trs.rules[i].lhs});
        term_evaluation(reduct_sets[i]);
    }
    begin_section("weak-closure");
    for (std::size_t i = 0; i < trs.rules.size(); ++i) {
        const auto& lhs = trs.rules[i].lhs;
        const auto lvars = variables(lhs);
        std::vector<std::vector<std::string>> reduct_vars;
        for (const auto& t : reduct_sets[i]) reduct_vars.push_back(variables(t));
        for_each_assignment(lvars.size(), n_, [&](std::span<const State> alpha) {
            std::vector<std::vector<State>> restricted;
            for (const auto& rv : reduct_vars) restricted.push_back(restrict(lvars, alpha, rv));
            for (State q = 0; q < n_; ++q) {
                std::vector<int> clause{-eval_lit(lhs, alpha, q)};
                for (std::size_t j = 0; j < reduct_sets[i].size(); ++j)
                    clause.push_back(eval_lit(reduct_sets[i][j], restricted[j], q));
                emit(std::move(clause));
            }
        });
    }
}

void Encoder::no_normal_forms(const TreeAutomaton& nf) {
    const auto& sig = problem_.signature;
    if (!(nf.signature() == sig)) throw Error("normal-form automaton over a different signature");
    const int m = nf.num_states();
    begin_section("no-normal-forms");
    const int base = problem_.num_vars() + 1;
    for (State q = 0; q < n_; ++q)
        for (State p = 0; p < m; ++p) fresh({Atom::Kind::Prod, {0, q, p}});
    auto prod = [&](State q, State p) { return base + q * m + p; };

    for (SymbolId f = 0; f < sig.size(); ++f) {
        const auto k = static_cast<std::size_t>(sig.arity(f));
        for (const auto& tr : nf.transitions(f))
            for_each_assignment(k + 1, n_, [&](std::span<const State> tuple) {
                auto args = tuple.first(k);
                State q = tuple[k];
                std::vector<int> clause{-trans_var(f, args, q)};
                for (std::size_t i = 0; i < k; ++i) clause.push_back(-prod(args[i], tr.args[i]));
                clause.push_back(prod(q, tr.target));
                emit(std::move(clause));
            });
    }
    for (State q = 0; q < n_; ++q)
        for (auto p : nf.finals().elements()) emit({-prod(q, p), -final_var(q)});
}

int Encoder::leq_var(State a, State b) const {
    return problem_.var_map.at({Atom::Kind::Leq, {a, b}});
}

int Encoder::select_var(State q, std::size_t rule) const {
    return problem_.var_map.at({Atom::Kind::Select, {q, static_cast<int>(rule)}});
}

void Encoder::improved(const Trs& trs, const RedexAutomaton& redex) {
    require_left_linear(trs);
    const auto& sig = problem_.signature;
    if (!(redex.automaton.signature() == sig)) throw Error("redex automaton over a different signature");
    if (redex.pattern_finals.size() != trs.rules.size()) throw Error("redex automaton needs one pattern per rule");
    for (const auto& r : trs.rules) term_evaluation(std::vector<Term>{r.lhs, r.rhs});

    // (a) quasi-order and monotonicity
    begin_section("order");
    for (State a = 0; a < n_; ++a)
        for (State b = 0; b < n_; ++b) fresh({Atom::Kind::Leq, {a, b}});
    for (State q = 0; q < n_; ++q) emit({leq_var(q, q)});
    for (State a = 0; a < n_; ++a)
        for (State b = 0; b < n_; ++b)
            for (State c = 0; c < n_; ++c) emit({-leq_var(a, b), -leq_var(b, c), leq_var(a, c)});

    for (State q = 0; q < n_; ++q)
        for (std::size_t r = 0; r < trs.rules.size(); ++r) fresh({Atom::Kind::Select, {q, static_cast<int>(r)}});

    begin_section("monotonicity");
    std::vector<int> mono_base;
    for (SymbolId f = 0; f < sig.size(); ++f) {
        const auto k = static_cast<std::size_t>(sig.arity(f));
        mono_base.push_back(problem_.num_vars() + 1);
        for_each_assignment(k + 2, n_, [&](std::span<const State> tuple) {
            int m = fresh({Atom::Kind::Mono, with({f}, tuple)});
            emit({-m, leq_var(tuple[k], tuple[k + 1])});
            emit({-m, trans_var(f, tuple.first(k), tuple[k + 1])});
        });
    }
    for (State q = 0; q < n_; ++q)
        for (State p = 0; p < n_; ++p) emit({-final_var(q), -leq_var(q, p), final_var(p)});
    for (SymbolId f = 0; f < sig.size(); ++f) {
        const auto k = static_cast<std::size_t>(sig.arity(f));
        for_each_assignment(k + 1, n_, [&](std::span<const State> tuple) {
            std::vector<State> args(tuple.begin(), tuple.begin() + static_cast<std::ptrdiff_t>(k));
            const State q = tuple[k];
            for (std::size_t i = 0; i < k; ++i)
                for (State moved = 0; moved < n_; ++moved) {
                    std::vector<int> clause{-trans_var(f, args, q), -leq_var(args[i], moved)};
                    auto shifted = args;
                    shifted[i] = moved;
                    const int base = mono_base[static_cast<std::size_t>(f)] + (code_of(shifted, n_) * n_ + q) * n_;
                    for (State q2 = 0; q2 < n_; ++q2) clause.push_back(base + q2);
                    emit(std::move(clause));
                }
        });
    }

    // (b) the selected-rule model condition
    begin_section("model");
    for (std::size_t ri = 0; ri < trs.rules.size(); ++ri) {
        const auto& rule = trs.rules[ri];
        const auto lvars = variables(rule.lhs);
        const auto rvars = variables(rule.rhs);
        const auto rsubs = subterms(rule.rhs);
        std::vector<std::vector<std::string>> sub_vars;
        for (const auto& s : rsubs) sub_vars.push_back(variables(s));

        for_each_assignment(lvars.size(), n_, [&](std::span<const State> alpha) {
            const auto ralpha = restrict(lvars, alpha, rvars);
            for (State q = 0; q < n_; ++q) {
                std::vector<int> clause{-eval_lit(rule.lhs, alpha, q), -select_var(q, ri)};
                for (State q2 = 0; q2 < n_; ++q2) {
                    std::vector<int> data{static_cast<int>(ri)};
                    data.insert(data.end(), alpha.begin(), alpha.end());
                    data.push_back(q);
                    data.push_back(q2);
                    int m = fresh({Atom::Kind::MonoR, std::move(data)});
                    emit({-m, leq_var(q, q2)});
                    emit({-m, eval_lit(rule.rhs, ralpha, q2)});
                    clause.push_back(m);
                }
                for (std::size_t si = 0; si < rsubs.size(); ++si) {
                    const auto salpha = restrict(lvars, alpha, sub_vars[si]);
                    for (State q2 = 0; q2 < n_; ++q2) {
                        const int ev = eval_lit(rsubs[si], salpha, q2);
                        if (ev == kFalse) continue;
                        std::vector<int> data{static_cast<int>(ri), static_cast<int>(si)};
                        data.insert(data.end(), salpha.begin(), salpha.end());
                        data.push_back(q2);
                        Atom atom{Atom::Kind::MonoF, std::move(data)};
                        int m = 0;
                        if (auto existing = problem_.var_map.find(atom)) {
                            m = *existing;
                        } else {
                            m = fresh(std::move(atom));
                            emit({-m, final_var(q2)});
                            emit({-m, ev});
                        }
                        clause.push_back(m);
                    }
                }
                emit(std::move(clause));
            }
        });
    }

    // (c) every accepting run passes through a selected redex
    begin_section("reducible");
    const auto& b = redex.automaton;
    const int m = b.num_states();
    const int base = problem_.num_vars() + 1;
    for (State q = 0; q < n_; ++q)
        for (State p = 0; p < m; ++p) fresh({Atom::Kind::Prod, {1, q, p}});
    auto prod = [&](State q, State p) { return base + q * m + p; };
    for (SymbolId f = 0; f < sig.size(); ++f) {
        const auto k = static_cast<std::size_t>(sig.arity(f));
        for (const auto& tr : b.transitions(f)) {
            std::vector<std::size_t> matching;
            for (std::size_t ri = 0; ri < trs.rules.size(); ++ri)
                if (redex.pattern_finals[ri].contains(tr.target)) matching.push_back(ri);
            for_each_assignment(k + 1, n_, [&](std::span<const State> tuple) {
                auto args = tuple.first(k);
                State q = tuple[k];
                std::vector<int> clause{-trans_var(f, args, q)};
                for (std::size_t i = 0; i < k; ++i) clause.push_back(-prod(args[i], tr.args[i]));
                for (auto ri : matching) clause.push_back(select_var(q, ri));
                clause.push_back(prod(q, tr.target));
                emit(std::move(clause));
            });
        }
    }
    for (State q = 0; q < n_; ++q)
        for (State p = 0; p < m; ++p) emit({-prod(q, p), -final_var(q)});
}

DecodedModel decode_model(const std::vector<bool>& model, const CnfProblem& problem, Method method,
                          std::size_t num_rules) {
    if (model.size() < static_cast<std::size_t>(problem.num_vars()) + 1)
        throw Error("model does not cover all variables");
    const int n = problem.num_states;
    DecodedModel out{TreeAutomaton(problem.signature, n), std::nullopt, std::nullopt};
    if (method == Method::SnImproved) {
        out.order = QuasiOrder(n);
        out.selection = Selection(static_cast<std::size_t>(n));
    }
    std::vector<std::vector<Transition>> trans(static_cast<std::size_t>(problem.signature.size()));
    for (int v = 1; v <= problem.num_vars(); ++v) {
        if (!model[static_cast<std::size_t>(v)]) continue;
        const auto& atom = problem.var_map.atom(v);
        const auto& d = atom.data;
        switch (atom.kind) {
        case Atom::Kind::Final: out.automaton.set_final(d[0]); break;
        case Atom::Kind::Trans: {
            const auto f = d[0];
            if (static_cast<int>(d.size()) != problem.signature.arity(f) + 2)
                throw Error("transition atom inconsistent with the signature");
            trans[static_cast<std::size_t>(f)].push_back({f, std::vector<State>(d.begin() + 1, d.end() - 1), d.back()});
            break;
        }
        case Atom::Kind::Leq:
            if (out.order) out.order->set(d[0], d[1]);
            break;
        case Atom::Kind::Select:
            if (out.selection) {
                if (static_cast<std::size_t>(d[1]) >= num_rules) throw Error("selection atom for an unknown rule");
                (*out.selection)[static_cast<std::size_t>(d[0])].insert(static_cast<std::size_t>(d[1]));
            }
            break;
        default: break;
        }
    }
    for (SymbolId f = 0; f < problem.signature.size(); ++f)
        out.automaton.add_transitions(f, std::move(trans[static_cast<std::size_t>(f)]));
    return out;
}

bool satisfies(const std::vector<bool>& model, std::span<const Clause> clauses) {
    for (const auto& c : clauses) {
        bool sat = false;
        for (int l : c) {
            auto v = static_cast<std::size_t>(l > 0 ? l : -l);
            if (v < model.size() && model[v] == (l > 0)) {
                sat = true;
                break;
            }
        }
        if (!sat) return false;
    }
    return true;
}

} // namespace nonterm
