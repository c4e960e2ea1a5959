#include <doctest.h>

#include <algorithm>
#include <set>

#include "nonterm/checker.hpp"
#include "nonterm/encoder.hpp"
#include "nonterm/error.hpp"
#include "nonterm/prover.hpp"
#include "nonterm/redex.hpp"
#include "nonterm/solver.hpp"
#include "nonterm/syntax.hpp"
#include "nonterm/transform.hpp"
#include "oracles.hpp"

using namespace nonterm;

namespace {

std::vector<Clause> section(const CnfProblem& p, const std::string& name) {
    std::vector<Clause> out;
    std::size_t at = 0;
    for (const auto& [s, count] : p.sections) {
        if (s == name)
            out.insert(out.end(), p.clauses.begin() + static_cast<std::ptrdiff_t>(at),
                       p.clauses.begin() + static_cast<std::ptrdiff_t>(at + count));
        at += count;
    }
    return out;
}

std::set<int> as_set(const Clause& c) { return {c.begin(), c.end()}; }

long ipow(long b, std::size_t e) {
    long r = 1;
    while (e-- > 0) r *= b;
    return r;
}

// Expected clause count for defining the evaluation atoms of one non-variable term.
long eval_cost(const Term& t, int n) {
    std::set<std::string> vars;
    std::function<void(const Term&)> collect = [&](const Term& s) {
        if (s.is_variable()) vars.insert(s.name());
        for (const auto& c : s.args()) collect(c);
    };
    collect(t);
    std::size_t nonvar = 0;
    for (const auto& c : t.args()) nonvar += c.is_variable() ? 0 : 1;
    const long per = (nonvar == 0 || n == 1) ? static_cast<long>(nonvar + 2) : ipow(n, nonvar) * static_cast<long>(nonvar + 2) + 1;
    return ipow(n, vars.size()) * n * per;
}

long expected_evaluation(const Trs& trs, int n) {
    std::set<Term> seen;
    long total = 0;
    std::function<void(const Term&)> walk = [&](const Term& s) {
        if (s.is_variable()) return;
        for (const auto& c : s.args()) walk(c);
        if (seen.insert(s).second) total += eval_cost(s, n);
    };
    for (const auto& r : trs.rules) {
        walk(r.lhs);
        walk(r.rhs);
    }
    return total;
}

Signature cf_signature() {
    Signature sig;
    sig.add("c", 0);
    sig.add("f", 1);
    return sig;
}

Trs ground_rule() {
    return parse_trs("(VAR)\nc -> d\n", InputFormat::Trs);
}

} // namespace

TEST_SUITE("sat-encoder") {

TEST_CASE("automaton variables") {
    Encoder two(2, cf_signature());
    CHECK(two.problem().num_vars() == 8);
    CHECK(two.problem().clauses.empty());

    Signature c;
    c.add("c", 0);
    CHECK(Encoder(1, c).problem().num_vars() == 2);

    Signature s;
    s.add("a", 2);
    s.add("S", 0);
    Encoder three(3, s);
    CHECK(three.problem().num_vars() == 33);
    std::set<int> seen;
    for (int v = 1; v <= 33; ++v) {
        const auto& atom = three.problem().var_map.atom(v);
        CHECK(three.problem().var_map.at(atom) == v);
        seen.insert(v);
    }
    CHECK(three.trans_var(0, std::vector<State>{2, 1}, 0) == three.problem().var_map.at({Atom::Kind::Trans, {0, 2, 1, 0}}));
}

TEST_CASE("reachability clauses") {
    {
        Encoder e(1, cf_signature());
        e.reachability();
        REQUIRE(e.problem().clauses.size() == 1);
        CHECK(e.problem().clauses[0] == Clause{e.trans_var(0, {}, 0)});
    }
    {
        Encoder e(2, cf_signature());
        e.reachability();
        REQUIRE(e.problem().clauses.size() == 2);
        CHECK(e.problem().clauses[0] == Clause{e.trans_var(0, {}, 0)});
        CHECK(as_set(e.problem().clauses[1]) ==
              std::set<int>{e.trans_var(0, {}, 1), e.trans_var(1, std::vector<State>{0}, 1)});
    }
    {
        Signature unary;
        unary.add("g", 1);
        Encoder e(2, unary);
        e.reachability();
        CHECK(e.problem().clauses[0].empty());
        CHECK_FALSE(solve(e.problem(), Backend::builtin()).is_sat());
    }
}

TEST_CASE("non-emptiness clause") {
    Encoder e(3, cf_signature());
    e.nonempty();
    REQUIRE(e.problem().clauses.size() == 1);
    CHECK(as_set(e.problem().clauses[0]) == std::set<int>{e.final_var(0), e.final_var(1), e.final_var(2)});
    e.nonempty();
    CHECK(e.problem().clauses[0] == e.problem().clauses[1]);

    Encoder one(1, cf_signature());
    one.nonempty();
    CHECK(one.problem().clauses[0] == Clause{one.final_var(0)});
}

TEST_CASE("evaluation of variables and constants") {
    auto sig = cf_signature();
    Encoder e(2, sig);
    const auto x = Term::variable("x");
    CHECK(e.eval_lit(x, std::vector<State>{1}, 1) == Encoder::kTrue);
    CHECK(e.eval_lit(x, std::vector<State>{1}, 0) == Encoder::kFalse);

    const auto c = Term::apply(0);
    e.term_evaluation(std::vector<Term>{c});
    const auto& clauses = e.problem().clauses;
    REQUIRE(clauses.size() == 4);
    for (State q = 0; q < 2; ++q) {
        const int v = e.eval_lit(c, {}, q);
        const int t = e.trans_var(0, {}, q);
        CHECK(std::count(clauses.begin(), clauses.end(), Clause{-v, t}) == 1);
        CHECK(std::count(clauses.begin(), clauses.end(), Clause{-t, v}) == 1);
    }
}

TEST_CASE("closure clause counts") {
    auto s = oracle::corpus("s_rule.trs");
    for (int n = 1; n <= 3; ++n) {
        Encoder e(n, s.signature);
        e.closure(s);
        CHECK(e.problem().section_size("closure") == static_cast<std::size_t>(n * n * n * n));
        CHECK(static_cast<long>(e.problem().section_size("evaluation")) == expected_evaluation(s, n));
    }
    Encoder e(3, s.signature);
    e.closure(s);
    for (const auto& cl : section(e.problem(), "closure")) CHECK(cl.size() == 2);

    auto g = ground_rule();
    Encoder eg(3, g.signature);
    eg.closure(g);
    CHECK(eg.problem().section_size("closure") == 3);

    Trs empty{g.signature, {}, g.origin};
    Encoder ee(2, g.signature);
    ee.closure(empty);
    CHECK(ee.problem().section_size("closure") == 0);

    auto nl = parse_trs("f(x,x) -> g(x)\n", InputFormat::Trs);
    Encoder en(2, nl.signature);
    CHECK_THROWS_AS(en.closure(nl), Error);
}

TEST_CASE("evaluation clause counts on further systems") {
    SUBCASE("string system") {
        auto trs = preprocess(oracle::corpus("lr_even.srs"), true).trs;
        for (int n = 1; n <= 4; ++n) {
            Encoder e(n, trs.signature);
            e.closure(trs);
            CHECK(static_cast<long>(e.problem().section_size("evaluation")) == expected_evaluation(trs, n));
            // one variable per rule
            CHECK(e.problem().section_size("closure") == trs.rules.size() * static_cast<std::size_t>(n * n));
        }
    }
    SUBCASE("delta") {
        auto trs = oracle::corpus("delta.trs");
        for (int n = 1; n <= 3; ++n) {
            Encoder e(n, trs.signature);
            e.closure(trs);
            CHECK(static_cast<long>(e.problem().section_size("evaluation")) == expected_evaluation(trs, n));
        }
    }
}

TEST_CASE("weak closure") {
    auto trs = preprocess(oracle::corpus("lr_even.srs"), true).trs;
    const int n = 3;
    {
        std::vector<std::vector<Term>> singletons;
        for (const auto& r : trs.rules) singletons.push_back({r.rhs});
        Encoder a(n, trs.signature), b(n, trs.signature);
        a.closure(trs);
        b.weak_closure(trs, singletons);
        auto ca = section(a.problem(), "closure"), cb = section(b.problem(), "weak-closure");
        CHECK(ca == cb);
    }

    auto sets = reduct_sets(trs, {});
    REQUIRE(sets.size() == trs.rules.size());
    Signature sig = trs.signature;
    const auto lab = word_term("Lab", sig, Term::variable("x"));
    const auto alb = word_term("aLb", sig, Term::variable("x"));
    for (std::size_t i = 3; i < 5; ++i) {
        CHECK(std::find(sets[i].begin(), sets[i].end(), lab) != sets[i].end());
        CHECK(std::find(sets[i].begin(), sets[i].end(), alb) != sets[i].end());
    }
    Encoder e(n, trs.signature);
    e.weak_closure(trs, sets);
    std::size_t expected = 0;
    for (const auto& r : trs.rules) expected += static_cast<std::size_t>(n * n);
    auto clauses = section(e.problem(), "weak-closure");
    CHECK(clauses.size() == expected);
    // rules are visited in order with n*n clauses each; rule 3 is Rb -> Lab
    const auto first_rb = clauses.begin() + 3 * n * n;
    CHECK(first_rb->size() == sets[3].size() + 1);
    CHECK(first_rb->size() >= 3);

    Encoder bad(n, trs.signature);
    std::vector<std::vector<Term>> with_empty = sets;
    with_empty[0].clear();
    CHECK_THROWS_AS(bad.weak_closure(trs, with_empty), Error);
}

TEST_CASE("no-normal-forms clauses") {
    Signature sig;
    sig.add("c", 0);
    TreeAutomaton nf(sig, 2);
    nf.add_transition(0, {}, 1);
    Encoder e(3, sig);
    e.no_normal_forms(nf);
    auto clauses = section(e.problem(), "no-normal-forms");
    CHECK(clauses.size() == 3);
    for (State q = 0; q < 3; ++q) {
        const int p = e.problem().var_map.at({Atom::Kind::Prod, {0, q, 1}});
        CHECK(std::count(clauses.begin(), clauses.end(), Clause{-e.trans_var(0, {}, q), p}) == 1);
    }

    nf.set_final(1);
    Encoder f(3, sig);
    f.no_normal_forms(nf);
    clauses = section(f.problem(), "no-normal-forms");
    CHECK(clauses.size() == 6);
    for (State q = 0; q < 3; ++q) {
        const int p = f.problem().var_map.at({Atom::Kind::Prod, {0, q, 1}});
        CHECK(std::count(clauses.begin(), clauses.end(), Clause{-p, -f.final_var(q)}) == 1);
    }

    Signature other;
    other.add("z", 0);
    CHECK_THROWS_AS(Encoder(2, other).no_normal_forms(nf), Error);
}

TEST_CASE("improved encoding") {
    auto g = ground_rule();
    const int n = 3;
    Encoder e(n, g.signature);
    e.improved(g, build_redex_automaton(g));
    const auto& p = e.problem();

    auto order = section(p, "order");
    CHECK(order.size() == static_cast<std::size_t>(n + n * n * n));
    for (State q = 0; q < n; ++q)
        CHECK(std::count(order.begin(), order.end(), Clause{e.leq_var(q, q)}) == 1);

    auto mono = section(p, "monotonicity");
    for (State q = 0; q < n; ++q)
        for (State r = 0; r < n; ++r)
            CHECK(std::count(mono.begin(), mono.end(), Clause{-e.final_var(q), -e.leq_var(q, r), e.final_var(r)}) == 1);

    auto model = section(p, "model");
    const auto c = Term::apply(*g.signature.find("c"));
    for (State q = 0; q < n; ++q) {
        bool found = false;
        for (const auto& cl : model) {
            if (cl.size() != static_cast<std::size_t>(2 + 2 * n)) continue;
            if (cl[0] == -e.eval_lit(c, {}, q) && cl[1] == -e.select_var(q, 0)) found = true;
        }
        CHECK(found);
    }
    CHECK(p.section_size("reducible") > 0);

    auto nl = parse_trs("f(x,x) -> g(x)\n", InputFormat::Trs);
    CHECK_THROWS_AS(Encoder(2, nl.signature).improved(nl, build_redex_automaton(oracle::corpus("s_rule.trs"))), Error);
}

TEST_CASE("encoding is deterministic") {
    auto trs = preprocess(oracle::corpus("zl.srs"), true).trs;
    for (auto method : {Method::Wn, Method::SnBasic, Method::SnImproved}) {
        auto a = to_dimacs(encode(trs, method, 3));
        auto b = to_dimacs(encode(trs, method, 3));
        CHECK(a == b);
    }
}

TEST_CASE("decoding") {
    Signature sig = cf_signature();
    Encoder e(2, sig);
    const auto& p = e.problem();
    std::vector<bool> model(static_cast<std::size_t>(p.num_vars()) + 1, false);
    model[static_cast<std::size_t>(e.final_var(1))] = true;
    auto d = decode_model(model, p, Method::Wn, 0);
    CHECK(d.automaton.finals().elements() == std::vector<State>{1});
    CHECK(d.automaton.transition_count() == 0);
    CHECK_FALSE(d.order.has_value());
    CHECK(reachable_states(d.automaton).empty());
    CHECK_THROWS_AS(decode_model(std::vector<bool>(2, false), p, Method::Wn, 0), Error);
}

TEST_CASE("models are faithful and decode to valid certificates") {
    struct Case {
        std::string file;
        Method method;
        int n;
    };
    for (const auto& c : {Case{"s_rule.trs", Method::Wn, 5}, Case{"lr_even.srs", Method::SnBasic, 5},
                          Case{"lr_aaa.srs", Method::Wn, 4}, Case{"delta.trs", Method::Wn, 3}}) {
        CAPTURE(c.file);
        auto trs = preprocess(oracle::corpus(c.file), true).trs;
        Encoder e(c.n, trs.signature);
        e.reachability();
        e.nonempty();
        std::vector<std::vector<Term>> sets;
        if (c.method == Method::Wn) {
            e.closure(trs);
        } else {
            sets = reduct_sets(trs, {});
            e.weak_closure(trs, sets);
        }
        e.no_normal_forms(normal_form_automaton(trs));
        auto res = solve(e.problem(), Backend::builtin());
        REQUIRE(res.is_sat());
        CHECK(satisfies(res.model, e.problem().clauses));
        auto a = decode_model(res.model, e.problem(), c.method, trs.rules.size()).automaton;
        for (const auto& t : e.indexed_terms()) {
            const auto vars = variables(t);
            for_each_assignment(vars.size(), c.n, [&](std::span<const State> alpha) {
                std::map<std::string, State> m;
                for (std::size_t i = 0; i < vars.size(); ++i) m[vars[i]] = alpha[i];
                for (State q = 0; q < c.n; ++q) {
                    const int v = e.eval_lit(t, alpha, q);
                    CHECK(res.model[static_cast<std::size_t>(v)] == oracle::runs_to(t, a, q, m));
                }
            });
        }
        auto verdict = c.method == Method::Wn ? check_wn(trs, a) : check_sn_basic(trs, a, sets);
        CHECK(verdict.accepted);
    }
}

TEST_CASE("improved models decode to valid certificates") {
    auto trs = preprocess(oracle::corpus("lr_even.srs"), true).trs;
    auto cnf = encode(trs, Method::SnImproved, 5);
    auto res = solve(cnf, Backend::builtin());
    REQUIRE(res.is_sat());
    auto d = decode_model(res.model, cnf, Method::SnImproved, trs.rules.size());
    REQUIRE(d.order.has_value());
    REQUIRE(d.selection.has_value());
    CHECK_FALSE(d.order->check().has_value());
    Certificate cert{Claim::NotSN, Method::SnImproved, {}, {}, d.automaton, d.order, d.selection};
    CHECK(check_sn_improved(trs, cert).accepted);
}

} // TEST_SUITE
