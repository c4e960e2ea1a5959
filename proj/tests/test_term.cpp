#include <doctest.h>

#include <functional>

#include "nonterm/error.hpp"
#include "nonterm/rewrite.hpp"
#include "nonterm/syntax.hpp"
#include "nonterm/transform.hpp"
#include "oracles.hpp"

using namespace nonterm;

namespace {

Term parse_term_in(Trs& trs, const std::string& text) {
    // Reuses the rule parser: "t -> t" over the system's symbols.
    auto tmp = parse_trs(text + " -> " + text, InputFormat::Trs);
    std::function<Term(const Term&)> remap = [&](const Term& t) -> Term {
        if (t.is_variable()) return t;
        std::vector<Term> args;
        for (const auto& a : t.args()) args.push_back(remap(a));
        return Term::apply(trs.signature.add(tmp.signature.name(t.symbol()), tmp.signature.arity(t.symbol())),
                           std::move(args));
    };
    return remap(tmp.rules[0].lhs);
}

std::string show(const Trs& trs, const std::set<Term>& ts) {
    std::string out;
    for (const auto& t : ts) out += to_string(t, trs.signature) + ";";
    return out;
}

} // namespace

TEST_SUITE("term-core") {

TEST_CASE("signature rejects arity conflicts") {
    Signature sig;
    CHECK(sig.add("f", 1) == 0);
    CHECK(sig.add("f", 1) == 0);
    CHECK_THROWS_AS(sig.add("f", 2), Error);
    CHECK_FALSE(sig.has_constant());
    sig.add("c", 0);
    CHECK(sig.has_constant());
    CHECK(sig.max_arity() == 1);
}

TEST_CASE("terms are structural values") {
    Signature sig;
    auto f = sig.add("f", 2);
    auto c = sig.add("c", 0);
    auto t1 = Term::apply(f, {Term::variable("x"), Term::apply(c)});
    auto t2 = Term::apply(f, {Term::variable("x"), Term::apply(c)});
    CHECK(t1 == t2);
    CHECK(t1.hash() == t2.hash());
    CHECK(t1.depth() == 2);
    CHECK(t1.size() == 3);
    CHECK_FALSE(t1.is_ground());
    CHECK(Term::apply(c).depth() == 1);
    CHECK(to_string(t1, sig) == "f(x,c)");
    CHECK(positions(t1).size() == 3);
    CHECK(subterm_at(t1, {1}) == Term::apply(c));
    CHECK(to_string(replace_at(t1, {0}, Term::apply(c)), sig) == "f(c,c)");
}

TEST_CASE("parse the S-rule") {
    auto trs = parse_trs("a(a(a(S,x),y),z) -> a(a(x,z),a(y,z))", InputFormat::Trs);
    REQUIRE(trs.signature.size() == 2);
    CHECK(trs.signature.name(0) == "a");
    CHECK(trs.signature.arity(0) == 2);
    CHECK(trs.signature.name(1) == "S");
    CHECK(trs.signature.arity(1) == 0);
    REQUIRE(trs.rules.size() == 1);
    CHECK(trs.left_linear());
    CHECK(to_string(trs.rules[0], trs.signature) == "a(a(a(S,x),y),z) -> a(a(x,z),a(y,z))");
}

TEST_CASE("parse errors") {
    CHECK_THROWS_WITH_AS(parse_trs("", InputFormat::Trs), doctest::Contains("empty system"), ParseError);
    CHECK_THROWS_WITH_AS(parse_trs("% only a comment\n", InputFormat::Trs), doctest::Contains("empty system"),
                         ParseError);
    CHECK_THROWS_WITH_AS(parse_trs("(VAR x)\nx -> f(x)", InputFormat::Trs),
                         doctest::Contains("trivially non-terminating: lhs is a variable"), ParseError);
    CHECK_THROWS_AS(parse_trs("(VAR x)\nf(x) -> f(x,x)", InputFormat::Trs), ParseError);
    CHECK_THROWS_AS(parse_trs("(VAR x y)\nf(x) -> y", InputFormat::Trs), ParseError);
    CHECK_THROWS_AS(parse_trs("f(x -> x", InputFormat::Trs), ParseError);
    CHECK_THROWS_AS(parse_trs("#f(x) -> x", InputFormat::Trs), ParseError);
    try {
        parse_trs("(VAR x)\nf(x) -> g(x)\ng(x) -> f(x", InputFormat::Trs);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
    }
}

TEST_CASE("non-linear lhs is detected") {
    auto trs = parse_trs("f(x,x) -> x", InputFormat::Trs);
    CHECK_FALSE(trs.left_linear());
    CHECK(trs.has_collapsing_rule());
}

TEST_CASE("variables without a declaration") {
    auto trs = parse_trs("f(x, c()) -> g(x)", InputFormat::Trs);
    CHECK(trs.rules[0].lhs.arg(0).is_variable());
    CHECK_FALSE(trs.rules[0].lhs.arg(1).is_variable());
    auto declared = parse_trs("(VAR)\nc -> d", InputFormat::Trs);
    CHECK(declared.rules[0].lhs.is_ground());
}

TEST_CASE("string systems become unary term systems") {
    auto trs = string_to_trs({{"aL", "La"}});
    REQUIRE(trs.signature.size() == 3);
    CHECK(trs.signature.name(0) == "a");
    CHECK(trs.signature.name(1) == "L");
    CHECK(trs.signature.name(2) == kWordEnd);
    CHECK(trs.signature.arity(2) == 0);
    CHECK(trs.origin == Origin::StringSystem);
    CHECK(to_string(trs.rules[0].lhs, trs.signature) == "a(L(x))");
    CHECK(to_string(trs.rules[0].rhs, trs.signature) == "L(a(x))");

    auto lr = string_to_trs({{"bL", "bR"}, {"Rb", "Lab"}});
    CHECK(to_string(lr.rules[0], lr.signature) == "b(L(x)) -> b(R(x))");
    CHECK(to_string(lr.rules[1], lr.signature) == "R(b(x)) -> L(a(b(x)))");

    CHECK_THROWS_AS(string_to_trs({{"", "a"}}), Error);
    auto erase = parse_trs("ab ->\n", InputFormat::Srs);
    CHECK(erase.rules[0].rhs.is_variable());
}

TEST_CASE("string system rendering") {
    auto trs = parse_trs("aL -> La\nRa -> aR\n", InputFormat::Srs);
    CHECK(to_string(trs) == "aL -> La\nRa -> aR\n");
    auto end = Term::apply(*trs.signature.find(kWordEnd));
    auto w = word_term("aaR", trs.signature, end);
    CHECK(to_word(w, trs.signature) == "aaR");
}

TEST_CASE("fresh constant") {
    auto trs = parse_trs("(VAR x)\nf(x) -> f(f(x))", InputFormat::Trs);
    auto once = add_fresh_constant(trs);
    REQUIRE(once.signature.size() == 2);
    CHECK(once.signature.name(1) == kFreshConstant);
    CHECK(once.signature.arity(1) == 0);
    auto twice = add_fresh_constant(once);
    CHECK(twice.signature == once.signature);

    auto s = parse_trs("a(a(a(S,x),y),z) -> a(a(x,z),a(y,z))", InputFormat::Trs);
    CHECK(add_fresh_constant(s).signature == s.signature);
}

TEST_CASE("collapsing rule elimination") {
    auto trs = parse_trs("(VAR x)\nf(x) -> x\nf(c) -> c", InputFormat::Trs);
    trs.rules.pop_back();
    auto out = eliminate_collapsing(trs);
    REQUIRE(out.rules.size() == 2);
    CHECK(to_string(out.rules[0], out.signature) == "f(f(x1)) -> f(x1)");
    CHECK(to_string(out.rules[1], out.signature) == "f(c) -> c");

    auto g = parse_trs("(VAR x y)\ng(x,y) -> y\ng(c,c) -> c", InputFormat::Trs);
    g.rules.pop_back();
    auto gout = eliminate_collapsing(g);
    REQUIRE(gout.rules.size() == 2);
    CHECK(to_string(gout.rules[0], gout.signature) == "g(x,g(y1,y2)) -> g(y1,y2)");
    CHECK(to_string(gout.rules[1], gout.signature) == "g(x,c) -> c");

    auto s = parse_trs("a(a(a(S,x),y),z) -> a(a(x,z),a(y,z))", InputFormat::Trs);
    CHECK(eliminate_collapsing(s).rules == s.rules);
}

TEST_CASE("uncurrying") {
    auto trs = parse_trs("f(A, B, C) -> g(A, B, C, D)\n", InputFormat::Trs);
    Uncurrier u(trs.signature);
    CHECK(u.changes_anything());
    auto lhs = u.uncurry(trs.rules[0].lhs);
    CHECK(to_string(lhs, u.uncurried()) == "#f_2(#f_1(A,B),C)");
    auto rhs = u.uncurry(trs.rules[0].rhs);
    CHECK(to_string(rhs, u.uncurried()) == "#g_3(#g_2(#g_1(A,B),C),D)");
    CHECK(u.curry(lhs) == trs.rules[0].lhs);
    CHECK(u.curry(rhs) == trs.rules[0].rhs);

    auto binary = parse_trs("a(a(a(S,x),y),z) -> a(a(x,z),a(y,z))", InputFormat::Trs);
    CHECK_FALSE(Uncurrier(binary.signature).changes_anything());
    CHECK(uncurry(binary).rules == binary.rules);
}

TEST_CASE("uncurry is a bijection on terms") {
    Signature sig;
    sig.add("h", 3);
    sig.add("g", 1);
    sig.add("c", 0);
    Uncurrier u(sig);
    for (const auto& t : oracle::ground_terms(sig, 3)) CHECK(u.curry(u.uncurry(t)) == t);
}

TEST_CASE("preprocessing order and replay") {
    auto trs = parse_trs("(VAR x y z)\nf(x, y, z) -> z", InputFormat::Trs);
    auto pre = preprocess(trs, true);
    CHECK(pre.trace.fresh_constant);
    CHECK(pre.trace.uncurried);
    CHECK(pre.trace.collapsing_eliminated);
    CHECK_FALSE(pre.trs.has_collapsing_rule());
    CHECK(pre.trs.signature.max_arity() == 2);
    auto replay = apply_preprocessing(trs, pre.trace);
    CHECK(replay.signature == pre.trs.signature);
    CHECK(replay.rules == pre.trs.rules);

    auto keep = preprocess(trs, false);
    CHECK_FALSE(keep.trace.uncurried);
    CHECK(keep.trs.signature.max_arity() == 3);
}

TEST_CASE("one-step reducts") {
    auto s = parse_trs("a(a(a(S,x),y),z) -> a(a(x,z),a(y,z))", InputFormat::Trs);
    auto t = parse_term_in(s, "a(a(a(S,S),S),S)");
    CHECK(show(s, one_step_reducts(t, s)) == "a(a(S,S),a(S,S));");
    CHECK(one_step_reducts(Term::apply(1), s).empty());
    CHECK(is_normal_form(Term::apply(1), s));
    CHECK_FALSE(is_normal_form(t, s));

    auto lr = oracle::corpus("lr.srs");
    auto end = Term::apply(*lr.signature.find(kWordEnd));
    auto blb = word_term("bLb", lr.signature, end);
    std::set<Term> expected{word_term("bRb", lr.signature, end)};
    CHECK(one_step_reducts(blb, lr) == expected);
    CHECK(is_normal_form(word_term("b", lr.signature, end), lr));
}

TEST_CASE("bounded reducts") {
    auto s = parse_trs("a(a(a(S,x),y),z) -> a(a(x,z),a(y,z))", InputFormat::Trs);
    auto r1 = reducts_up_to(s.rules[0].lhs, s, 1, 64);
    REQUIRE(r1.size() == 1);
    CHECK(r1[0] == s.rules[0].rhs);

    auto lr = oracle::corpus("lr_even.srs");
    const auto& rb = lr.rules[3].lhs;
    REQUIRE(to_string(rb, lr.signature) == "R(b(x))");
    auto u = reducts_up_to(rb, lr, 1, 64);
    REQUIRE(u.size() == 2);
    CHECK(to_string(u[0], lr.signature) == "L(a(b(x)))");
    CHECK(to_string(u[1], lr.signature) == "a(L(b(x)))");
    CHECK_THROWS_AS(reducts_up_to(rb, lr, 1, 1), Error);
    CHECK_THROWS_AS(reducts_up_to(rb, lr, 0, 64), Error);

    auto end = Term::apply(*lr.signature.find(kWordEnd));
    CHECK(reducts_up_to(word_term("b", lr.signature, end), lr, 3, 64).empty());

    auto x = Term::variable("x");
    auto raa = word_term("Raa", lr.signature, x);
    auto one = reducts_up_to(raa, lr, 1, 64);
    REQUIRE(one.size() == 1);
    CHECK(to_string(one[0], lr.signature) == "a(R(a(x)))");
    auto two = reducts_up_to(raa, lr, 2, 64);
    REQUIRE(two.size() == 2);
    CHECK(two[0] == one[0]);
    CHECK(to_string(two[1], lr.signature) == "a(a(R(x)))");
    CHECK(reducts_up_to(raa, lr, 2, 1) == one);
}

TEST_CASE("normal forms agree with the reducts oracle") {
    auto s = parse_trs("a(a(a(S,x),y),z) -> a(a(x,z),a(y,z))", InputFormat::Trs);
    auto fg = parse_trs("(VAR x)\nf(g(x)) -> g(f(x))\nf(c) -> c", InputFormat::Trs);
    for (const Trs* trs : {&s, &fg}) {
        for (const auto& t : oracle::ground_terms(trs->signature, 4)) {
            auto mine = one_step_reducts(t, *trs);
            CHECK(mine == oracle::reducts(t, *trs));
            CHECK(is_normal_form(t, *trs) == mine.empty());
        }
    }
}

TEST_CASE("collapsing elimination preserves ground rewriting") {
    auto trs = parse_trs("(VAR x y)\nf(x) -> x\ng(x,y) -> y\ng(f(x),c) -> f(c)", InputFormat::Trs);
    auto out = eliminate_collapsing(trs);
    CHECK_FALSE(out.has_collapsing_rule());
    for (const auto& t : oracle::ground_terms(trs.signature, 4))
        CHECK(one_step_reducts(t, trs) == one_step_reducts(t, out));
}

TEST_CASE("string rewriting is simulated on words") {
    const std::vector<std::pair<std::string, std::string>> rules{{"aL", "La"}, {"Ra", "aR"}, {"bL", "bR"}, {"Rb", "Lab"}};
    auto trs = string_to_trs(rules);
    auto end = Term::apply(*trs.signature.find(kWordEnd));
    const std::string letters = "aLRb";
    std::vector<std::string> words{""};
    for (std::size_t len = 1; len <= 8; ++len) {
        std::vector<std::string> next;
        for (const auto& w : words)
            if (w.size() == len - 1)
                for (char c : letters) next.push_back(w + c);
        words.insert(words.end(), next.begin(), next.end());
    }
    for (const auto& w : words) {
        std::set<std::string> from_terms;
        for (const auto& t : one_step_reducts(word_term(w, trs.signature, end), trs)) from_terms.insert(*to_word(t, trs.signature));
        CHECK(from_terms == oracle::word_reducts(w, rules));
    }
}

} // TEST_SUITE
