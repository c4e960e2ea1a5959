#include "nonterm/transform.hpp"

#include <set>

#include "nonterm/error.hpp"

namespace nonterm {

Trs add_fresh_constant(const Trs& trs) {
    if (trs.signature.has_constant()) return trs;
    Trs out = trs;
    out.signature.add(kFreshConstant, 0);
    return out;
}

namespace {

std::string fresh_variable(const std::string& base, int index, const std::set<std::string>& taken) {
    std::string name = base + std::to_string(index);
    while (taken.contains(name)) name += "_";
    return name;
}

} // namespace

Trs eliminate_collapsing(const Trs& trs) {
    Trs out;
    out.signature = trs.signature;
    out.origin = trs.origin;
    for (const auto& rule : trs.rules) {
        if (!rule.collapsing()) {
            out.rules.push_back(rule);
            continue;
        }
        auto lhs_vars = variables(rule.lhs);
        std::set<std::string> taken(lhs_vars.begin(), lhs_vars.end());
        const auto& x = rule.rhs.name();
        for (SymbolId f = 0; f < trs.signature.size(); ++f) {
            std::vector<Term> args;
            for (int i = 1; i <= trs.signature.arity(f); ++i)
                args.push_back(Term::variable(fresh_variable(x, i, taken)));
            Substitution sigma;
            sigma.emplace(x, Term::apply(f, std::move(args)));
            out.rules.push_back({substitute(rule.lhs, sigma), substitute(rule.rhs, sigma)});
        }
    }
    return out;
}

Uncurrier::Uncurrier(const Signature& original) : original_(original) {
    for (SymbolId f = 0; f < original.size(); ++f) {
        const auto& sym = original[f];
        std::vector<SymbolId> ids;
        if (sym.arity <= 2) {
            ids.push_back(uncurried_.add(sym.name, sym.arity));
            backward_.emplace_back(f, 0);
        } else {
            changes_ = true;
            for (int i = 1; i < sym.arity; ++i) {
                ids.push_back(uncurried_.add(std::string(1, kReservedPrefix) + sym.name + "_" + std::to_string(i), 2));
                backward_.emplace_back(f, i - 1);
            }
        }
        forward_.push_back(std::move(ids));
    }
}

Term Uncurrier::uncurry(const Term& t) const {
    if (t.is_variable()) return t;
    const auto& ids = forward_.at(static_cast<std::size_t>(t.symbol()));
    std::vector<Term> args;
    args.reserve(t.arity());
    for (const auto& a : t.args()) args.push_back(uncurry(a));
    if (t.arity() <= 2) return Term::apply(ids.front(), std::move(args));
    Term acc = Term::apply(ids[0], {args[0], args[1]});
    for (std::size_t i = 2; i < args.size(); ++i) acc = Term::apply(ids[i - 1], {acc, args[i]});
    return acc;
}

Term Uncurrier::curry(const Term& t) const {
    if (t.is_variable()) return t;
    auto [f, index] = backward_.at(static_cast<std::size_t>(t.symbol()));
    const int arity = original_.arity(f);
    if (arity <= 2) {
        std::vector<Term> args;
        for (const auto& a : t.args()) args.push_back(curry(a));
        return Term::apply(f, std::move(args));
    }
    if (index != arity - 2) throw Error("term is not in the image of uncurrying");
    // Walk down the left spine #f_{n-1}, ..., #f_1 collecting arguments right to left.
    std::vector<Term> args(static_cast<std::size_t>(arity), t);
    const Term* cur = &t;
    for (int i = arity - 2; i >= 0; --i) {
        if (cur->is_variable() || backward_.at(static_cast<std::size_t>(cur->symbol())) != std::pair{f, i})
            throw Error("term is not in the image of uncurrying");
        args[static_cast<std::size_t>(i) + 1] = curry(cur->arg(1));
        if (i == 0) args[0] = curry(cur->arg(0));
        else cur = &cur->arg(0);
    }
    return Term::apply(f, std::move(args));
}

Trs uncurry(const Trs& trs) {
    Uncurrier u(trs.signature);
    if (!u.changes_anything()) return trs;
    Trs out;
    out.signature = u.uncurried();
    out.origin = trs.origin;
    for (const auto& r : trs.rules) out.rules.push_back({u.uncurry(r.lhs), u.uncurry(r.rhs)});
    return out;
}

Preprocessed preprocess(const Trs& trs, bool allow_uncurry) {
    Preprocessed result{trs, {}};
    if (!result.trs.signature.has_constant()) {
        result.trs = add_fresh_constant(result.trs);
        result.trace.fresh_constant = true;
    }
    if (allow_uncurry && result.trs.signature.max_arity() > 2) {
        result.trs = uncurry(result.trs);
        result.trace.uncurried = true;
    }
    if (result.trs.has_collapsing_rule()) {
        result.trs = eliminate_collapsing(result.trs);
        result.trace.collapsing_eliminated = true;
    }
    return result;
}

Trs apply_preprocessing(const Trs& trs, const Preprocessing& trace) {
    Trs out = trs;
    if (trace.fresh_constant) out = add_fresh_constant(out);
    if (trace.uncurried) out = uncurry(out);
    if (trace.collapsing_eliminated) out = eliminate_collapsing(out);
    return out;
}

} // namespace nonterm
