#pragma once

#include <map>
#include <string>
#include <vector>

#include "nonterm/term.hpp"

namespace nonterm {

/// Name of the constant added by add_fresh_constant.
inline constexpr const char* kFreshConstant = "#c0";

/// Adds a fresh constant when the signature has none; identity otherwise.
Trs add_fresh_constant(const Trs& trs);

/// Replaces every collapsing rule l -> x by { l[x := f(x1..xn)] -> f(x1..xn) | f in the signature }.
/// The ground rewrite relation is unchanged.
Trs eliminate_collapsing(const Trs& trs);

/// Bidirectional mapping between a signature and its uncurried form, where each
/// symbol f of arity n > 2 becomes binary symbols #f_1 .. #f_{n-1} and
/// f(t1,...,tn) becomes #f_{n-1}(...#f_2(#f_1(t1,t2),t3)...,tn).
class Uncurrier {
public:
    explicit Uncurrier(const Signature& original);

    const Signature& original() const { return original_; }
    const Signature& uncurried() const { return uncurried_; }
    /// True iff some symbol has arity above two.
    bool changes_anything() const { return changes_; }

    Term uncurry(const Term& t) const;
    /// Inverse of uncurry on its image; throws on terms outside the image.
    Term curry(const Term& t) const;

private:
    Signature original_;
    Signature uncurried_;
    // original id -> uncurried ids (one id for arity <= 2, n-1 ids otherwise)
    std::vector<std::vector<SymbolId>> forward_;
    // uncurried id -> (original id, index in the chain)
    std::vector<std::pair<SymbolId, int>> backward_;
    bool changes_ = false;
};

Trs uncurry(const Trs& trs);

/// Transformations applied before searching, in this order.
struct Preprocessing {
    bool fresh_constant = false;
    bool uncurried = false;
    bool collapsing_eliminated = false;

    friend bool operator==(const Preprocessing&, const Preprocessing&) = default;
};

struct Preprocessed {
    Trs trs;
    Preprocessing trace;
};

/// Fresh constant, then uncurrying (if enabled and some arity exceeds two),
/// then collapsing-rule elimination over the final signature.
Preprocessed preprocess(const Trs& trs, bool allow_uncurry);

/// Replays a recorded trace; used by the checker on the original input.
Trs apply_preprocessing(const Trs& trs, const Preprocessing& trace);

} // namespace nonterm
