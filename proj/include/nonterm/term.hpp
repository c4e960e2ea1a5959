#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace nonterm {

using SymbolId = int;

/// Names with this prefix are generated by the library and rejected in input.
inline constexpr char kReservedPrefix = '#';

struct Symbol {
    std::string name;
    int arity = 0;
};

/// Ranked alphabet. Symbol ids are dense and assigned in insertion order.
class Signature {
public:
    /// Adds `name/arity`, or returns the existing id. Throws if the name exists with another arity.
    SymbolId add(const std::string& name, int arity);

    std::optional<SymbolId> find(std::string_view name) const;
    const Symbol& operator[](SymbolId id) const { return symbols_.at(static_cast<std::size_t>(id)); }
    const std::string& name(SymbolId id) const { return (*this)[id].name; }
    int arity(SymbolId id) const { return (*this)[id].arity; }
    int size() const { return static_cast<int>(symbols_.size()); }
    const std::vector<Symbol>& symbols() const { return symbols_; }

    bool has_constant() const;
    int max_arity() const;

    friend bool operator==(const Signature& a, const Signature& b);

private:
    std::vector<Symbol> symbols_;
    std::unordered_map<std::string, SymbolId> index_;
};

/// Immutable first-order term with shared subterms. A variable has symbol() < 0.
///
/// Depth counts nodes on the longest root-to-leaf path, so constants and
/// variables have depth 1.
class Term {
public:
    static Term variable(std::string name);
    static Term apply(SymbolId f, std::vector<Term> args = {});

    bool is_variable() const { return node_->symbol < 0; }
    SymbolId symbol() const { return node_->symbol; }
    const std::string& name() const { return node_->var; }
    std::span<const Term> args() const { return node_->args; }
    const Term& arg(std::size_t i) const { return node_->args[i]; }
    std::size_t arity() const { return node_->args.size(); }
    std::size_t depth() const { return node_->depth; }
    std::size_t size() const { return node_->size; }
    std::size_t hash() const { return node_->hash; }
    bool is_ground() const { return node_->ground; }

    friend bool operator==(const Term& a, const Term& b);
    friend std::strong_ordering operator<=>(const Term& a, const Term& b);

private:
    struct Node {
        SymbolId symbol = -1;
        std::string var;
        std::vector<Term> args;
        std::size_t depth = 1;
        std::size_t size = 1;
        std::size_t hash = 0;
        bool ground = false;
    };

    explicit Term(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

    std::shared_ptr<const Node> node_;
};

struct TermHash {
    std::size_t operator()(const Term& t) const { return t.hash(); }
};

/// Path from the root; child indices are 0-based.
using Position = std::vector<int>;
using Substitution = std::map<std::string, Term>;

/// Variables of `t`, sorted by name, without duplicates.
std::vector<std::string> variables(const Term& t);
bool is_linear(const Term& t);
bool contains_symbol(const Term& t, SymbolId f);

/// All positions in post-order (children left to right, then the node itself).
std::vector<Position> positions(const Term& t);
const Term& subterm_at(const Term& t, const Position& p);
Term replace_at(const Term& t, const Position& p, const Term& replacement);

/// Distinct subterms (including variables), children before parents.
std::vector<Term> subterms(const Term& t);

Term substitute(const Term& t, const Substitution& sigma);

/// Syntactic matching of `pattern` against `t`; variables of `t` are treated as constants.
std::optional<Substitution> match(const Term& pattern, const Term& t);

std::string to_string(const Term& t, const Signature& sig);

struct Rule {
    Term lhs;
    Term rhs;

    bool left_linear() const { return is_linear(lhs); }
    bool collapsing() const { return rhs.is_variable(); }

    friend bool operator==(const Rule&, const Rule&) = default;
};

enum class Origin { TermSystem, StringSystem };

struct Trs {
    Signature signature;
    std::vector<Rule> rules;
    Origin origin = Origin::TermSystem;

    bool left_linear() const;
    bool has_collapsing_rule() const;
};

std::string to_string(const Rule& r, const Signature& sig);
std::string to_string(const Trs& trs);

/// Symbol id of the end marker added by string_to_trs.
inline constexpr const char* kWordEnd = "#end";

/// Renders a unary-encoded string term as its word; returns nullopt if `t` is not such a term.
std::optional<std::string> to_word(const Term& t, const Signature& sig);

/// Builds the term a1(a2(...ak(tail)...)) for `word`, adding letters to `sig`.
Term word_term(std::string_view word, Signature& sig, const Term& tail);

} // namespace nonterm
