#include "nonterm/term.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <unordered_set>

#include "nonterm/error.hpp"

namespace nonterm {

SymbolId Signature::add(const std::string& name, int arity) {
    if (arity < 0) throw Error("negative arity for symbol " + name);
    if (auto it = index_.find(name); it != index_.end()) {
        if (symbols_[static_cast<std::size_t>(it->second)].arity != arity)
            throw Error("symbol " + name + " used with arities " +
                        std::to_string(symbols_[static_cast<std::size_t>(it->second)].arity) + " and " +
                        std::to_string(arity));
        return it->second;
    }
    auto id = static_cast<SymbolId>(symbols_.size());
    symbols_.push_back({name, arity});
    index_.emplace(name, id);
    return id;
}

std::optional<SymbolId> Signature::find(std::string_view name) const {
    if (auto it = index_.find(std::string(name)); it != index_.end()) return it->second;
    return std::nullopt;
}

bool Signature::has_constant() const {
    return std::any_of(symbols_.begin(), symbols_.end(), [](const Symbol& s) { return s.arity == 0; });
}

int Signature::max_arity() const {
    int m = 0;
    for (const auto& s : symbols_) m = std::max(m, s.arity);
    return m;
}

bool operator==(const Signature& a, const Signature& b) {
    if (a.symbols_.size() != b.symbols_.size()) return false;
    for (std::size_t i = 0; i < a.symbols_.size(); ++i)
        if (a.symbols_[i].name != b.symbols_[i].name || a.symbols_[i].arity != b.symbols_[i].arity) return false;
    return true;
}

namespace {

std::size_t mix(std::size_t seed, std::size_t v) {
    return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

} // namespace

Term Term::variable(std::string name) {
    auto node = std::make_shared<Node>();
    node->symbol = -1;
    node->hash = mix(0x51ed27, std::hash<std::string>{}(name));
    node->var = std::move(name);
    node->ground = false;
    return Term(std::move(node));
}

Term Term::apply(SymbolId f, std::vector<Term> args) {
    if (f < 0) throw Error("invalid symbol id");
    auto node = std::make_shared<Node>();
    node->symbol = f;
    std::size_t depth = 0;
    std::size_t size = 1;
    std::size_t h = mix(0xabcdef, static_cast<std::size_t>(f));
    bool ground = true;
    for (const auto& a : args) {
        depth = std::max(depth, a.depth());
        size += a.size();
        h = mix(h, a.hash());
        ground = ground && a.is_ground();
    }
    node->depth = depth + 1;
    node->size = size;
    node->hash = h;
    node->ground = ground;
    node->args = std::move(args);
    return Term(std::move(node));
}

bool operator==(const Term& a, const Term& b) {
    if (a.node_ == b.node_) return true;
    if (a.hash() != b.hash() || a.size() != b.size() || a.symbol() != b.symbol()) return false;
    if (a.is_variable()) return a.name() == b.name();
    for (std::size_t i = 0; i < a.arity(); ++i)
        if (!(a.arg(i) == b.arg(i))) return false;
    return true;
}

std::strong_ordering operator<=>(const Term& a, const Term& b) {
    if (a.node_ == b.node_) return std::strong_ordering::equal;
    if (a.is_variable() != b.is_variable())
        return a.is_variable() ? std::strong_ordering::less : std::strong_ordering::greater;
    if (a.is_variable()) return a.name() <=> b.name();
    if (auto c = a.symbol() <=> b.symbol(); c != 0) return c;
    for (std::size_t i = 0; i < a.arity(); ++i)
        if (auto c = a.arg(i) <=> b.arg(i); c != 0) return c;
    return std::strong_ordering::equal;
}

std::vector<std::string> variables(const Term& t) {
    std::set<std::string> out;
    std::function<void(const Term&)> walk = [&](const Term& s) {
        if (s.is_ground()) return;
        if (s.is_variable()) {
            out.insert(s.name());
            return;
        }
        for (const auto& a : s.args()) walk(a);
    };
    walk(t);
    return {out.begin(), out.end()};
}

bool is_linear(const Term& t) {
    std::unordered_set<std::string> seen;
    bool linear = true;
    std::function<void(const Term&)> walk = [&](const Term& s) {
        if (!linear || s.is_ground()) return;
        if (s.is_variable()) {
            if (!seen.insert(s.name()).second) linear = false;
            return;
        }
        for (const auto& a : s.args()) walk(a);
    };
    walk(t);
    return linear;
}

bool contains_symbol(const Term& t, SymbolId f) {
    if (t.is_variable()) return false;
    if (t.symbol() == f) return true;
    for (const auto& a : t.args())
        if (contains_symbol(a, f)) return true;
    return false;
}

std::vector<Position> positions(const Term& t) {
    std::vector<Position> out;
    Position cur;
    std::function<void(const Term&)> walk = [&](const Term& s) {
        for (std::size_t i = 0; i < s.arity(); ++i) {
            cur.push_back(static_cast<int>(i));
            walk(s.arg(i));
            cur.pop_back();
        }
        out.push_back(cur);
    };
    walk(t);
    return out;
}

const Term& subterm_at(const Term& t, const Position& p) {
    const Term* cur = &t;
    for (int i : p) {
        if (cur->is_variable() || static_cast<std::size_t>(i) >= cur->arity()) throw Error("invalid position");
        cur = &cur->arg(static_cast<std::size_t>(i));
    }
    return *cur;
}

namespace {

Term replace_from(const Term& t, const Position& p, std::size_t depth, const Term& replacement) {
    if (depth == p.size()) return replacement;
    auto i = static_cast<std::size_t>(p[depth]);
    if (t.is_variable() || i >= t.arity()) throw Error("invalid position");
    std::vector<Term> args(t.args().begin(), t.args().end());
    args[i] = replace_from(t.arg(i), p, depth + 1, replacement);
    return Term::apply(t.symbol(), std::move(args));
}

} // namespace

Term replace_at(const Term& t, const Position& p, const Term& replacement) {
    return replace_from(t, p, 0, replacement);
}

std::vector<Term> subterms(const Term& t) {
    std::vector<Term> out;
    std::unordered_set<Term, TermHash> seen;
    std::function<void(const Term&)> walk = [&](const Term& s) {
        if (seen.contains(s)) return;
        for (const auto& a : s.args()) walk(a);
        seen.insert(s);
        out.push_back(s);
    };
    walk(t);
    return out;
}

Term substitute(const Term& t, const Substitution& sigma) {
    if (t.is_ground()) return t;
    if (t.is_variable()) {
        auto it = sigma.find(t.name());
        return it == sigma.end() ? t : it->second;
    }
    std::vector<Term> args;
    args.reserve(t.arity());
    for (const auto& a : t.args()) args.push_back(substitute(a, sigma));
    return Term::apply(t.symbol(), std::move(args));
}

namespace {

bool match_into(const Term& pattern, const Term& t, Substitution& sigma) {
    if (pattern.is_variable()) {
        auto [it, inserted] = sigma.emplace(pattern.name(), t);
        return inserted || it->second == t;
    }
    if (t.is_variable() || pattern.symbol() != t.symbol()) return false;
    for (std::size_t i = 0; i < pattern.arity(); ++i)
        if (!match_into(pattern.arg(i), t.arg(i), sigma)) return false;
    return true;
}

} // namespace

std::optional<Substitution> match(const Term& pattern, const Term& t) {
    Substitution sigma;
    if (match_into(pattern, t, sigma)) return sigma;
    return std::nullopt;
}

std::string to_string(const Term& t, const Signature& sig) {
    if (t.is_variable()) return t.name();
    std::string out = sig.name(t.symbol());
    if (t.arity() == 0) return out;
    out += '(';
    for (std::size_t i = 0; i < t.arity(); ++i) {
        if (i > 0) out += ',';
        out += to_string(t.arg(i), sig);
    }
    out += ')';
    return out;
}

bool Trs::left_linear() const {
    return std::all_of(rules.begin(), rules.end(), [](const Rule& r) { return r.left_linear(); });
}

bool Trs::has_collapsing_rule() const {
    return std::any_of(rules.begin(), rules.end(), [](const Rule& r) { return r.collapsing(); });
}

namespace {

std::string render(const Term& t, const Signature& sig, Origin origin) {
    if (origin == Origin::StringSystem) {
        // Rule sides are words over a shared tail variable.
        std::string word;
        const Term* cur = &t;
        while (!cur->is_variable() && cur->arity() == 1) {
            word += sig.name(cur->symbol());
            cur = &cur->arg(0);
        }
        if (cur->is_variable()) return word;
        if (auto w = to_word(t, sig)) return *w;
    }
    return to_string(t, sig);
}

} // namespace

std::string to_string(const Rule& r, const Signature& sig) {
    return to_string(r.lhs, sig) + " -> " + to_string(r.rhs, sig);
}

std::string to_string(const Trs& trs) {
    std::string out;
    for (const auto& r : trs.rules)
        out += render(r.lhs, trs.signature, trs.origin) + " -> " + render(r.rhs, trs.signature, trs.origin) + "\n";
    return out;
}

std::optional<std::string> to_word(const Term& t, const Signature& sig) {
    std::string word;
    const Term* cur = &t;
    while (!cur->is_variable() && cur->arity() == 1) {
        word += sig.name(cur->symbol());
        cur = &cur->arg(0);
    }
    if (cur->is_variable() || cur->arity() != 0 || sig.name(cur->symbol()) != kWordEnd) return std::nullopt;
    return word;
}

Term word_term(std::string_view word, Signature& sig, const Term& tail) {
    std::vector<SymbolId> letters;
    for (char c : word) letters.push_back(sig.add(std::string(1, c), 1));
    Term out = tail;
    for (auto it = letters.rbegin(); it != letters.rend(); ++it) out = Term::apply(*it, {out});
    return out;
}

} // namespace nonterm
