#include "nonterm/syntax.hpp"

#include <cctype>
#include <memory>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "nonterm/error.hpp"

namespace nonterm {

namespace {

struct RawTerm {
    std::string name;
    bool has_parens = false;
    std::vector<RawTerm> args;
    std::size_t line = 0;
    std::size_t column = 0;
};

class LineLexer {
public:
    LineLexer(std::string_view text, std::size_t line) : text_(text), line_(line) {}

    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool at_end() {
        skip_space();
        return pos_ >= text_.size();
    }

    bool consume(std::string_view token) {
        skip_space();
        if (text_.substr(pos_, token.size()) == token) {
            pos_ += token.size();
            return true;
        }
        return false;
    }

    void expect(std::string_view token) {
        if (!consume(token)) fail("expected '" + std::string(token) + "'");
    }

    std::string identifier() {
        skip_space();
        auto start = pos_;
        if (pos_ >= text_.size() || !std::isalpha(static_cast<unsigned char>(text_[pos_])))
            fail(pos_ < text_.size() && text_[pos_] == kReservedPrefix ? "identifiers may not start with '#'"
                                                                         : "expected identifier");
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            ++pos_;
        return std::string(text_.substr(start, pos_ - start));
    }

    RawTerm term() {
        skip_space();
        RawTerm t;
        t.line = line_;
        t.column = pos_ + 1;
        t.name = identifier();
        if (consume("(")) {
            t.has_parens = true;
            if (!consume(")")) {
                do {
                    t.args.push_back(term());
                } while (consume(","));
                expect(")");
            }
        }
        return t;
    }

    [[noreturn]] void fail(const std::string& message) const { throw ParseError(line_, pos_ + 1, message); }

    std::size_t column() const { return pos_ + 1; }

private:
    std::string_view text_;
    std::size_t line_;
    std::size_t pos_ = 0;
};

struct RawRule {
    RawTerm lhs;
    RawTerm rhs;
};

// Calls fn(line_number, line_text) for every non-blank, non-comment line.
template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn) {
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        auto line = text.substr(start, end - start);
        ++line_no;
        auto first = line.find_first_not_of(" \t\r");
        if (first != std::string_view::npos && line[first] != '%') {
            auto last = line.find_last_not_of(" \t\r");
            fn(line_no, line.substr(0, last + 1));
        }
        if (end == text.size()) break;
        start = end + 1;
    }
}

void collect_usage(const RawTerm& t, std::unordered_map<std::string, bool>& applied) {
    auto& used_with_args = applied[t.name];
    used_with_args = used_with_args || t.has_parens;
    for (const auto& a : t.args) collect_usage(a, applied);
}

Term build(const RawTerm& raw, const std::unordered_set<std::string>& vars, Signature& sig) {
    if (vars.contains(raw.name)) {
        if (raw.has_parens) throw ParseError(raw.line, raw.column, "variable " + raw.name + " applied to arguments");
        return Term::variable(raw.name);
    }
    SymbolId f = 0;
    try {
        f = sig.add(raw.name, static_cast<int>(raw.args.size()));
    } catch (const Error& e) {
        throw ParseError(raw.line, raw.column, e.what());
    }
    std::vector<Term> args;
    args.reserve(raw.args.size());
    for (const auto& a : raw.args) args.push_back(build(a, vars, sig));
    return Term::apply(f, std::move(args));
}

void validate_rule(const Rule& rule, std::size_t line, std::size_t column) {
    if (rule.lhs.is_variable())
        throw ParseError(line, column, "trivially non-terminating: lhs is a variable");
    auto lhs_vars = variables(rule.lhs);
    std::set<std::string> allowed(lhs_vars.begin(), lhs_vars.end());
    for (const auto& v : variables(rule.rhs))
        if (!allowed.contains(v)) throw ParseError(line, column, "variable " + v + " occurs only in the rhs");
}

Trs parse_term_system(std::string_view text) {
    std::vector<RawRule> raw_rules;
    std::vector<std::size_t> rule_lines;
    std::unordered_set<std::string> declared;
    bool has_var_header = false;

    for_each_line(text, [&](std::size_t line_no, std::string_view line) {
        LineLexer lex(line, line_no);
        if (lex.consume("(VAR")) {
            has_var_header = true;
            while (!lex.consume(")")) {
                if (lex.at_end()) lex.fail("unterminated (VAR ...) declaration");
                declared.insert(lex.identifier());
            }
            if (!lex.at_end()) lex.fail("unexpected text after variable declaration");
            return;
        }
        RawRule r;
        r.lhs = lex.term();
        lex.expect("->");
        r.rhs = lex.term();
        if (!lex.at_end()) lex.fail("unexpected text after rule");
        raw_rules.push_back(std::move(r));
        rule_lines.push_back(line_no);
    });

    if (raw_rules.empty()) throw ParseError(1, 1, "empty system: no rules");

    std::unordered_set<std::string> vars = declared;
    if (!has_var_header) {
        std::unordered_map<std::string, bool> applied;
        for (const auto& r : raw_rules) {
            collect_usage(r.lhs, applied);
            collect_usage(r.rhs, applied);
        }
        for (const auto& [name, with_args] : applied)
            if (name.size() == 1 && std::islower(static_cast<unsigned char>(name[0])) && !with_args)
                vars.insert(name);
    }

    Trs trs;
    trs.origin = Origin::TermSystem;
    for (std::size_t i = 0; i < raw_rules.size(); ++i) {
        Rule rule{build(raw_rules[i].lhs, vars, trs.signature), build(raw_rules[i].rhs, vars, trs.signature)};
        validate_rule(rule, rule_lines[i], raw_rules[i].lhs.column);
        trs.rules.push_back(std::move(rule));
    }
    return trs;
}

Trs parse_string_system(std::string_view text) {
    std::vector<std::pair<std::string, std::string>> rules;
    std::vector<std::size_t> lines;
    for_each_line(text, [&](std::size_t line_no, std::string_view line) {
        auto arrow = line.find("->");
        if (arrow == std::string_view::npos) throw ParseError(line_no, 1, "expected '->'");
        auto word = [&](std::string_view part, std::size_t offset) {
            std::string w;
            for (std::size_t i = 0; i < part.size(); ++i) {
                auto c = part[i];
                if (std::isspace(static_cast<unsigned char>(c))) continue;
                if (c == kReservedPrefix) throw ParseError(line_no, offset + i + 1, "letter '#' is reserved");
                w += c;
            }
            return w;
        };
        auto lhs = word(line.substr(0, arrow), 0);
        auto rhs = word(line.substr(arrow + 2), arrow + 2);
        if (lhs.empty()) throw ParseError(line_no, 1, "trivially non-terminating: lhs is a variable (empty word)");
        rules.emplace_back(std::move(lhs), std::move(rhs));
        lines.push_back(line_no);
    });
    if (rules.empty()) throw ParseError(1, 1, "empty system: no rules");
    return string_to_trs(rules);
}

} // namespace

Trs parse_trs(std::string_view text, InputFormat format) {
    return format == InputFormat::Srs ? parse_string_system(text) : parse_term_system(text);
}

InputFormat format_for_path(std::string_view path) {
    return path.ends_with(".srs") ? InputFormat::Srs : InputFormat::Trs;
}

Trs string_to_trs(const std::vector<std::pair<std::string, std::string>>& rules) {
    Trs trs;
    trs.origin = Origin::StringSystem;
    for (const auto& [lhs, rhs] : rules) {
        if (lhs.empty()) throw Error("string rule with empty lhs");
        for (char c : lhs + rhs)
            if (std::isspace(static_cast<unsigned char>(c)) || c == kReservedPrefix)
                throw Error(std::string("invalid letter '") + c + "'");
    }
    // Letters first, in order of appearance, then the end marker.
    for (const auto& [lhs, rhs] : rules)
        for (char c : lhs + rhs) trs.signature.add(std::string(1, c), 1);
    trs.signature.add(kWordEnd, 0);
    auto x = Term::variable("x");
    for (const auto& [lhs, rhs] : rules)
        trs.rules.push_back({word_term(lhs, trs.signature, x), word_term(rhs, trs.signature, x)});
    return trs;
}

} // namespace nonterm
