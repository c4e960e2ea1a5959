#include "nonterm/certificate.hpp"

#include <sstream>

#include "nonterm/error.hpp"

namespace nonterm {

std::string to_string(Claim c) {
    return c == Claim::NotWN ? "not-wn" : "not-sn";
}

std::string to_string(Method m) {
    switch (m) {
    case Method::Wn: return "wn";
    case Method::SnBasic: return "sn-basic";
    case Method::SnImproved: return "sn-improved";
    }
    return "?";
}

Method parse_method(std::string_view s) {
    if (s == "wn") return Method::Wn;
    if (s == "sn-basic") return Method::SnBasic;
    if (s == "sn-improved") return Method::SnImproved;
    throw Error("unknown method '" + std::string(s) + "'");
}

std::string to_text(const Certificate& cert) {
    std::ostringstream os;
    os << "claim " << to_string(cert.claim) << "\n";
    os << "method " << to_string(cert.method) << "\n";
    os << "trace";
    if (cert.trace.fresh_constant) os << " fresh-constant";
    if (cert.trace.uncurried) os << " uncurry";
    if (cert.trace.collapsing_eliminated) os << " eliminate-collapsing";
    if (!cert.trace.fresh_constant && !cert.trace.uncurried && !cert.trace.collapsing_eliminated) os << " none";
    os << "\n";
    if (cert.method == Method::SnBasic) os << "reducts " << cert.reducts.steps << " " << cert.reducts.cap << "\n";
    os << to_text(cert.automaton);
    if (cert.order) {
        for (State a = 0; a < cert.order->size(); ++a)
            for (State b = 0; b < cert.order->size(); ++b)
                if (cert.order->leq(a, b)) os << "leq " << a << " " << b << "\n";
    }
    if (cert.selection) {
        for (std::size_t q = 0; q < cert.selection->size(); ++q)
            for (auto rule : (*cert.selection)[q]) os << "select " << q << " " << rule << "\n";
    }
    return os.str();
}

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream is(line);
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

long parse_number(const std::string& s, std::size_t line) {
    try {
        std::size_t used = 0;
        long v = std::stol(s, &used);
        if (used != s.size() || v < 0) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ParseError(line, 1, "expected a non-negative number, got '" + s + "'");
    }
}

bool is_header_keyword(const std::string& w) {
    return w == "claim" || w == "method" || w == "trace" || w == "reducts";
}

} // namespace

CertificateHeader parse_certificate_header(std::string_view text) {
    CertificateHeader h;
    bool saw_claim = false;
    bool saw_method = false;
    std::istringstream is{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.find("->") != std::string::npos) continue;
        auto toks = split(line);
        if (toks.empty() || !is_header_keyword(toks[0])) continue;
        if (toks[0] == "claim") {
            if (toks.size() != 2) throw ParseError(line_no, 1, "expected 'claim not-wn|not-sn'");
            if (toks[1] == "not-wn") h.claim = Claim::NotWN;
            else if (toks[1] == "not-sn") h.claim = Claim::NotSN;
            else throw ParseError(line_no, 7, "unknown claim '" + toks[1] + "'");
            saw_claim = true;
        } else if (toks[0] == "method") {
            if (toks.size() != 2) throw ParseError(line_no, 1, "expected 'method <name>'");
            try {
                h.method = parse_method(toks[1]);
            } catch (const Error& e) {
                throw ParseError(line_no, 8, e.what());
            }
            saw_method = true;
        } else if (toks[0] == "trace") {
            for (std::size_t i = 1; i < toks.size(); ++i) {
                if (toks[i] == "fresh-constant") h.trace.fresh_constant = true;
                else if (toks[i] == "uncurry") h.trace.uncurried = true;
                else if (toks[i] == "eliminate-collapsing") h.trace.collapsing_eliminated = true;
                else if (toks[i] != "none") throw ParseError(line_no, 1, "unknown trace step '" + toks[i] + "'");
            }
        } else if (toks[0] == "reducts") {
            if (toks.size() != 3) throw ParseError(line_no, 1, "expected 'reducts <steps> <cap>'");
            h.reducts.steps = static_cast<int>(parse_number(toks[1], line_no));
            h.reducts.cap = static_cast<std::size_t>(parse_number(toks[2], line_no));
            if (h.reducts.steps < 1 || h.reducts.cap < 1) throw ParseError(line_no, 1, "reduct bounds must be positive");
        }
    }
    if (!saw_claim) throw ParseError(line_no, 1, "certificate has no 'claim' line");
    if (!saw_method) throw ParseError(line_no, 1, "certificate has no 'method' line");
    return h;
}

Certificate parse_certificate(std::string_view text, const Signature& sig) {
    auto header = parse_certificate_header(text);
    std::string automaton_text;
    struct Pending {
        std::size_t line;
        std::vector<std::string> toks;
    };
    std::vector<Pending> order_lines, select_lines;

    std::istringstream is{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        auto toks = split(line);
        if (line.find("->") == std::string::npos && !toks.empty()) {
            if (is_header_keyword(toks[0])) {
                automaton_text += "\n";
                continue;
            }
            if (toks[0] == "leq") {
                order_lines.push_back({line_no, toks});
                automaton_text += "\n";
                continue;
            }
            if (toks[0] == "select") {
                select_lines.push_back({line_no, toks});
                automaton_text += "\n";
                continue;
            }
        }
        automaton_text += line + "\n";
    }

    Certificate cert{header.claim, header.method, header.trace, header.reducts,
                     parse_automaton(automaton_text, sig), std::nullopt, std::nullopt};
    const int n = cert.automaton.num_states();
    auto state = [&](const std::string& s, std::size_t l) {
        auto v = parse_number(s, l);
        if (v >= n) throw ParseError(l, 1, "state " + s + " out of range");
        return static_cast<State>(v);
    };
    if (!order_lines.empty()) {
        QuasiOrder order(n);
        for (const auto& p : order_lines) {
            if (p.toks.size() != 3) throw ParseError(p.line, 1, "expected 'leq q q2'");
            order.set(state(p.toks[1], p.line), state(p.toks[2], p.line));
        }
        cert.order = std::move(order);
    }
    if (!select_lines.empty()) {
        Selection sel(static_cast<std::size_t>(n));
        for (const auto& p : select_lines) {
            if (p.toks.size() != 3) throw ParseError(p.line, 1, "expected 'select q rule'");
            sel[static_cast<std::size_t>(state(p.toks[1], p.line))].insert(
                static_cast<std::size_t>(parse_number(p.toks[2], p.line)));
        }
        cert.selection = std::move(sel);
    }
    if (header.method == Method::SnImproved) {
        // An empty selection is legal but still needs the container.
        if (!cert.selection) cert.selection = Selection(static_cast<std::size_t>(n));
        if (!cert.order) throw ParseError(line_no, 1, "improved certificate without 'leq' lines");
    }
    return cert;
}

} // namespace nonterm
