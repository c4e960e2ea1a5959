#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "nonterm/automaton.hpp"
#include "nonterm/transform.hpp"

namespace nonterm {

enum class Claim { NotWN, NotSN };
enum class Method { Wn, SnBasic, SnImproved };

std::string to_string(Claim c);
std::string to_string(Method m);
Method parse_method(std::string_view s);

/// Rule indices selected per state.
using Selection = std::vector<std::set<std::size_t>>;

/// Reduct search bounds used for weak closure.
struct ReductBounds {
    int steps = 2;
    std::size_t cap = 64;
};

struct Certificate {
    Claim claim = Claim::NotWN;
    Method method = Method::Wn;
    Preprocessing trace;
    ReductBounds reducts;
    TreeAutomaton automaton;
    std::optional<QuasiOrder> order;
    std::optional<Selection> selection;
};

/// Everything in a certificate file that does not need the signature.
struct CertificateHeader {
    Claim claim = Claim::NotWN;
    Method method = Method::Wn;
    Preprocessing trace;
    ReductBounds reducts;
};

/// Text form: header lines (`claim`, `method`, `trace`, `reducts`), the
/// automaton, then `leq q q'` and `select q <rule-index>` lines.
std::string to_text(const Certificate& cert);
CertificateHeader parse_certificate_header(std::string_view text);
/// `sig` is the signature of the preprocessed system the certificate refers to.
Certificate parse_certificate(std::string_view text, const Signature& sig);

} // namespace nonterm
