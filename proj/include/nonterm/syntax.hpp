#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nonterm/term.hpp"

namespace nonterm {

enum class InputFormat { Trs, Srs };

/// Parses a rewrite system.
///
/// trs: one rule `lhs -> rhs` per line; an optional `(VAR x y)` line declares
/// the variables, otherwise single lowercase letters used without arguments are
/// variables. srs: one rule `word -> word` per line, one character per letter.
/// Lines starting with `%` are comments.
Trs parse_trs(std::string_view text, InputFormat format);

/// Guesses the format from a file name: `.srs` is a string system, anything else a term system.
InputFormat format_for_path(std::string_view path);

/// Encodes each word as a unary term over a shared variable `x`; the end marker
/// constant is appended to the signature.
Trs string_to_trs(const std::vector<std::pair<std::string, std::string>>& rules);

} // namespace nonterm
