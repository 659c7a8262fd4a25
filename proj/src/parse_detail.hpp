#pragma once

#include <string>
#include <vector>

#include "finprin/syntax.hpp"
#include "lexer.hpp"

namespace finprin::detail {

/// Parses one formula starting at the current token; stops before any token
/// that cannot continue it (';', '}', end of input).
Formula parse_formula_tokens(TokenStream& ts, const Language& lang, std::vector<std::string>& bound);
Term parse_term_tokens(TokenStream& ts, const Language& lang, const std::vector<std::string>& bound);

}  // namespace finprin::detail
