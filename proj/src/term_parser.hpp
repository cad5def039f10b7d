#pragma once

#include <string>

#include "lexer.hpp"
#include "polcheck/term.hpp"

namespace polcheck::detail {

// Third argument of the obligation predicates holds a postcondition formula.
bool formula_position(const std::string& predicate, std::size_t index);

Term parse_term(TokenStream& ts);
Formula parse_formula(TokenStream& ts);
Atom parse_atom(TokenStream& ts);

}  // namespace polcheck::detail
