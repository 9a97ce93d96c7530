#pragma once

#include <string_view>

#include "ri/dsl/ast.hpp"

namespace ri::dsl {

// Parses a `.vdta` policy text (grammar in docs/dsl.md) and validates the
// structural invariants: declared identifiers only, exactly one initial
// location, at least one accepting location, resets drawn from declared
// clocks. Throws ParseError with a source position on any violation.
PolicyAst parse_policy(std::string_view source);

// Canonical text for an AST; parse_policy(print_policy(a)) == a.
std::string print_policy(const PolicyAst& ast);

}  // namespace ri::dsl
