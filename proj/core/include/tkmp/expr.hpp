#pragma once

#include <string_view>

#include "tkmp/polynomial.hpp"

namespace tkmp {

// Parses a polynomial in x1..xn.
//   expr   := term (('+' | '-') term)*
//   term   := ['-' | '+'] [number] factor ('*' factor)*  |  number
//   factor := var ['^' int] | '(' expr ')' ['^' int] | number
// Numbers are integers, decimals (with optional exponent) or rationals p/q.
// Throws ParseError carrying line and column.
Polynomial parse_polynomial(std::string_view src, int n);

}  // namespace tkmp
