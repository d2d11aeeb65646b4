#pragma once

// Reader and writer for the CTWedge textual model format:
//
//   Model <name>
//
//   Parameters:
//   <id> : Boolean
//   <id> : { <label>, ... }
//   <id> : [ <int> .. <int> ]
//
//   Constraints:
//   # <expr> #
//
// Expression precedence, loosest first: <=>, =>, OR, AND, NOT/!, atoms.
// `=>` groups to the right, the other connectives to the left. Atoms compare
// terms with = != < <= > >=; terms use + - * over integer ranges.

#include <string>
#include <string_view>

#include "ipmgen/model.hpp"

namespace ipmgen {

/// Throws SyntaxError for malformed text and ModelError (prefixed with the
/// source position) for semantic violations.
Ipm parseCtwedge(std::string_view text);

/// Canonical text form; parseCtwedge(printCtwedge(m)) == m.
std::string printCtwedge(const Ipm& ipm);

/// Canonical text of one constraint body (without the surrounding '#').
std::string printExpr(const Ipm& ipm, const Expr& expr);
std::string printTerm(const Ipm& ipm, const Term& term);

}  // namespace ipmgen
