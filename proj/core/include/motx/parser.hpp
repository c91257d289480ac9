#pragma once

#include <string>
#include <vector>

#include "motx/ir.hpp"

namespace motx {

// Parses the block document syntax (see docs/specfile-grammar.ebnf).
// Throws ParseError with line/column info; does not run validate().
ExpFunSpec parse_spec(const std::string& text, const std::string& name = "");
ExpFunSpec parse_spec_file(const std::string& path);

// Single-line fragments, used by the command line and by tests.  The
// result is sort-annotated against the given scope.
ExprPtr parse_term(const std::string& text, const std::vector<VarDecl>& scope, Sort expected);
FormulaPtr parse_formula(const std::string& text, const std::vector<VarDecl>& scope);

} // namespace motx
