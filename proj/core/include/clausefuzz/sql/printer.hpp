#pragma once

#include <string>

#include "clausefuzz/sql/ast.hpp"

namespace cf::sql {

/// Canonical single-spaced text; parse(render(x)) is structurally equal to x.
std::string render(const StatementList& stmts);
std::string render_statement(const SqlStatement& stmt);  // no trailing ';'
std::string render_expr(const Expr& e);
std::string render_select(const Select& s);

}  // namespace cf::sql
