#pragma once

#include <stdexcept>
#include <string>

#include "clausefuzz/sql/ast.hpp"

namespace cf::sql {

struct SyntaxError : std::runtime_error {
  size_t offset;
  std::string expected;
  SyntaxError(size_t off, std::string exp)
      : std::runtime_error("syntax error at offset " + std::to_string(off) +
                           ", expected " + exp),
        offset(off),
        expected(std::move(exp)) {}
};

/// Parses a script of ';'-terminated statements. Trailing garbage is an error.
/// Resolution slots are left unresolved; bind them via build_catalog.
StatementList parse(const std::string& text);

/// Parses a single expression (used by tests and the mutator).
std::unique_ptr<Expr> parse_expression(const std::string& text);

}  // namespace cf::sql
