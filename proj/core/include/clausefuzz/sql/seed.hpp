#pragma once

#include <optional>
#include <string>

#include "clausefuzz/sql/ast.hpp"
#include "clausefuzz/sql/printer.hpp"

namespace cf::sql {

/// An ordered SQL script plus fuzzing metadata.
struct SeedCase {
  StatementList statements;
  std::string id;  // stable hash of rendered text, hex
  std::string parent_id;
  std::string mutation_tag;

  // filled by the engine
  std::optional<double> distance;  // nullopt = undefined
  double energy = 1.0;

  std::string render() const { return sql::render(statements); }

  SeedCase clone() const {
    SeedCase s;
    s.statements = clone_statements(statements);
    s.id = id;
    s.parent_id = parent_id;
    s.mutation_tag = mutation_tag;
    s.distance = distance;
    s.energy = energy;
    return s;
  }
};

/// FNV-1a over the rendered text; deterministic for identical text.
std::string seed_id(const std::string& rendered);

SeedCase make_seed(StatementList stmts);

}  // namespace cf::sql
