#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "clausefuzz/sql/ast.hpp"

namespace cf::sql {

struct CatalogError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct CatalogConflict : CatalogError {
  using CatalogError::CatalogError;
};
struct UnknownEntity : CatalogError {
  using CatalogError::CatalogError;
};

struct CatalogTable {
  std::string name;
  std::vector<ColumnDef> columns;
  bool without_rowid = false;
  bool has_pk = false;

  int column_index(const std::string& name) const;
};

struct CatalogIndex {
  std::string name;
  std::string table;
  std::vector<std::string> columns;
  const Expr* partial_predicate = nullptr;  // borrowed from the statement list
};

struct CatalogView {
  std::string name;
  const Select* select = nullptr;  // borrowed
  std::vector<std::string> column_names;
};

struct Catalog {
  std::vector<CatalogTable> tables;
  std::vector<CatalogIndex> indexes;
  std::vector<CatalogView> views;

  int table_index(const std::string& name) const;
  const CatalogTable* find_table(const std::string& name) const;
  const CatalogView* find_view(const std::string& name) const;
  bool name_taken(const std::string& name) const;
};

/// Builds the catalog from the DDL in `stmts` (in order) and binds every
/// identifier's resolution slot. Throws CatalogConflict / UnknownEntity.
Catalog build_catalog(StatementList& stmts);

/// Column names a SELECT produces against `cat` (for views / projection).
std::vector<std::string> select_column_names(const Select& s, const Catalog& cat);

}  // namespace cf::sql
