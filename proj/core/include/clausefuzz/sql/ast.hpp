#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "clausefuzz/value.hpp"

namespace cf::sql {

struct Select;

enum class BinOp { Eq, Ne, Lt, Le, Gt, Ge, And, Or };
enum class UnOp { Not, Neg };
enum class TruthOp { IsTrue, IsFalse, IsNull, NotNull };
enum class AggFn { Min, Count, Total };
enum class Wrapper { Likely, Unlikely };

bool is_comparison(BinOp op);
BinOp mirror(BinOp op);  // a < b  <=>  b > a
const char* binop_text(BinOp op);

/// One expression node. A single tagged struct keeps clone/equality/printing
/// simple across the whole dialect subset.
struct Expr {
  enum class Kind {
    Literal,   // lit
    Column,    // table (optional), column; resolution filled by catalog binding
    Unary,     // un_op, kids[0]
    Binary,    // bin_op, kids[0], kids[1]
    Truth,     // truth_op, kids[0]           (x IS TRUE / IS NULL / ...)
    Cast,      // cast_type, kids[0]
    Like,      // kids[0] LIKE kids[1] [ESCAPE kids[2]]; negated
    InList,    // kids[0] IN (kids[1..]); negated
    Exists,    // EXISTS (sub); negated
    Agg,       // agg, kids[0] or star
    Wrap,      // LIKELY(kids[0]) / UNLIKELY(kids[0])
    Star,      // * inside COUNT(*)
  };

  Kind kind = Kind::Literal;
  Value lit;
  std::string table;   // Column: optional qualifier
  std::string column;  // Column
  UnOp un_op{};
  BinOp bin_op{};
  TruthOp truth_op{};
  std::string cast_type;
  AggFn agg{};
  Wrapper wrap{};
  bool negated = false;
  bool star = false;  // Agg: COUNT(*)
  std::vector<std::unique_ptr<Expr>> kids;
  std::unique_ptr<Select> sub;  // Exists

  // Resolution slot, bound by build_catalog. -1 = unresolved.
  int res_table = -1;
  int res_column = -1;

  std::unique_ptr<Expr> clone() const;
  bool equals(const Expr& other) const;  // structural, ignores resolution
};

std::unique_ptr<Expr> make_literal(Value v);
std::unique_ptr<Expr> make_column(std::string table, std::string column);
std::unique_ptr<Expr> make_binary(BinOp op, std::unique_ptr<Expr> l, std::unique_ptr<Expr> r);
std::unique_ptr<Expr> make_unary(UnOp op, std::unique_ptr<Expr> k);

struct ColumnDef {
  std::string name;
  std::string decl_type;  // may be empty (SQLite-style untyped column)
  Collation collation = Collation::Binary;
  bool primary_key = false;
  bool pk_desc = false;
};

struct SelectItem {
  bool star = false;
  std::unique_ptr<Expr> expr;  // null when star
  std::string alias;

  SelectItem clone() const;
};

struct OrderTerm {
  std::unique_ptr<Expr> expr;
  bool desc = false;
};

struct Select {
  bool distinct = false;
  std::vector<SelectItem> items;
  std::string from;  // table or view name; empty = no FROM
  std::unique_ptr<Expr> where;
  std::vector<OrderTerm> order_by;

  std::unique_ptr<Select> clone() const;
  bool equals(const Select& other) const;
};

struct CreateTable {
  std::string name;
  std::vector<ColumnDef> columns;
  std::vector<std::string> table_pk;  // table-level PRIMARY KEY(...)
  bool without_rowid = false;
};

struct CreateIndex {
  std::string name;
  std::string table;
  std::vector<std::string> columns;
  std::unique_ptr<Expr> where;  // partial-index predicate, optional
};

struct CreateView {
  std::string name;
  std::unique_ptr<Select> select;
};

struct Insert {
  std::string table;
  std::vector<std::string> columns;  // optional explicit column list
  std::vector<std::vector<std::unique_ptr<Expr>>> rows;
  bool or_fail = false;
};

struct Pragma {
  std::string name;
  std::string value;  // optional
};

/// Statement preserved verbatim; replayed against external engines, never
/// mutated or executed by minidb.
struct RawStatement {
  std::string text;  // without trailing ';'
};

struct SqlStatement {
  enum class Kind { CreateTable, CreateIndex, CreateView, Insert, Select, Pragma, Raw };
  Kind kind;
  std::unique_ptr<CreateTable> create_table;
  std::unique_ptr<CreateIndex> create_index;
  std::unique_ptr<CreateView> create_view;
  std::unique_ptr<Insert> insert;
  std::unique_ptr<Select> select;
  std::unique_ptr<Pragma> pragma;
  std::unique_ptr<RawStatement> raw;
  size_t src_begin = 0, src_end = 0;  // byte offsets into original text

  SqlStatement clone() const;
  bool equals(const SqlStatement& other) const;
};

using StatementList = std::vector<SqlStatement>;

StatementList clone_statements(const StatementList& stmts);
bool statements_equal(const StatementList& a, const StatementList& b);

}  // namespace cf::sql
