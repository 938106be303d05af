#include "clausefuzz/sql/printer.hpp"

#include <sstream>

namespace cf::sql {
namespace {

std::string quote_text(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    out += c;
    if (c == '\'') out += '\'';
  }
  out += '\'';
  return out;
}

void print_expr(std::ostringstream& os, const Expr& e);

void print_paren_child(std::ostringstream& os, const Expr& parent, const Expr& child) {
  // Any binary child of a binary/NOT parent is parenthesized. Slightly noisy
  // output, but render/parse stays a structural identity for arbitrary trees,
  // including right-nested chains the mutator can produce.
  bool need = child.kind == Expr::Kind::Binary;
  if (need) os << '(';
  print_expr(os, child);
  if (need) os << ')';
}

void print_expr(std::ostringstream& os, const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Literal:
      if (e.lit.is_text()) os << quote_text(e.lit.as_text());
      else os << e.lit.render();
      break;
    case Expr::Kind::Column:
      if (!e.table.empty()) os << e.table << '.';
      os << e.column;
      break;
    case Expr::Kind::Unary:
      if (e.un_op == UnOp::Not) {
        os << "NOT ";
        print_paren_child(os, e, *e.kids[0]);
      } else {
        os << '-';
        print_expr(os, *e.kids[0]);
      }
      break;
    case Expr::Kind::Binary:
      print_paren_child(os, e, *e.kids[0]);
      os << ' ' << binop_text(e.bin_op) << ' ';
      print_paren_child(os, e, *e.kids[1]);
      break;
    case Expr::Kind::Truth: {
      os << '(';
      print_expr(os, *e.kids[0]);
      os << ')';
      switch (e.truth_op) {
        case TruthOp::IsTrue: os << " IS TRUE"; break;
        case TruthOp::IsFalse: os << " IS FALSE"; break;
        case TruthOp::IsNull: os << " IS NULL"; break;
        case TruthOp::NotNull: os << " IS NOT NULL"; break;
      }
      break;
    }
    case Expr::Kind::Cast:
      os << "CAST(";
      print_expr(os, *e.kids[0]);
      os << " AS " << e.cast_type << ')';
      break;
    case Expr::Kind::Like:
      print_expr(os, *e.kids[0]);
      os << (e.negated ? " NOT LIKE " : " LIKE ");
      print_expr(os, *e.kids[1]);
      if (e.kids.size() > 2) {
        os << " ESCAPE ";
        print_expr(os, *e.kids[2]);
      }
      break;
    case Expr::Kind::InList: {
      print_expr(os, *e.kids[0]);
      os << (e.negated ? " NOT IN (" : " IN (");
      for (size_t i = 1; i < e.kids.size(); ++i) {
        if (i > 1) os << ", ";
        print_expr(os, *e.kids[i]);
      }
      os << ')';
      break;
    }
    case Expr::Kind::Exists:
      if (e.negated) os << "NOT ";
      os << "EXISTS (" << render_select(*e.sub) << ')';
      break;
    case Expr::Kind::Agg:
      os << (e.agg == AggFn::Min ? "MIN(" : e.agg == AggFn::Count ? "COUNT(" : "TOTAL(");
      if (e.star) os << '*';
      else print_expr(os, *e.kids[0]);
      os << ')';
      break;
    case Expr::Kind::Wrap:
      os << (e.wrap == Wrapper::Likely ? "LIKELY(" : "UNLIKELY(");
      print_expr(os, *e.kids[0]);
      os << ')';
      break;
    case Expr::Kind::Star:
      os << '*';
      break;
  }
}

const char* collation_name(Collation c) {
  switch (c) {
    case Collation::Nocase: return "NOCASE";
    case Collation::Rtrim: return "RTRIM";
    default: return "BINARY";
  }
}

}  // namespace

std::string render_expr(const Expr& e) {
  std::ostringstream os;
  print_expr(os, e);
  return os.str();
}

std::string render_select(const Select& s) {
  std::ostringstream os;
  os << "SELECT ";
  if (s.distinct) os << "DISTINCT ";
  for (size_t i = 0; i < s.items.size(); ++i) {
    if (i) os << ", ";
    if (s.items[i].star) os << '*';
    else {
      print_expr(os, *s.items[i].expr);
      if (!s.items[i].alias.empty()) os << " AS " << s.items[i].alias;
    }
  }
  if (!s.from.empty()) os << " FROM " << s.from;
  if (s.where) {
    os << " WHERE ";
    print_expr(os, *s.where);
  }
  if (!s.order_by.empty()) {
    os << " ORDER BY ";
    for (size_t i = 0; i < s.order_by.size(); ++i) {
      if (i) os << ", ";
      print_expr(os, *s.order_by[i].expr);
      if (s.order_by[i].desc) os << " DESC";
    }
  }
  return os.str();
}

std::string render_statement(const SqlStatement& st) {
  std::ostringstream os;
  switch (st.kind) {
    case SqlStatement::Kind::CreateTable: {
      const auto& ct = *st.create_table;
      os << "CREATE TABLE " << ct.name << '(';
      for (size_t i = 0; i < ct.columns.size(); ++i) {
        if (i) os << ", ";
        const auto& c = ct.columns[i];
        os << c.name;
        if (!c.decl_type.empty()) os << ' ' << c.decl_type;
        if (c.collation != Collation::Binary) os << " COLLATE " << collation_name(c.collation);
        if (c.primary_key) {
          os << " PRIMARY KEY";
          if (c.pk_desc) os << " DESC";
        }
      }
      if (!ct.table_pk.empty()) {
        os << ", PRIMARY KEY(";
        for (size_t i = 0; i < ct.table_pk.size(); ++i) {
          if (i) os << ", ";
          os << ct.table_pk[i];
        }
        os << ')';
      }
      os << ')';
      if (ct.without_rowid) os << " WITHOUT ROWID";
      break;
    }
    case SqlStatement::Kind::CreateIndex: {
      const auto& ci = *st.create_index;
      os << "CREATE INDEX " << ci.name << " ON " << ci.table << '(';
      for (size_t i = 0; i < ci.columns.size(); ++i) {
        if (i) os << ", ";
        os << ci.columns[i];
      }
      os << ')';
      if (ci.where) {
        os << " WHERE ";
        print_expr(os, *ci.where);
      }
      break;
    }
    case SqlStatement::Kind::CreateView:
      os << "CREATE VIEW " << st.create_view->name << " AS "
         << render_select(*st.create_view->select);
      break;
    case SqlStatement::Kind::Insert: {
      const auto& in = *st.insert;
      os << "INSERT ";
      if (in.or_fail) os << "OR FAIL ";
      os << "INTO " << in.table;
      if (!in.columns.empty()) {
        os << '(';
        for (size_t i = 0; i < in.columns.size(); ++i) {
          if (i) os << ", ";
          os << in.columns[i];
        }
        os << ')';
      }
      os << " VALUES ";
      for (size_t r = 0; r < in.rows.size(); ++r) {
        if (r) os << ", ";
        os << '(';
        for (size_t i = 0; i < in.rows[r].size(); ++i) {
          if (i) os << ", ";
          print_expr(os, *in.rows[r][i]);
        }
        os << ')';
      }
      break;
    }
    case SqlStatement::Kind::Select:
      os << render_select(*st.select);
      break;
    case SqlStatement::Kind::Pragma:
      os << "PRAGMA " << st.pragma->name;
      if (!st.pragma->value.empty()) os << " = " << st.pragma->value;
      break;
    case SqlStatement::Kind::Raw:
      os << st.raw->text;
      break;
  }
  return os.str();
}

std::string render(const StatementList& stmts) {
  std::string out;
  for (size_t i = 0; i < stmts.size(); ++i) {
    if (i) out += '\n';
    out += render_statement(stmts[i]);
    out += ';';
  }
  return out;
}

}  // namespace cf::sql
