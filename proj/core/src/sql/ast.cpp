#include "clausefuzz/sql/ast.hpp"

namespace cf::sql {

bool is_comparison(BinOp op) {
  switch (op) {
    case BinOp::Eq: case BinOp::Ne: case BinOp::Lt:
    case BinOp::Le: case BinOp::Gt: case BinOp::Ge:
      return true;
    default:
      return false;
  }
}

BinOp mirror(BinOp op) {
  switch (op) {
    case BinOp::Lt: return BinOp::Gt;
    case BinOp::Le: return BinOp::Ge;
    case BinOp::Gt: return BinOp::Lt;
    case BinOp::Ge: return BinOp::Le;
    default: return op;  // Eq/Ne symmetric
  }
}

const char* binop_text(BinOp op) {
  switch (op) {
    case BinOp::Eq: return "=";
    case BinOp::Ne: return "<>";
    case BinOp::Lt: return "<";
    case BinOp::Le: return "<=";
    case BinOp::Gt: return ">";
    case BinOp::Ge: return ">=";
    case BinOp::And: return "AND";
    case BinOp::Or: return "OR";
  }
  return "?";
}

std::unique_ptr<Expr> Expr::clone() const {
  auto e = std::make_unique<Expr>();
  e->kind = kind;
  e->lit = lit;
  e->table = table;
  e->column = column;
  e->un_op = un_op;
  e->bin_op = bin_op;
  e->truth_op = truth_op;
  e->cast_type = cast_type;
  e->agg = agg;
  e->wrap = wrap;
  e->negated = negated;
  e->star = star;
  e->res_table = res_table;
  e->res_column = res_column;
  for (const auto& k : kids) e->kids.push_back(k->clone());
  if (sub) e->sub = sub->clone();
  return e;
}

bool Expr::equals(const Expr& o) const {
  if (kind != o.kind || negated != o.negated || star != o.star) return false;
  switch (kind) {
    case Kind::Literal:
      if (lit.is_null() != o.lit.is_null()) return false;
      if (!lit.is_null() && lit.render() != o.lit.render()) return false;
      if (lit.v.index() != o.lit.v.index()) return false;
      break;
    case Kind::Column:
      if (table != o.table || column != o.column) return false;
      break;
    case Kind::Unary:
      if (un_op != o.un_op) return false;
      break;
    case Kind::Binary:
      if (bin_op != o.bin_op) return false;
      break;
    case Kind::Truth:
      if (truth_op != o.truth_op) return false;
      break;
    case Kind::Cast:
      if (cast_type != o.cast_type) return false;
      break;
    case Kind::Agg:
      if (agg != o.agg) return false;
      break;
    case Kind::Wrap:
      if (wrap != o.wrap) return false;
      break;
    default:
      break;
  }
  if (kids.size() != o.kids.size()) return false;
  for (size_t i = 0; i < kids.size(); ++i)
    if (!kids[i]->equals(*o.kids[i])) return false;
  if (!!sub != !!o.sub) return false;
  if (sub && !sub->equals(*o.sub)) return false;
  return true;
}

std::unique_ptr<Expr> make_literal(Value v) {
  auto e = std::make_unique<Expr>();
  e->kind = Expr::Kind::Literal;
  e->lit = std::move(v);
  return e;
}

std::unique_ptr<Expr> make_column(std::string table, std::string column) {
  auto e = std::make_unique<Expr>();
  e->kind = Expr::Kind::Column;
  e->table = std::move(table);
  e->column = std::move(column);
  return e;
}

std::unique_ptr<Expr> make_binary(BinOp op, std::unique_ptr<Expr> l, std::unique_ptr<Expr> r) {
  auto e = std::make_unique<Expr>();
  e->kind = Expr::Kind::Binary;
  e->bin_op = op;
  e->kids.push_back(std::move(l));
  e->kids.push_back(std::move(r));
  return e;
}

std::unique_ptr<Expr> make_unary(UnOp op, std::unique_ptr<Expr> k) {
  auto e = std::make_unique<Expr>();
  e->kind = Expr::Kind::Unary;
  e->un_op = op;
  e->kids.push_back(std::move(k));
  return e;
}

SelectItem SelectItem::clone() const {
  SelectItem s;
  s.star = star;
  s.alias = alias;
  if (expr) s.expr = expr->clone();
  return s;
}

std::unique_ptr<Select> Select::clone() const {
  auto s = std::make_unique<Select>();
  s->distinct = distinct;
  for (const auto& it : items) s->items.push_back(it.clone());
  s->from = from;
  if (where) s->where = where->clone();
  for (const auto& o : order_by) {
    OrderTerm t;
    t.expr = o.expr->clone();
    t.desc = o.desc;
    s->order_by.push_back(std::move(t));
  }
  return s;
}

bool Select::equals(const Select& o) const {
  if (distinct != o.distinct || from != o.from) return false;
  if (items.size() != o.items.size() || order_by.size() != o.order_by.size()) return false;
  for (size_t i = 0; i < items.size(); ++i) {
    if (items[i].star != o.items[i].star || items[i].alias != o.items[i].alias) return false;
    if (!items[i].star && !items[i].expr->equals(*o.items[i].expr)) return false;
  }
  if (!!where != !!o.where) return false;
  if (where && !where->equals(*o.where)) return false;
  for (size_t i = 0; i < order_by.size(); ++i) {
    if (order_by[i].desc != o.order_by[i].desc) return false;
    if (!order_by[i].expr->equals(*o.order_by[i].expr)) return false;
  }
  return true;
}

SqlStatement SqlStatement::clone() const {
  SqlStatement s;
  s.kind = kind;
  s.src_begin = src_begin;
  s.src_end = src_end;
  switch (kind) {
    case Kind::CreateTable: {
      s.create_table = std::make_unique<CreateTable>(*create_table);
      break;
    }
    case Kind::CreateIndex: {
      auto ci = std::make_unique<CreateIndex>();
      ci->name = create_index->name;
      ci->table = create_index->table;
      ci->columns = create_index->columns;
      if (create_index->where) ci->where = create_index->where->clone();
      s.create_index = std::move(ci);
      break;
    }
    case Kind::CreateView: {
      auto cv = std::make_unique<CreateView>();
      cv->name = create_view->name;
      cv->select = create_view->select->clone();
      s.create_view = std::move(cv);
      break;
    }
    case Kind::Insert: {
      auto in = std::make_unique<Insert>();
      in->table = insert->table;
      in->columns = insert->columns;
      in->or_fail = insert->or_fail;
      for (const auto& row : insert->rows) {
        std::vector<std::unique_ptr<Expr>> r;
        for (const auto& e : row) r.push_back(e->clone());
        in->rows.push_back(std::move(r));
      }
      s.insert = std::move(in);
      break;
    }
    case Kind::Select:
      s.select = select->clone();
      break;
    case Kind::Pragma:
      s.pragma = std::make_unique<Pragma>(*pragma);
      break;
    case Kind::Raw:
      s.raw = std::make_unique<RawStatement>(*raw);
      break;
  }
  return s;
}

bool SqlStatement::equals(const SqlStatement& o) const {
  if (kind != o.kind) return false;
  switch (kind) {
    case Kind::CreateTable: {
      const auto &a = *create_table, &b = *o.create_table;
      if (a.name != b.name || a.without_rowid != b.without_rowid || a.table_pk != b.table_pk)
        return false;
      if (a.columns.size() != b.columns.size()) return false;
      for (size_t i = 0; i < a.columns.size(); ++i) {
        const auto &ca = a.columns[i], &cb = b.columns[i];
        if (ca.name != cb.name || ca.decl_type != cb.decl_type ||
            ca.collation != cb.collation || ca.primary_key != cb.primary_key ||
            ca.pk_desc != cb.pk_desc)
          return false;
      }
      return true;
    }
    case Kind::CreateIndex: {
      const auto &a = *create_index, &b = *o.create_index;
      if (a.name != b.name || a.table != b.table || a.columns != b.columns) return false;
      if (!!a.where != !!b.where) return false;
      return !a.where || a.where->equals(*b.where);
    }
    case Kind::CreateView:
      return create_view->name == o.create_view->name &&
             create_view->select->equals(*o.create_view->select);
    case Kind::Insert: {
      const auto &a = *insert, &b = *o.insert;
      if (a.table != b.table || a.columns != b.columns || a.or_fail != b.or_fail) return false;
      if (a.rows.size() != b.rows.size()) return false;
      for (size_t i = 0; i < a.rows.size(); ++i) {
        if (a.rows[i].size() != b.rows[i].size()) return false;
        for (size_t j = 0; j < a.rows[i].size(); ++j)
          if (!a.rows[i][j]->equals(*b.rows[i][j])) return false;
      }
      return true;
    }
    case Kind::Select:
      return select->equals(*o.select);
    case Kind::Pragma:
      return pragma->name == o.pragma->name && pragma->value == o.pragma->value;
    case Kind::Raw:
      return raw->text == o.raw->text;
  }
  return false;
}

StatementList clone_statements(const StatementList& stmts) {
  StatementList out;
  out.reserve(stmts.size());
  for (const auto& s : stmts) out.push_back(s.clone());
  return out;
}

bool statements_equal(const StatementList& a, const StatementList& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i)
    if (!a[i].equals(b[i])) return false;
  return true;
}

}  // namespace cf::sql
