#include "clausefuzz/sql/catalog.hpp"

#include "clausefuzz/sql/printer.hpp"

namespace cf::sql {

int CatalogTable::column_index(const std::string& n) const {
  for (size_t i = 0; i < columns.size(); ++i)
    if (columns[i].name == n) return int(i);
  return -1;
}

int Catalog::table_index(const std::string& name) const {
  for (size_t i = 0; i < tables.size(); ++i)
    if (tables[i].name == name) return int(i);
  return -1;
}

const CatalogTable* Catalog::find_table(const std::string& name) const {
  int i = table_index(name);
  return i < 0 ? nullptr : &tables[i];
}

const CatalogView* Catalog::find_view(const std::string& name) const {
  for (const auto& v : views)
    if (v.name == name) return &v;
  return nullptr;
}

bool Catalog::name_taken(const std::string& name) const {
  return find_table(name) || find_view(name);
}

namespace {

// Column scope for one query source: either a base table or a view.
struct Scope {
  std::string source;  // table or view name
  int table_idx = -1;  // >=0 when base table
  const std::vector<std::string>* view_cols = nullptr;
};

void resolve_select(Select& s, const Catalog& cat);

void resolve_expr(Expr& e, const Catalog& cat, const Scope& scope) {
  switch (e.kind) {
    case Expr::Kind::Column: {
      if (!e.table.empty() && e.table != scope.source)
        throw UnknownEntity("unknown table qualifier: " + e.table);
      if (scope.table_idx >= 0) {
        int ci = cat.tables[scope.table_idx].column_index(e.column);
        if (ci < 0)
          throw UnknownEntity("unknown column: " + e.column + " in " + scope.source);
        e.res_table = scope.table_idx;
        e.res_column = ci;
      } else if (scope.view_cols) {
        int ci = -1;
        for (size_t i = 0; i < scope.view_cols->size(); ++i)
          if ((*scope.view_cols)[i] == e.column) ci = int(i);
        if (ci < 0)
          throw UnknownEntity("unknown column: " + e.column + " in view " + scope.source);
        e.res_table = -1;
        e.res_column = ci;
      } else {
        throw UnknownEntity("column reference without FROM: " + e.column);
      }
      break;
    }
    case Expr::Kind::Exists:
      resolve_select(*e.sub, cat);
      break;
    default:
      break;
  }
  for (auto& k : e.kids) resolve_expr(*k, cat, scope);
}

Scope make_scope(const std::string& from, const Catalog& cat) {
  Scope sc;
  sc.source = from;
  if (from.empty()) return sc;
  int ti = cat.table_index(from);
  if (ti >= 0) {
    sc.table_idx = ti;
    return sc;
  }
  const CatalogView* v = cat.find_view(from);
  if (!v) throw UnknownEntity("unknown table or view: " + from);
  sc.view_cols = &v->column_names;
  return sc;
}

void resolve_select(Select& s, const Catalog& cat) {
  Scope sc = make_scope(s.from, cat);
  for (auto& it : s.items) {
    if (it.star) {
      if (s.from.empty()) throw UnknownEntity("* requires a FROM source");
      continue;
    }
    resolve_expr(*it.expr, cat, sc);
  }
  if (s.where) resolve_expr(*s.where, cat, sc);
  for (auto& o : s.order_by) resolve_expr(*o.expr, cat, sc);
}

void check_constant_expr(const Expr& e) {
  if (e.kind == Expr::Kind::Column)
    throw UnknownEntity("column reference in VALUES: " + e.column);
  if (e.kind == Expr::Kind::Exists || e.kind == Expr::Kind::Agg)
    throw UnknownEntity("non-constant expression in VALUES");
  for (const auto& k : e.kids) check_constant_expr(*k);
}

}  // namespace

std::vector<std::string> select_column_names(const Select& s, const Catalog& cat) {
  std::vector<std::string> names;
  for (const auto& it : s.items) {
    if (it.star) {
      if (const CatalogTable* t = cat.find_table(s.from)) {
        for (const auto& c : t->columns) names.push_back(c.name);
      } else if (const CatalogView* v = cat.find_view(s.from)) {
        for (const auto& c : v->column_names) names.push_back(c);
      }
      continue;
    }
    if (!it.alias.empty()) names.push_back(it.alias);
    else if (it.expr->kind == Expr::Kind::Column) names.push_back(it.expr->column);
    else names.push_back(render_expr(*it.expr));
  }
  return names;
}

Catalog build_catalog(StatementList& stmts) {
  Catalog cat;
  for (auto& st : stmts) {
    switch (st.kind) {
      case SqlStatement::Kind::CreateTable: {
        const auto& ct = *st.create_table;
        if (cat.name_taken(ct.name))
          throw CatalogConflict("duplicate table name: " + ct.name);
        CatalogTable t;
        t.name = ct.name;
        t.without_rowid = ct.without_rowid;
        for (const auto& c : ct.columns) {
          for (const auto& prev : t.columns)
            if (prev.name == c.name)
              throw CatalogConflict("duplicate column: " + c.name);
          t.columns.push_back(c);
          if (c.primary_key) t.has_pk = true;
        }
        for (const auto& pk : ct.table_pk) {
          if (t.column_index(pk) < 0)
            throw UnknownEntity("unknown PRIMARY KEY column: " + pk);
          t.has_pk = true;
        }
        cat.tables.push_back(std::move(t));
        break;
      }
      case SqlStatement::Kind::CreateIndex: {
        auto& ci = *st.create_index;
        for (const auto& idx : cat.indexes)
          if (idx.name == ci.name)
            throw CatalogConflict("duplicate index name: " + ci.name);
        const CatalogTable* t = cat.find_table(ci.table);
        if (!t) throw UnknownEntity("unknown table: " + ci.table);
        for (const auto& c : ci.columns)
          if (t->column_index(c) < 0)
            throw UnknownEntity("unknown column in index: " + c);
        if (ci.where) {
          Scope sc;
          sc.source = ci.table;
          sc.table_idx = cat.table_index(ci.table);
          resolve_expr(*ci.where, cat, sc);
        }
        CatalogIndex idx;
        idx.name = ci.name;
        idx.table = ci.table;
        idx.columns = ci.columns;
        idx.partial_predicate = ci.where.get();
        cat.indexes.push_back(std::move(idx));
        break;
      }
      case SqlStatement::Kind::CreateView: {
        auto& cv = *st.create_view;
        if (cat.name_taken(cv.name))
          throw CatalogConflict("duplicate view name: " + cv.name);
        resolve_select(*cv.select, cat);
        CatalogView v;
        v.name = cv.name;
        v.select = cv.select.get();
        v.column_names = select_column_names(*cv.select, cat);
        cat.views.push_back(std::move(v));
        break;
      }
      case SqlStatement::Kind::Insert: {
        auto& in = *st.insert;
        const CatalogTable* t = cat.find_table(in.table);
        if (!t) throw UnknownEntity("unknown table: " + in.table);
        size_t arity = in.columns.empty() ? t->columns.size() : in.columns.size();
        for (const auto& c : in.columns)
          if (t->column_index(c) < 0)
            throw UnknownEntity("unknown column in INSERT: " + c);
        for (const auto& row : in.rows) {
          if (row.size() != arity)
            throw UnknownEntity("INSERT arity mismatch for " + in.table);
          for (const auto& e : row) check_constant_expr(*e);
        }
        break;
      }
      case SqlStatement::Kind::Select:
        resolve_select(*st.select, cat);
        break;
      case SqlStatement::Kind::Pragma:
      case SqlStatement::Kind::Raw:
        break;
    }
  }
  return cat;
}

}  // namespace cf::sql
