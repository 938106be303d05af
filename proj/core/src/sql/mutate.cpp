#include <algorithm>
#include <cctype>
#include <functional>

#include "clausefuzz/sql/generate.hpp"

namespace cf::sql {
namespace {

constexpr int kRetryBound = 16;  // draws before giving up on a round

int rint(Rng& rng, int lo, int hi) {
  return int(rng() % uint64_t(hi - lo + 1)) + lo;
}

bool chance(Rng& rng, double p) { return (rng() >> 11) * 0x1.0p-53 < p; }

void collect_exprs(Expr* e, std::vector<Expr*>& out) {
  out.push_back(e);
  for (auto& k : e->kids) collect_exprs(k.get(), out);
  if (e->sub) {
    if (e->sub->where) collect_exprs(e->sub->where.get(), out);
  }
}

std::vector<Expr*> statement_exprs(SqlStatement& st) {
  std::vector<Expr*> out;
  switch (st.kind) {
    case SqlStatement::Kind::Select: {
      for (auto& it : st.select->items)
        if (it.expr) collect_exprs(it.expr.get(), out);
      if (st.select->where) collect_exprs(st.select->where.get(), out);
      for (auto& o : st.select->order_by) collect_exprs(o.expr.get(), out);
      break;
    }
    case SqlStatement::Kind::CreateIndex:
      if (st.create_index->where) collect_exprs(st.create_index->where.get(), out);
      break;
    case SqlStatement::Kind::Insert:
      for (auto& row : st.insert->rows)
        for (auto& e : row) collect_exprs(e.get(), out);
      break;
    default:
      break;
  }
  return out;
}

template <typename Pred>
Expr* pick_expr(StatementList& stmts, Rng& rng, Pred pred) {
  std::vector<Expr*> cands;
  for (auto& st : stmts) {
    for (Expr* e : statement_exprs(st))
      if (pred(e)) cands.push_back(e);
  }
  if (cands.empty()) return nullptr;
  return cands[rng() % cands.size()];
}

Select* pick_select(StatementList& stmts, Rng& rng) {
  std::vector<Select*> cands;
  for (auto& st : stmts)
    if (st.kind == SqlStatement::Kind::Select) cands.push_back(st.select.get());
  if (cands.empty()) return nullptr;
  return cands[rng() % cands.size()];
}

struct EditResult {
  bool applied = false;
  const char* tag = "";
};

EditResult apply_edit(StatementList& stmts, const Catalog& cat, Rng& rng) {
  EditResult r;
  int op = rint(rng, 0, 14);
  switch (op) {
    case 0: {  // swap comparison operands, mirroring the operator
      Expr* e = pick_expr(stmts, rng, [](Expr* x) {
        return x->kind == Expr::Kind::Binary && is_comparison(x->bin_op);
      });
      if (!e) break;
      std::swap(e->kids[0], e->kids[1]);
      e->bin_op = mirror(e->bin_op);
      r = {true, "swap-operands"};
      break;
    }
    case 1: {  // change comparison operator
      Expr* e = pick_expr(stmts, rng, [](Expr* x) {
        return x->kind == Expr::Kind::Binary && is_comparison(x->bin_op);
      });
      if (!e) break;
      static const BinOp ops[] = {BinOp::Eq, BinOp::Ne, BinOp::Lt,
                                  BinOp::Le, BinOp::Gt, BinOp::Ge};
      e->bin_op = ops[rng() % 6];
      r = {true, "change-op"};
      break;
    }
    case 2: {  // perturb a constant
      Expr* e = pick_expr(stmts, rng, [](Expr* x) {
        return x->kind == Expr::Kind::Literal && !x->lit.is_null();
      });
      if (!e) break;
      if (e->lit.is_int())
        e->lit = Value::integer(e->lit.as_int() + rint(rng, -3, 3));
      else if (e->lit.is_real())
        e->lit = Value::real(e->lit.as_real() + rint(rng, -2, 2) * 0.5);
      else {
        std::string s = e->lit.as_text();
        if (!s.empty() && chance(rng, 0.6)) {
          size_t i = rng() % s.size();
          s[i] = std::isupper((unsigned char)s[i]) ? std::tolower((unsigned char)s[i])
                                                   : std::toupper((unsigned char)s[i]);
        } else {
          s += char('a' + rng() % 26);
        }
        e->lit = Value::text(s);
      }
      r = {true, "perturb-const"};
      break;
    }
    case 3: {  // substitute a column within its table
      Expr* e = pick_expr(stmts, rng, [](Expr* x) {
        return x->kind == Expr::Kind::Column && x->res_table >= 0;
      });
      if (!e || cat.tables.empty()) break;
      const auto& t = cat.tables[e->res_table];
      if (t.columns.size() < 2) break;
      e->column = t.columns[rng() % t.columns.size()].name;
      r = {true, "swap-column"};
      break;
    }
    case 4: {  // toggle DISTINCT
      Select* s = pick_select(stmts, rng);
      if (!s) break;
      s->distinct = !s->distinct;
      r = {true, "toggle-distinct"};
      break;
    }
    case 5: {  // add or drop ORDER BY
      Select* s = pick_select(stmts, rng);
      if (!s) break;
      if (!s->order_by.empty()) {
        s->order_by.clear();
        r = {true, "drop-orderby"};
      } else if (!s->from.empty()) {
        const CatalogTable* t = cat.find_table(s->from);
        const CatalogView* v = t ? nullptr : cat.find_view(s->from);
        OrderTerm ot;
        if (t)
          ot.expr = make_column("", t->columns[rng() % t->columns.size()].name);
        else if (v && !v->column_names.empty())
          ot.expr = make_column("", v->column_names[rng() % v->column_names.size()]);
        else
          break;
        ot.desc = chance(rng, 0.4);
        s->order_by.push_back(std::move(ot));
        r = {true, "add-orderby"};
      }
      break;
    }
    case 6: {  // wrap or unwrap LIKELY on a WHERE clause
      Select* s = pick_select(stmts, rng);
      if (!s || !s->where) break;
      if (s->where->kind == Expr::Kind::Wrap) {
        s->where = std::move(s->where->kids[0]);
        r = {true, "unwrap-likely"};
      } else {
        auto w = std::make_unique<Expr>();
        w->kind = Expr::Kind::Wrap;
        w->wrap = chance(rng, 0.8) ? Wrapper::Likely : Wrapper::Unlikely;
        w->kids.push_back(std::move(s->where));
        s->where = std::move(w);
        r = {true, "wrap-likely"};
      }
      break;
    }
    case 7: {  // insert a CREATE INDEX before the final statement
      if (cat.tables.empty()) break;
      const auto& t = cat.tables[rng() % cat.tables.size()];
      auto ci = std::make_unique<CreateIndex>();
      int salt = 0;
      do {
        ci->name = "im" + std::to_string(salt++);
        bool taken = false;
        for (const auto& ix : cat.indexes) taken |= ix.name == ci->name;
        for (const auto& st : stmts)
          if (st.kind == SqlStatement::Kind::CreateIndex)
            taken |= st.create_index->name == ci->name;
        if (!taken) break;
      } while (salt < 64);
      ci->table = t.name;
      ci->columns.push_back(t.columns[rng() % t.columns.size()].name);
      if (t.columns.size() > 1 && chance(rng, 0.5)) {
        auto a = make_column("", t.columns[rng() % t.columns.size()].name);
        std::string b;
        do {
          b = t.columns[rng() % t.columns.size()].name;
        } while (b == a->column);
        static const BinOp ops[] = {BinOp::Le, BinOp::Ge, BinOp::Lt, BinOp::Gt,
                                    BinOp::Eq, BinOp::Ne};
        ci->where = make_binary(ops[rng() % 6], std::move(a), make_column("", b));
      }
      SqlStatement st;
      st.kind = SqlStatement::Kind::CreateIndex;
      st.create_index = std::move(ci);
      // place after the table DDL, before queries
      size_t pos = stmts.size();
      for (size_t i = 0; i < stmts.size(); ++i) {
        if (stmts[i].kind == SqlStatement::Kind::Select) {
          pos = i;
          break;
        }
      }
      stmts.insert(stmts.begin() + pos, std::move(st));
      r = {true, "add-index"};
      break;
    }
    case 8: {  // drop an index statement
      std::vector<size_t> idxs;
      for (size_t i = 0; i < stmts.size(); ++i)
        if (stmts[i].kind == SqlStatement::Kind::CreateIndex) idxs.push_back(i);
      if (idxs.empty()) break;
      stmts.erase(stmts.begin() + idxs[rng() % idxs.size()]);
      r = {true, "drop-index"};
      break;
    }
    case 9: {  // append a row to an INSERT
      std::vector<Insert*> ins;
      for (auto& st : stmts)
        if (st.kind == SqlStatement::Kind::Insert) ins.push_back(st.insert.get());
      if (ins.empty()) break;
      Insert* in = ins[rng() % ins.size()];
      if (in->rows.empty()) break;
      std::vector<std::unique_ptr<Expr>> row;
      for (size_t c = 0; c < in->rows[0].size(); ++c) {
        switch (rint(rng, 0, 5)) {
          case 0: row.push_back(make_literal(Value::null())); break;
          case 1: row.push_back(make_literal(Value::integer(rint(rng, 0, 12)))); break;
          case 2: row.push_back(make_literal(Value::real(rint(rng, 0, 9) * 0.5))); break;
          default: {
            static const char* pool[] = {"a", "B", "ab", "AB", "x", "Y"};
            row.push_back(make_literal(Value::text(pool[rng() % 6])));
          }
        }
      }
      in->rows.push_back(std::move(row));
      r = {true, "add-row"};
      break;
    }
    case 10: {  // rewrite a WHERE clause as the mirror of an index predicate
      Select* s = pick_select(stmts, rng);
      if (!s || s->from.empty()) break;
      std::vector<const Expr*> preds;
      for (const auto& ix : cat.indexes)
        if (ix.table == s->from && ix.partial_predicate &&
            ix.partial_predicate->kind == Expr::Kind::Binary &&
            is_comparison(ix.partial_predicate->bin_op))
          preds.push_back(ix.partial_predicate);
      if (preds.empty()) break;
      const Expr* p = preds[rng() % preds.size()];
      s->where = make_binary(mirror(p->bin_op), p->kids[1]->clone(), p->kids[0]->clone());
      r = {true, "mirror-index-pred"};
      break;
    }
    case 11: {  // drop or regrow a WHERE clause
      Select* s = pick_select(stmts, rng);
      if (!s) break;
      if (s->where && chance(rng, 0.5)) {
        s->where.reset();
        r = {true, "drop-where"};
      } else if (!s->from.empty()) {
        const CatalogTable* t = cat.find_table(s->from);
        if (!t || t->columns.empty()) break;
        auto lhs = make_column("", t->columns[rng() % t->columns.size()].name);
        static const BinOp ops[] = {BinOp::Eq, BinOp::Ne, BinOp::Lt,
                                    BinOp::Le, BinOp::Gt, BinOp::Ge};
        std::unique_ptr<Expr> rhs;
        if (t->columns.size() > 1 && chance(rng, 0.5))
          rhs = make_column("", t->columns[rng() % t->columns.size()].name);
        else
          rhs = make_literal(Value::integer(rint(rng, 0, 9)));
        s->where = make_binary(ops[rng() % 6], std::move(lhs), std::move(rhs));
        r = {true, "new-where"};
      }
      break;
    }
    case 12: {  // negate a predicate node
      Expr* e = pick_expr(stmts, rng, [](Expr* x) {
        return x->kind == Expr::Kind::Binary && is_comparison(x->bin_op);
      });
      if (!e) break;
      auto inner = std::make_unique<Expr>();
      *inner = std::move(*e);
      e->kind = Expr::Kind::Unary;
      e->un_op = UnOp::Not;
      e->kids.clear();
      e->kids.push_back(std::move(inner));
      e->sub.reset();
      r = {true, "negate"};
      break;
    }
    case 14: {  // toggle NOCASE collation on a column
      std::vector<ColumnDef*> cols;
      for (auto& st : stmts)
        if (st.kind == SqlStatement::Kind::CreateTable)
          for (auto& c : st.create_table->columns) cols.push_back(&c);
      if (cols.empty()) break;
      ColumnDef* c = cols[rng() % cols.size()];
      c->collation = c->collation == Collation::Nocase ? Collation::Binary : Collation::Nocase;
      r = {true, "toggle-collation"};
      break;
    }
    case 13: {  // swap two adjacent inserts (statement order shuffle)
      std::vector<size_t> ins;
      for (size_t i = 0; i < stmts.size(); ++i)
        if (stmts[i].kind == SqlStatement::Kind::Insert) ins.push_back(i);
      if (ins.size() < 2) break;
      size_t k = rng() % (ins.size() - 1);
      std::swap(stmts[ins[k]], stmts[ins[k + 1]]);
      r = {true, "swap-inserts"};
      break;
    }
  }
  return r;
}

}  // namespace

SeedCase mutate(const SeedCase& seed, int rounds, Rng& rng) {
  SeedCase cur = seed.clone();
  std::string tags;
  for (int round = 0; round < rounds; ++round) {
    bool done = false;
    for (int attempt = 0; attempt < kRetryBound && !done; ++attempt) {
      StatementList trial = clone_statements(cur.statements);
      Catalog cat;
      try {
        cat = build_catalog(trial);
      } catch (const CatalogError&) {
        break;  // should not happen for valid seeds
      }
      EditResult er = apply_edit(trial, cat, rng);
      if (!er.applied) continue;
      try {
        build_catalog(trial);
      } catch (const CatalogError&) {
        continue;  // edit broke validity; draw another
      }
      cur.statements = std::move(trial);
      if (!tags.empty()) tags += ',';
      tags += er.tag;
      done = true;
    }
  }
  SeedCase out = make_seed(std::move(cur.statements));
  out.parent_id = seed.id;
  out.mutation_tag = tags.empty() ? "noop" : tags;
  return out;
}

}  // namespace cf::sql
