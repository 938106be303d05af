#include "clausefuzz/sql/generate.hpp"

#include <algorithm>

namespace cf::sql {
namespace {

int rint(Rng& rng, int lo, int hi) {  // inclusive
  return int(rng() % uint64_t(hi - lo + 1)) + lo;
}

bool chance(Rng& rng, double p) { return (rng() >> 11) * 0x1.0p-53 < p; }

const char* kTextPool[] = {"a", "B", "ab", "AB", "x", "Y", "abc", "aBc", " z", ""};

std::unique_ptr<Expr> int_literal(int64_t v) {
  // the parser folds negated numeric literals, so emit them folded too
  return make_literal(Value::integer(v));
}

std::unique_ptr<Expr> random_literal(Rng& rng) {
  switch (rint(rng, 0, 9)) {
    case 0: return make_literal(Value::null());
    case 1: case 2: case 3: case 4:
      return int_literal(rint(rng, -3, 12));
    case 5:
      return make_literal(Value::real(rint(rng, -4, 8) * 0.5 + 0.25));
    default:
      return make_literal(Value::text(kTextPool[rint(rng, 0, 9)]));
  }
}

BinOp random_cmp(Rng& rng) {
  static const BinOp ops[] = {BinOp::Eq, BinOp::Ne, BinOp::Lt,
                              BinOp::Le, BinOp::Gt, BinOp::Ge};
  return ops[rint(rng, 0, 5)];
}

struct TableInfo {
  std::string name;
  std::vector<std::string> columns;
};

std::unique_ptr<Expr> col_ref(Rng& rng, const TableInfo& t, bool qualify) {
  const std::string& c = t.columns[rint(rng, 0, int(t.columns.size()) - 1)];
  return make_column(qualify ? t.name : "", c);
}

std::unique_ptr<Expr> comparison(Rng& rng, const TableInfo& t, const GenProfile& prof) {
  auto lhs = col_ref(rng, t, chance(rng, 0.5));
  if (prof.cast && chance(rng, 0.15)) {
    auto c = std::make_unique<Expr>();
    c->kind = Expr::Kind::Cast;
    static const char* types[] = {"INTEGER", "TEXT", "REAL", "NUMERIC"};
    c->cast_type = types[rint(rng, 0, 3)];
    c->kids.push_back(std::move(lhs));
    lhs = std::move(c);
  }
  std::unique_ptr<Expr> rhs;
  if (chance(rng, 0.45)) rhs = col_ref(rng, t, chance(rng, 0.5));
  else rhs = random_literal(rng);
  return make_binary(random_cmp(rng), std::move(lhs), std::move(rhs));
}

std::unique_ptr<Expr> predicate(Rng& rng, const TableInfo& t, const GenProfile& prof,
                                const std::vector<TableInfo>& all, int depth) {
  int pick = rint(rng, 0, 19);
  if (depth > 0 && pick < 4) {
    BinOp op = pick < 2 ? BinOp::And : BinOp::Or;
    return make_binary(op, predicate(rng, t, prof, all, depth - 1),
                       predicate(rng, t, prof, all, depth - 1));
  }
  if (prof.in_list && pick == 4) {
    auto e = std::make_unique<Expr>();
    e->kind = Expr::Kind::InList;
    e->kids.push_back(col_ref(rng, t, chance(rng, 0.5)));
    int n = rint(rng, 1, 3);
    for (int i = 0; i < n; ++i) e->kids.push_back(random_literal(rng));
    return e;
  }
  if (prof.like && pick == 5) {
    auto e = std::make_unique<Expr>();
    e->kind = Expr::Kind::Like;
    e->kids.push_back(col_ref(rng, t, chance(rng, 0.5)));
    static const char* pats[] = {"a%", "%b", "_", "a_c", "%", "AB%"};
    e->kids.push_back(make_literal(Value::text(pats[rint(rng, 0, 5)])));
    return e;
  }
  if (pick == 6) {
    auto e = std::make_unique<Expr>();
    e->kind = Expr::Kind::Truth;
    static const TruthOp ops[] = {TruthOp::IsTrue, TruthOp::IsFalse, TruthOp::IsNull,
                                  TruthOp::NotNull};
    e->truth_op = ops[rint(rng, 0, 3)];
    e->kids.push_back(col_ref(rng, t, chance(rng, 0.5)));
    return e;
  }
  if (prof.exists && pick == 7 && !all.empty()) {
    const TableInfo& other = all[rng() % all.size()];
    auto e = std::make_unique<Expr>();
    e->kind = Expr::Kind::Exists;
    e->negated = chance(rng, 0.3);
    auto sub = std::make_unique<Select>();
    SelectItem it;
    it.star = true;
    sub->items.push_back(std::move(it));
    sub->from = other.name;
    if (chance(rng, 0.7)) sub->where = comparison(rng, other, prof);
    e->sub = std::move(sub);
    return e;
  }
  if (pick == 8) return make_unary(UnOp::Not, comparison(rng, t, prof));
  return comparison(rng, t, prof);
}

}  // namespace

SeedCase generate(const Catalog& base, Rng& rng, const GenProfile& prof) {
  if (!prof.any_enabled()) throw ProfileEmpty();

  StatementList out;
  std::vector<TableInfo> tables;
  // local partial-index predicates, kept for the mirror trick below
  struct IdxPred {
    std::string table;
    const Expr* pred;
  };
  std::vector<IdxPred> partials;
  int name_salt = 0;
  auto fresh = [&](const char* prefix) {
    std::string n;
    do {
      n = prefix + std::to_string(name_salt++);
    } while (base.name_taken(n));
    return n;
  };

  int ntables = prof.ddl ? rint(rng, 1, std::max(1, prof.max_tables)) : 0;
  for (int ti = 0; ti < ntables; ++ti) {
    auto ct = std::make_unique<CreateTable>();
    ct->name = fresh("t");
    int ncols = rint(rng, 2, std::max(2, prof.max_columns));
    bool pk_used = false;
    for (int ci = 0; ci < ncols; ++ci) {
      ColumnDef c;
      c.name = "c" + std::to_string(ci);
      static const char* types[] = {"", "", "INT", "TEXT", "REAL"};
      c.decl_type = types[rint(rng, 0, 4)];
      if (prof.nocase && chance(rng, 0.3)) c.collation = Collation::Nocase;
      if (prof.primary_key && !pk_used && chance(rng, 0.25)) {
        c.primary_key = true;
        pk_used = true;
      }
      ct->columns.push_back(std::move(c));
    }
    if (prof.without_rowid && pk_used && chance(rng, 0.25)) ct->without_rowid = true;
    TableInfo info;
    info.name = ct->name;
    for (const auto& c : ct->columns) info.columns.push_back(c.name);
    tables.push_back(std::move(info));
    SqlStatement st;
    st.kind = SqlStatement::Kind::CreateTable;
    st.create_table = std::move(ct);
    out.push_back(std::move(st));
  }

  // indexes
  if (prof.indexes) {
    for (const auto& t : tables) {
      int n = rint(rng, 0, 2);
      for (int k = 0; k < n; ++k) {
        auto ci = std::make_unique<CreateIndex>();
        ci->name = fresh("i");
        ci->table = t.name;
        ci->columns.push_back(t.columns[rng() % t.columns.size()]);
        if (t.columns.size() > 1 && chance(rng, 0.3)) {
          std::string c2 = t.columns[rng() % t.columns.size()];
          if (c2 != ci->columns[0]) ci->columns.push_back(c2);
        }
        if (prof.partial_index && chance(rng, 0.5)) {
          // column-vs-column predicates make the index usability check
          // interesting; column-vs-constant keeps variety
          if (t.columns.size() > 1 && chance(rng, 0.7)) {
            auto a = make_column("", t.columns[rng() % t.columns.size()]);
            std::string bcol;
            do {
              bcol = t.columns[rng() % t.columns.size()];
            } while (bcol == a->column);
            ci->where = make_binary(random_cmp(rng), std::move(a), make_column("", bcol));
          } else {
            ci->where = make_binary(random_cmp(rng),
                                    make_column("", t.columns[rng() % t.columns.size()]),
                                    random_literal(rng));
          }
          partials.push_back({t.name, ci->where.get()});
        }
        SqlStatement st;
        st.kind = SqlStatement::Kind::CreateIndex;
        st.create_index = std::move(ci);
        out.push_back(std::move(st));
      }
    }
  }

  // inserts
  for (const auto& t : tables) {
    int nstmts = rint(rng, 1, 2);
    for (int s = 0; s < nstmts; ++s) {
      auto in = std::make_unique<Insert>();
      in->table = t.name;
      int nrows = rint(rng, 1, std::max(1, prof.max_insert_rows));
      for (int r = 0; r < nrows; ++r) {
        std::vector<std::unique_ptr<Expr>> row;
        // all-text rows exercise collation-sensitive comparisons between columns
        bool text_row = chance(rng, 0.35);
        for (size_t c = 0; c < t.columns.size(); ++c)
          row.push_back(text_row ? make_literal(Value::text(kTextPool[rint(rng, 0, 9)]))
                                 : random_literal(rng));
        in->rows.push_back(std::move(row));
      }
      SqlStatement st;
      st.kind = SqlStatement::Kind::Insert;
      st.insert = std::move(in);
      out.push_back(std::move(st));
    }
  }

  // optional view over an aggregate
  std::vector<std::string> view_names;
  if (prof.view_agg && !tables.empty() && chance(rng, 0.3)) {
    const TableInfo& t = tables[rng() % tables.size()];
    auto cv = std::make_unique<CreateView>();
    cv->name = fresh("v");
    auto sel = std::make_unique<Select>();
    auto agg = std::make_unique<Expr>();
    agg->kind = Expr::Kind::Agg;
    agg->agg = AggFn::Min;
    agg->kids.push_back(col_ref(rng, t, false));
    SelectItem it0;
    it0.expr = std::move(agg);
    it0.alias = "m0";
    sel->items.push_back(std::move(it0));
    SelectItem it1;
    it1.expr = col_ref(rng, t, false);
    it1.alias = "m1";
    sel->items.push_back(std::move(it1));
    sel->from = t.name;
    if (chance(rng, 0.6)) {
      auto e = std::make_unique<Expr>();
      e->kind = Expr::Kind::Truth;
      e->truth_op = chance(rng, 0.5) ? TruthOp::IsNull : TruthOp::NotNull;
      e->kids.push_back(col_ref(rng, t, false));
      sel->where = std::move(e);
    }
    view_names.push_back(cv->name);
    cv->select = std::move(sel);
    SqlStatement st;
    st.kind = SqlStatement::Kind::CreateView;
    st.create_view = std::move(cv);
    out.push_back(std::move(st));
  }

  if (prof.pragma && chance(rng, 0.2)) {
    SqlStatement st;
    st.kind = SqlStatement::Kind::Pragma;
    st.pragma = std::make_unique<Pragma>();
    st.pragma->name = chance(rng, 0.5) ? "case_sensitive_like" : "reverse_unordered_selects";
    st.pragma->value = chance(rng, 0.5) ? "1" : "0";
    out.push_back(std::move(st));
  }

  // queries
  if (prof.selects && !tables.empty()) {
    int nsel = rint(rng, 1, std::max(1, prof.max_selects));
    for (int s = 0; s < nsel; ++s) {
      auto sel = std::make_unique<Select>();
      bool from_view = !view_names.empty() && chance(rng, 0.35);
      const TableInfo& t = tables[rng() % tables.size()];
      TableInfo view_info;
      const TableInfo* src = &t;
      if (from_view) {
        view_info.name = view_names[rng() % view_names.size()];
        view_info.columns = {"m0", "m1"};
        src = &view_info;
        sel->from = view_info.name;
      } else {
        sel->from = t.name;
      }
      if (prof.distinct && chance(rng, 0.3)) sel->distinct = true;
      if (chance(rng, 0.55)) {
        SelectItem it;
        it.star = true;
        sel->items.push_back(std::move(it));
      } else {
        int n = rint(rng, 1, int(src->columns.size()));
        for (int i = 0; i < n; ++i) {
          SelectItem it;
          it.expr = col_ref(rng, *src, chance(rng, 0.5));
          sel->items.push_back(std::move(it));
        }
      }
      if (chance(rng, 0.85)) {
        // occasionally mirror a partial-index predicate; comparisons written
        // backwards against an index are fertile ground for planner checks
        const IdxPred* mp = nullptr;
        if (!from_view && !partials.empty() && chance(rng, 0.25)) {
          const IdxPred& cand = partials[rng() % partials.size()];
          if (cand.table == src->name && cand.pred->kind == Expr::Kind::Binary &&
              is_comparison(cand.pred->bin_op))
            mp = &cand;
        }
        if (mp) {
          sel->where = make_binary(mirror(mp->pred->bin_op), mp->pred->kids[1]->clone(),
                                   mp->pred->kids[0]->clone());
        } else {
          sel->where = predicate(rng, *src, prof, tables, 1);
        }
        if (prof.likely && chance(rng, 0.1)) {
          auto w = std::make_unique<Expr>();
          w->kind = Expr::Kind::Wrap;
          w->wrap = chance(rng, 0.8) ? Wrapper::Likely : Wrapper::Unlikely;
          w->kids.push_back(std::move(sel->where));
          sel->where = std::move(w);
        }
      }
      if (prof.order_by && chance(rng, 0.3)) {
        OrderTerm ot;
        ot.expr = col_ref(rng, *src, false);
        ot.desc = chance(rng, 0.4);
        sel->order_by.push_back(std::move(ot));
      }
      SqlStatement st;
      st.kind = SqlStatement::Kind::Select;
      st.select = std::move(sel);
      out.push_back(std::move(st));
    }
  }

  // validity gate: resolve everything, bind slots
  build_catalog(out);
  return make_seed(std::move(out));
}

}  // namespace cf::sql
