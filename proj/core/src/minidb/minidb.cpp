#include "clausefuzz/minidb/minidb.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>

#include "clausefuzz/dist/trace.hpp"

namespace cf::minidb {
namespace {

using sql::AggFn;
using sql::BinOp;
using sql::Expr;
using sql::Select;
using sql::TruthOp;
using sql::UnOp;
using sql::Wrapper;

enum Fn : dist::FunctionId {
  ExecScript = 0,
  ExecCreateTable,
  ExecCreateIndex,
  ExecCreateView,
  ExecInsert,
  ExecSelect,
  ViewExpand,
  WhereBegin,
  UsablePartialIndex,
  ExprImplies,
  ExprCompare,
  FullScan,
  IndexScan,
  WhereEval,
  EvalExpr,
  ApplyCollation,
  CompareValues,
  CastApply,
  LikeEval,
  InEval,
  ExistsEval,
  LikelyEval,
  DistinctFilter,
  SortRows,
  AggMin,
  AggCount,
  AggTotal,
  ExecPragma,
  FnCount,
};

const char* kFnNames[FnCount] = {
    "exec_script",     "exec_create_table", "exec_create_index", "exec_create_view",
    "exec_insert",     "exec_select",       "view_expand",       "where_begin",
    "usable_partial_index", "expr_implies", "expr_compare",      "full_scan",
    "index_scan",      "where_eval",        "eval_expr",         "apply_collation",
    "compare_values",  "cast_apply",        "like_eval",         "in_eval",
    "exists_eval",     "likely_eval",       "distinct_filter",   "sort_rows",
    "agg_min",         "agg_count",         "agg_total",         "exec_pragma",
};

struct Site {
  Fn caller;
  int block;
  Fn callee;
};

// Every call event the evaluator can emit comes from this table, so the
// static graph contains every dynamic trace by construction.
const Site kSites[] = {
    {ExecScript, 1, ExecCreateTable},
    {ExecScript, 2, ExecCreateIndex},
    {ExecScript, 3, ExecCreateView},
    {ExecScript, 4, ExecInsert},
    {ExecScript, 5, ExecSelect},
    {ExecScript, 6, ExecPragma},
    {ExecInsert, 1, EvalExpr},
    {ExecSelect, 1, ViewExpand},
    {ExecSelect, 2, WhereBegin},
    {ExecSelect, 3, FullScan},
    {ExecSelect, 4, IndexScan},
    {ExecSelect, 5, WhereEval},
    {ExecSelect, 6, EvalExpr},
    {ExecSelect, 7, DistinctFilter},
    {ExecSelect, 8, SortRows},
    {ExecSelect, 9, AggMin},
    {ExecSelect, 10, AggCount},
    {ExecSelect, 11, AggTotal},
    {ViewExpand, 1, ExecSelect},
    {WhereBegin, 1, UsablePartialIndex},
    {UsablePartialIndex, 1, ExprImplies},
    {ExprImplies, 1, ExprCompare},
    {ExprImplies, 2, ApplyCollation},
    {IndexScan, 1, EvalExpr},
    {WhereEval, 1, EvalExpr},
    {EvalExpr, 1, EvalExpr},
    {EvalExpr, 2, ApplyCollation},
    {EvalExpr, 3, CompareValues},
    {EvalExpr, 4, CastApply},
    {EvalExpr, 5, LikeEval},
    {EvalExpr, 6, InEval},
    {EvalExpr, 7, ExistsEval},
    {EvalExpr, 8, LikelyEval},
    {ExistsEval, 1, ExecSelect},
    {InEval, 1, CompareValues},
    {LikelyEval, 1, EvalExpr},
    {SortRows, 1, CompareValues},
    {AggMin, 1, CompareValues},
};

// Block ids are globally unique: the table stores per-function slot numbers
// and the wire id is caller * 100 + slot.
int global_block(const Site& s) { return int(s.caller) * 100 + s.block; }

int block_of(Fn caller, Fn callee) {
  for (const Site& s : kSites)
    if (s.caller == caller && s.callee == callee) return global_block(s);
  return -1;
}

struct ExecError {
  std::string message;
};

struct SourceCol {
  std::string name;
  Collation collation = Collation::Binary;
};

/// One scan source: a table's or view's output columns plus the current row.
struct RowCtx {
  std::string source;  // table or view name ("" = no FROM)
  std::vector<SourceCol> cols;
  const std::vector<Value>* row = nullptr;
  bool in_where = false;

  int col_index(const std::string& qualifier, const std::string& name) const {
    if (!qualifier.empty() && qualifier != source) return -1;
    for (size_t i = 0; i < cols.size(); ++i)
      if (cols[i].name == name) return int(i);
    return -1;
  }
};

struct Exec {
  MiniDb& db;
  std::map<std::string, MiniDb::Table>& tables;
  std::map<std::string, MiniDb::Index>& indexes;
  std::map<std::string, MiniDb::View>& views;
  const std::set<BugFlag>& bugs;
  dist::Trace trace;

  bool bug(BugFlag f) const { return bugs.count(f) > 0; }

  void call(Fn caller, Fn callee) {
    dist::TraceEvent ev;
    ev.kind = dist::TraceEvent::Kind::Call;
    ev.caller = caller;
    ev.block = block_of(caller, callee);
    ev.callee = callee;
    trace.push_back(ev);
  }
  void touch(Fn fn, const char* tag) {
    dist::TraceEvent ev;
    ev.kind = dist::TraceEvent::Kind::Touch;
    ev.fn = fn;
    ev.tag = tag;
    trace.push_back(ev);
  }
  void ret(Fn fn) {
    dist::TraceEvent ev;
    ev.kind = dist::TraceEvent::Kind::Return;
    ev.fn = fn;
    trace.push_back(ev);
  }

  struct Scope {
    Exec& e;
    Fn fn;
    Scope(Exec& e, Fn fn) : e(e), fn(fn) {}
    ~Scope() { e.ret(fn); }
  };

  // ---- DDL / DML ----

  void create_table(const sql::CreateTable& ct) {
    Scope sc(*this, ExecCreateTable);
    if (tables.count(ct.name) || views.count(ct.name))
      throw ExecError{"name already used: " + ct.name};
    MiniDb::Table t;
    t.name = ct.name;
    t.columns = ct.columns;
    t.without_rowid = ct.without_rowid;
    touch(ExecCreateTable, "pTab->aCol");
    for (const auto& c : ct.columns)
      if (c.primary_key) t.has_pk = true;
    if (!ct.table_pk.empty()) t.has_pk = true;
    if (t.has_pk) touch(ExecCreateTable, "pPk");
    if (ct.without_rowid) {
      if (!t.has_pk) throw ExecError{"WITHOUT ROWID table needs a PRIMARY KEY"};
      touch(ExecCreateTable, "TF_WithoutRowid");
    }
    tables.emplace(t.name, std::move(t));
  }

  void create_index(const sql::CreateIndex& ci) {
    Scope sc(*this, ExecCreateIndex);
    if (indexes.count(ci.name)) throw ExecError{"index already exists: " + ci.name};
    auto it = tables.find(ci.table);
    if (it == tables.end()) throw ExecError{"no such table: " + ci.table};
    for (const auto& c : ci.columns) {
      bool found = false;
      for (const auto& col : it->second.columns)
        if (col.name == c) found = true;
      if (!found) throw ExecError{"no such column: " + c};
    }
    MiniDb::Index ix;
    ix.name = ci.name;
    ix.table = ci.table;
    ix.columns = ci.columns;
    if (ci.where) {
      touch(ExecCreateIndex, "pWhere");
      ix.partial = ci.where->clone();
    }
    indexes.emplace(ix.name, std::move(ix));
  }

  void create_view(const sql::CreateView& cv) {
    Scope sc(*this, ExecCreateView);
    if (tables.count(cv.name) || views.count(cv.name))
      throw ExecError{"name already used: " + cv.name};
    MiniDb::View v;
    v.name = cv.name;
    v.select = cv.select->clone();
    views.emplace(v.name, std::move(v));
  }

  void insert(const sql::Insert& in) {
    Scope sc(*this, ExecInsert);
    auto it = tables.find(in.table);
    if (it == tables.end()) throw ExecError{"no such table: " + in.table};
    MiniDb::Table& t = it->second;
    touch(ExecInsert, "ppVal");
    std::vector<int> slots;
    if (in.columns.empty()) {
      for (size_t i = 0; i < t.columns.size(); ++i) slots.push_back(int(i));
    } else {
      for (const auto& c : in.columns) {
        int idx = -1;
        for (size_t i = 0; i < t.columns.size(); ++i)
          if (t.columns[i].name == c) idx = int(i);
        if (idx < 0) throw ExecError{"no such column: " + c};
        slots.push_back(idx);
      }
    }
    RowCtx ctx;  // constants only
    for (const auto& exprs : in.rows) {
      if (exprs.size() != slots.size()) throw ExecError{"value count mismatch"};
      std::vector<Value> row(t.columns.size());
      for (size_t i = 0; i < exprs.size(); ++i) {
        call(ExecInsert, EvalExpr);
        row[slots[i]] = eval(*exprs[i], ctx);
      }
      t.rows.push_back(std::move(row));
    }
  }

  // ---- planner ----

  // A column operand always supplies its collation, BINARY included; casts
  // and literals supply none.
  std::optional<Collation> operand_collation(const Expr& e, const RowCtx& ctx) const {
    switch (e.kind) {
      case Expr::Kind::Column: {
        int i = ctx.col_index(e.table, e.column);
        if (i < 0) return std::nullopt;
        return ctx.cols[i].collation;
      }
      case Expr::Kind::Unary:
      case Expr::Kind::Wrap:
        return operand_collation(*e.kids[0], ctx);
      default:
        return std::nullopt;
    }
  }

  Collation collation_or_binary(const Expr& e, const RowCtx& ctx) const {
    return operand_collation(e, ctx).value_or(Collation::Binary);
  }

  Collation apply_collation(const Expr& cmp, const RowCtx& ctx) {
    Scope sc(*this, ApplyCollation);
    touch(ApplyCollation, "TK_COLLATE");
    // the left operand's collation wins when it has one
    if (auto l = operand_collation(*cmp.kids[0], ctx)) return *l;
    return collation_or_binary(*cmp.kids[1], ctx);
  }

  // Structural comparison, ignoring table qualifiers: inside a single-source
  // scan, `t0.c1` and `c1` name the same column.
  static bool same_expr(const Expr& a, const Expr& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
      case Expr::Kind::Literal:
        if (a.lit.is_null() != b.lit.is_null()) return false;
        if (a.lit.render() != b.lit.render()) return false;
        break;
      case Expr::Kind::Column:
        if (a.column != b.column) return false;
        break;
      case Expr::Kind::Unary:
        if (a.un_op != b.un_op) return false;
        break;
      case Expr::Kind::Binary:
        if (a.bin_op != b.bin_op) return false;
        break;
      case Expr::Kind::Truth:
        if (a.truth_op != b.truth_op) return false;
        break;
      case Expr::Kind::Cast:
        if (a.cast_type != b.cast_type) return false;
        break;
      case Expr::Kind::Agg:
        if (a.agg != b.agg || a.star != b.star) return false;
        break;
      case Expr::Kind::Wrap:
        if (a.wrap != b.wrap) return false;
        break;
      case Expr::Kind::Exists:
        return false;  // subqueries never participate in implication
      default:
        break;
    }
    if (a.negated != b.negated) return false;
    if (a.kids.size() != b.kids.size()) return false;
    for (size_t i = 0; i < a.kids.size(); ++i)
      if (!same_expr(*a.kids[i], *b.kids[i])) return false;
    return true;
  }

  bool expr_compare(const Expr& a, const Expr& b) {
    Scope sc(*this, ExprCompare);
    touch(ExprCompare, "pExpr->op");
    return same_expr(a, b);
  }

  bool expr_implies(const Expr& where, const Expr& pred, const RowCtx& ctx) {
    Scope sc(*this, ExprImplies);
    touch(ExprImplies, "pWhere");
    call(ExprImplies, ExprCompare);
    bool implied = expr_compare(where, pred);
    bool mirrored = false;
    if (!implied && where.kind == Expr::Kind::Binary && pred.kind == Expr::Kind::Binary &&
        sql::is_comparison(where.bin_op) && sql::is_comparison(pred.bin_op) &&
        where.bin_op == sql::mirror(pred.bin_op)) {
      call(ExprImplies, ExprCompare);
      mirrored = expr_compare(*where.kids[0], *pred.kids[1]);
      if (mirrored) {
        call(ExprImplies, ExprCompare);
        mirrored = expr_compare(*where.kids[1], *pred.kids[0]);
      }
      implied = mirrored;
    }
    if (!implied) return false;
    if (!bug(BugFlag::NocasePartialIndex)) {
      call(ExprImplies, ApplyCollation);
      Collation cw = apply_collation(where, ctx);
      call(ExprImplies, ApplyCollation);
      Collation cp = apply_collation(pred, ctx);
      if (cw != cp) return false;
    }
    return true;
  }

  bool usable_partial_index(const Expr& where, const MiniDb::Index& ix, const RowCtx& ctx) {
    Scope sc(*this, UsablePartialIndex);
    touch(UsablePartialIndex, "pWhere");
    // each AND conjunct is an independent implication candidate
    std::vector<const Expr*> terms{&where};
    for (size_t i = 0; i < terms.size(); ++i) {
      if (terms[i]->kind == Expr::Kind::Binary && terms[i]->bin_op == sql::BinOp::And) {
        const Expr* e = terms[i];
        terms[i] = e->kids[0].get();
        terms.push_back(e->kids[1].get());
        --i;
      }
    }
    for (const Expr* term : terms) {
      if (term->kind != Expr::Kind::Binary || !sql::is_comparison(term->bin_op)) continue;
      call(UsablePartialIndex, ExprImplies);
      if (expr_implies(*term, *ix.partial, ctx)) return true;
    }
    return false;
  }

  /// Picks an access path for a table scan under `where`. Returns the chosen
  /// partial index or null (full scan / plain index scan).
  const MiniDb::Index* where_begin(const MiniDb::Table& t, const Expr* where,
                                   const RowCtx& ctx, bool& plain_index) {
    Scope sc(*this, WhereBegin);
    touch(WhereBegin, "pWhere");
    plain_index = false;
    const MiniDb::Index* chosen = nullptr;
    for (const auto& [name, ix] : indexes) {
      if (ix.table != t.name) continue;
      if (ix.partial) {
        if (where) {
          call(WhereBegin, UsablePartialIndex);
          if (usable_partial_index(*where, ix, ctx) && !chosen) chosen = &ix;
        }
      } else if (!chosen && !plain_index && where) {
        plain_index = references_column(*where, ix.columns[0]);
      }
    }
    return chosen;
  }

  static bool references_column(const Expr& e, const std::string& col) {
    if (e.kind == Expr::Kind::Column && e.column == col) return true;
    for (const auto& k : e.kids)
      if (k && references_column(*k, col)) return true;
    return false;
  }

  bool table_has_partial_index(const std::string& table) const {
    for (const auto& [name, ix] : indexes)
      if (ix.table == table && ix.partial) return true;
    return false;
  }

  // ---- expression evaluation ----

  Value compare_values(const Value& a, const Value& b, BinOp op, Collation coll) {
    Scope sc(*this, CompareValues);
    if (a.is_null() || b.is_null()) return Value::null();
    int c = value_compare(a, b, coll);
    bool r = false;
    switch (op) {
      case BinOp::Eq: r = c == 0; break;
      case BinOp::Ne: r = c != 0; break;
      case BinOp::Lt: r = c < 0; break;
      case BinOp::Le: r = c <= 0; break;
      case BinOp::Gt: r = c > 0; break;
      case BinOp::Ge: r = c >= 0; break;
      default: throw ExecError{"not a comparison"};
    }
    return Value::integer(r ? 1 : 0);
  }

  Value cast_apply(const Value& v, const std::string& type, bool in_where) {
    Scope sc(*this, CastApply);
    touch(CastApply, "TK_CAST");
    touch(CastApply, "affinity");
    std::string t;
    for (char c : type) t += char(std::toupper(static_cast<unsigned char>(c)));
    bool to_int = t.find("INT") != std::string::npos;
    bool to_real = t.find("REAL") != std::string::npos || t.find("FLOA") != std::string::npos ||
                   t.find("DOUB") != std::string::npos;
    bool to_num = t.find("NUMERIC") != std::string::npos;
    bool to_text = t.find("CHAR") != std::string::npos || t.find("TEXT") != std::string::npos ||
                   t.find("CLOB") != std::string::npos;
    if (v.is_null()) return v;
    if (to_text) return Value::text(v.render());
    if (!(to_int || to_real || to_num)) return v;
    if (v.is_text()) {
      if (bug(BugFlag::CastAffinity) && in_where) return Value::null();
      const std::string& s = v.as_text();
      char* end = nullptr;
      double d = std::strtod(s.c_str(), &end);
      if (end == s.c_str()) d = 0.0;
      if (to_int) return Value::integer(int64_t(std::trunc(d)));
      if (to_real) return Value::real(d);
      double tr = std::trunc(d);
      return tr == d ? Value::integer(int64_t(tr)) : Value::real(d);
    }
    if (to_int) return v.is_int() ? v : Value::integer(int64_t(std::trunc(v.as_real())));
    if (to_real) return Value::real(v.numeric());
    return v;  // NUMERIC keeps numeric values as they are
  }

  Value like_eval(const Value& lhs, const Value& pat) {
    Scope sc(*this, LikeEval);
    touch(LikeEval, "SQLITE_FUNC_LIKE");
    if (lhs.is_null() || pat.is_null()) return Value::null();
    std::string s = lhs.is_text() ? lhs.as_text() : lhs.render();
    std::string p = pat.is_text() ? pat.as_text() : pat.render();
    return Value::integer(like_match(p, 0, s, 0) ? 1 : 0);
  }

  static bool like_match(const std::string& p, size_t pi, const std::string& s, size_t si) {
    auto lower = [](char c) { return char(std::tolower(static_cast<unsigned char>(c))); };
    while (pi < p.size()) {
      char pc = p[pi];
      if (pc == '%') {
        ++pi;
        if (pi == p.size()) return true;
        for (size_t k = si; k <= s.size(); ++k)
          if (like_match(p, pi, s, k)) return true;
        return false;
      }
      if (si == s.size()) return false;
      if (pc != '_' && lower(pc) != lower(s[si])) return false;
      ++pi;
      ++si;
    }
    return si == s.size();
  }

  Value in_eval(const Expr& e, const RowCtx& ctx) {
    Scope sc(*this, InEval);
    touch(InEval, "TK_IN");
    Value lhs = eval_traced(InEval, *e.kids[0], ctx);
    Collation coll = collation_or_binary(*e.kids[0], ctx);
    bool saw_null = lhs.is_null();
    bool hit = false;
    for (size_t i = 1; i < e.kids.size(); ++i) {
      Value m = eval_traced(InEval, *e.kids[i], ctx);
      call(InEval, CompareValues);
      Value c = compare_values(lhs, m, BinOp::Eq, coll);
      if (c.is_null()) saw_null = true;
      else if (c.as_int() == 1) hit = true;
    }
    Truth t = hit ? Truth::True : (saw_null ? Truth::Null : Truth::False);
    if (e.negated) t = truth_not(t);
    return truth_value(t);
  }

  // InEval and LikelyEval re-enter eval via their own declared sites; the
  // generic path below emits EvalExpr->EvalExpr.
  Value eval_traced(Fn caller, const Expr& e, const RowCtx& ctx) {
    (void)caller;
    return eval(e, ctx);
  }

  static Value truth_value(Truth t) {
    switch (t) {
      case Truth::True: return Value::integer(1);
      case Truth::False: return Value::integer(0);
      default: return Value::null();
    }
  }

  Value likely_eval(const Expr& e, const RowCtx& ctx) {
    Scope sc(*this, LikelyEval);
    touch(LikelyEval, "EP_Unlikely");
    call(LikelyEval, EvalExpr);
    Value v = eval(*e.kids[0], ctx);
    if (bug(BugFlag::LikelyDropsRow) && e.wrap == Wrapper::Likely && ctx.in_where &&
        v.to_truth() == Truth::True && table_has_partial_index(ctx.source))
      return Value::integer(0);
    return v;  // planner hint, semantically transparent
  }

  Value exists_eval(const Expr& e, const RowCtx& ctx) {
    Scope sc(*this, ExistsEval);
    touch(ExistsEval, "TK_EXISTS");
    call(ExistsEval, ExecSelect);
    QueryResult r = exec_select(*e.sub);
    bool nonempty = !r.rows.empty();
    if (e.negated) nonempty = !nonempty;
    return Value::integer(nonempty ? 1 : 0);
  }

  Value eval(const Expr& e, const RowCtx& ctx) {
    Scope sc(*this, EvalExpr);
    switch (e.kind) {
      case Expr::Kind::Literal:
        return e.lit;
      case Expr::Kind::Column: {
        int i = ctx.col_index(e.table, e.column);
        if (i < 0 || !ctx.row)
          throw ExecError{"no such column: " +
                          (e.table.empty() ? e.column : e.table + "." + e.column)};
        return (*ctx.row)[size_t(i)];
      }
      case Expr::Kind::Unary: {
        call(EvalExpr, EvalExpr);
        Value k = eval(*e.kids[0], ctx);
        if (e.un_op == UnOp::Not) return truth_value(truth_not(k.to_truth()));
        if (k.is_null()) return k;
        if (k.is_int()) return Value::integer(-k.as_int());
        if (k.is_real()) return Value::real(-k.as_real());
        return Value::integer(0);  // -'text' collapses like its numeric prefix
      }
      case Expr::Kind::Binary: {
        if (e.bin_op == BinOp::And || e.bin_op == BinOp::Or) {
          call(EvalExpr, EvalExpr);
          Truth a = eval(*e.kids[0], ctx).to_truth();
          call(EvalExpr, EvalExpr);
          Truth b = eval(*e.kids[1], ctx).to_truth();
          return truth_value(e.bin_op == BinOp::And ? truth_and(a, b) : truth_or(a, b));
        }
        call(EvalExpr, EvalExpr);
        Value l = eval(*e.kids[0], ctx);
        call(EvalExpr, EvalExpr);
        Value r = eval(*e.kids[1], ctx);
        call(EvalExpr, ApplyCollation);
        Collation coll = apply_collation(e, ctx);
        call(EvalExpr, CompareValues);
        return compare_values(l, r, e.bin_op, coll);
      }
      case Expr::Kind::Truth: {
        call(EvalExpr, EvalExpr);
        Value k = eval(*e.kids[0], ctx);
        switch (e.truth_op) {
          case TruthOp::IsTrue: return Value::integer(k.to_truth() == Truth::True);
          case TruthOp::IsFalse: return Value::integer(k.to_truth() == Truth::False);
          case TruthOp::IsNull: return Value::integer(k.is_null() ? 1 : 0);
          case TruthOp::NotNull: return Value::integer(k.is_null() ? 0 : 1);
        }
        return Value::null();
      }
      case Expr::Kind::Cast: {
        call(EvalExpr, EvalExpr);
        Value k = eval(*e.kids[0], ctx);
        call(EvalExpr, CastApply);
        return cast_apply(k, e.cast_type, ctx.in_where);
      }
      case Expr::Kind::Like: {
        call(EvalExpr, EvalExpr);
        Value l = eval(*e.kids[0], ctx);
        call(EvalExpr, EvalExpr);
        Value p = eval(*e.kids[1], ctx);
        call(EvalExpr, LikeEval);
        Value r = like_eval(l, p);
        if (e.negated && !r.is_null()) return Value::integer(r.as_int() ? 0 : 1);
        return r;
      }
      case Expr::Kind::InList:
        call(EvalExpr, InEval);
        return in_eval(e, ctx);
      case Expr::Kind::Exists:
        call(EvalExpr, ExistsEval);
        return exists_eval(e, ctx);
      case Expr::Kind::Wrap:
        call(EvalExpr, LikelyEval);
        return likely_eval(e, ctx);
      case Expr::Kind::Agg:
      case Expr::Kind::Star:
        throw ExecError{"aggregate or * outside a projection"};
    }
    throw ExecError{"unhandled expression"};
  }

  // ---- SELECT ----

  Truth where_eval(const Expr& where, const RowCtx& ctx) {
    Scope sc(*this, WhereEval);
    call(WhereEval, EvalExpr);
    RowCtx wc = ctx;
    wc.in_where = true;
    return eval(where, wc).to_truth();
  }

  static bool contains_kind(const Expr& e, Expr::Kind k) {
    if (e.kind == k) return true;
    for (const auto& kid : e.kids)
      if (kid && contains_kind(*kid, k)) return true;
    return false;
  }

  static bool is_aggregate_item(const sql::SelectItem& it) {
    return it.expr && it.expr->kind == Expr::Kind::Agg;
  }

  std::vector<std::vector<Value>> distinct_filter(std::vector<std::vector<Value>> rows) {
    Scope sc(*this, DistinctFilter);
    touch(DistinctFilter, "EP_Distinct");
    if (bug(BugFlag::DistinctIgnore)) return rows;
    std::vector<std::vector<Value>> out;
    std::set<std::string> seen;
    for (auto& r : rows) {
      std::string k;
      for (const auto& v : r) {
        k += v.is_null() ? "\x01" : v.render();
        k += '\x02';
      }
      if (seen.insert(k).second) out.push_back(std::move(r));
    }
    return out;
  }

  void sort_rows(std::vector<std::vector<Value>>& rows, std::vector<std::vector<Value>>& keys,
                 const std::vector<bool>& desc) {
    Scope sc(*this, SortRows);
    touch(SortRows, "orderBy");
    call(SortRows, CompareValues);
    std::vector<size_t> order(rows.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
      for (size_t k = 0; k < desc.size(); ++k) {
        int c = value_compare(keys[a][k], keys[b][k], Collation::Binary);
        if (c != 0) return desc[k] ? c > 0 : c < 0;
      }
      return false;
    });
    std::vector<std::vector<Value>> sorted;
    sorted.reserve(rows.size());
    for (size_t i : order) sorted.push_back(std::move(rows[i]));
    rows = std::move(sorted);
  }

  QueryResult view_expand(const MiniDb::View& v, bool outer_has_where) {
    Scope sc(*this, ViewExpand);
    call(ViewExpand, ExecSelect);
    QueryResult r = exec_select(*v.select);
    if (bug(BugFlag::MinNullRow) && outer_has_where) {
      bool has_min = false;
      for (const auto& it : v.select->items)
        if (it.expr && it.expr->kind == Expr::Kind::Agg && it.expr->agg == AggFn::Min)
          has_min = true;
      if (has_min) {
        for (auto& row : r.rows)
          for (size_t i = 0; i < v.select->items.size() && i < row.size(); ++i)
            if (!is_aggregate_item(v.select->items[i])) row[i] = Value::null();
      }
    }
    return r;
  }

  std::vector<SourceCol> view_columns(const MiniDb::View& v) {
    std::vector<SourceCol> cols;
    int anon = 0;
    for (const auto& it : v.select->items) {
      SourceCol c;
      if (!it.alias.empty()) c.name = it.alias;
      else if (it.expr && it.expr->kind == Expr::Kind::Column) c.name = it.expr->column;
      else c.name = "expr" + std::to_string(anon++);
      cols.push_back(std::move(c));
    }
    return cols;
  }

  Value agg_min(const Expr& agg, const RowCtx& ctx,
                const std::vector<const std::vector<Value>*>& rows, size_t& min_row) {
    Scope sc(*this, AggMin);
    touch(AggMin, "aggMin");
    Collation coll = collation_or_binary(*agg.kids[0], ctx);
    Value best = Value::null();
    for (size_t i = 0; i < rows.size(); ++i) {
      RowCtx rc = ctx;
      rc.row = rows[i];
      Value v = eval(*agg.kids[0], rc);
      if (v.is_null()) continue;
      call(AggMin, CompareValues);
      if (best.is_null() || value_compare(v, best, coll) < 0) {
        best = v;
        min_row = i;
      }
    }
    return best;
  }

  Value agg_count(const Expr& agg, const RowCtx& ctx,
                  const std::vector<const std::vector<Value>*>& rows) {
    Scope sc(*this, AggCount);
    if (agg.star) return Value::integer(int64_t(rows.size()));
    int64_t n = 0;
    for (const auto* r : rows) {
      RowCtx rc = ctx;
      rc.row = r;
      if (!eval(*agg.kids[0], rc).is_null()) ++n;
    }
    return Value::integer(n);
  }

  Value agg_total(const Expr& agg, const RowCtx& ctx,
                  const std::vector<const std::vector<Value>*>& rows) {
    Scope sc(*this, AggTotal);
    double sum = 0.0;
    for (const auto* r : rows) {
      RowCtx rc = ctx;
      rc.row = r;
      Value v = eval(*agg.kids[0], rc);
      if (v.is_numeric()) sum += v.numeric();
    }
    return Value::real(sum);
  }

  QueryResult exec_select(const Select& s) {
    Scope sc(*this, ExecSelect);
    QueryResult out;

    // resolve the source
    RowCtx ctx;
    std::vector<std::vector<Value>> src_rows;
    const MiniDb::Table* table = nullptr;
    if (!s.from.empty()) {
      auto ti = tables.find(s.from);
      if (ti != tables.end()) {
        table = &ti->second;
        ctx.source = table->name;
        for (const auto& c : table->columns) ctx.cols.push_back({c.name, c.collation});
        src_rows = table->rows;
      } else {
        auto vi = views.find(s.from);
        if (vi == views.end()) throw ExecError{"no such table: " + s.from};
        touch(ExecSelect, "pSelTab");
        call(ExecSelect, ViewExpand);
        QueryResult vr = view_expand(vi->second, s.where != nullptr);
        ctx.source = vi->second.name;
        ctx.cols = view_columns(vi->second);
        src_rows = std::move(vr.rows);
      }
    }

    // access path (tables only)
    if (table && s.where) {
      bool plain_index = false;
      call(ExecSelect, WhereBegin);
      const MiniDb::Index* partial = where_begin(*table, s.where.get(), ctx, plain_index);
      if (partial) {
        call(ExecSelect, IndexScan);
        Scope is(*this, IndexScan);
        std::vector<std::vector<Value>> kept;
        for (const auto& row : src_rows) {
          RowCtx rc = ctx;
          rc.row = &row;
          call(IndexScan, EvalExpr);
          if (eval(*partial->partial, rc).to_truth() == Truth::True) kept.push_back(row);
        }
        src_rows = std::move(kept);
      } else if (plain_index) {
        call(ExecSelect, IndexScan);
        Scope is(*this, IndexScan);  // covering scan, same row set
      } else {
        call(ExecSelect, FullScan);
        Scope fs(*this, FullScan);
      }
    } else if (table) {
      call(ExecSelect, FullScan);
      Scope fs(*this, FullScan);
    }

    // WHERE filter
    std::vector<std::vector<Value>> filtered;
    if (s.from.empty()) {
      // the one implicit row of a FROM-less SELECT
      std::vector<Value> implicit;
      bool keep = true;
      if (s.where) {
        RowCtx rc = ctx;
        rc.row = &implicit;
        call(ExecSelect, WhereEval);
        keep = where_eval(*s.where, rc) == Truth::True;
      }
      if (keep) filtered.push_back({});
    } else if (s.where) {
      for (const auto& row : src_rows) {
        RowCtx rc = ctx;
        rc.row = &row;
        call(ExecSelect, WhereEval);
        if (where_eval(*s.where, rc) == Truth::True) filtered.push_back(row);
      }
    } else {
      filtered = std::move(src_rows);
    }

    // projection
    bool aggregate = false;
    for (const auto& it : s.items)
      if (is_aggregate_item(it)) aggregate = true;

    size_t ncols = 0;
    for (const auto& it : s.items) ncols += it.star ? ctx.cols.size() : 1;
    out.columns = ncols;

    if (aggregate) {
      std::vector<const std::vector<Value>*> rp;
      for (const auto& r : filtered) rp.push_back(&r);
      size_t chosen = filtered.empty() ? size_t(-1) : filtered.size() - 1;
      std::vector<Value> aggs(s.items.size());
      for (size_t i = 0; i < s.items.size(); ++i) {
        const auto& it = s.items[i];
        if (!is_aggregate_item(it)) continue;
        const Expr& a = *it.expr;
        switch (a.agg) {
          case AggFn::Min: {
            size_t mr = chosen;
            call(ExecSelect, AggMin);
            aggs[i] = agg_min(a, ctx, rp, mr);
            if (!aggs[i].is_null()) chosen = mr;
            break;
          }
          case AggFn::Count:
            call(ExecSelect, AggCount);
            aggs[i] = agg_count(a, ctx, rp);
            break;
          case AggFn::Total:
            call(ExecSelect, AggTotal);
            aggs[i] = agg_total(a, ctx, rp);
            break;
        }
      }
      std::vector<Value> row;
      for (size_t i = 0; i < s.items.size(); ++i) {
        const auto& it = s.items[i];
        if (it.star) throw ExecError{"* mixed with aggregates is unsupported"};
        if (is_aggregate_item(it)) {
          row.push_back(aggs[i]);
        } else if (chosen != size_t(-1)) {
          RowCtx rc = ctx;
          rc.row = &filtered[chosen];
          call(ExecSelect, EvalExpr);
          row.push_back(eval(*it.expr, rc));
        } else {
          row.push_back(Value::null());
        }
      }
      out.rows.push_back(std::move(row));
      return out;
    }

    std::vector<std::vector<Value>> proj;
    std::vector<std::vector<Value>> keys;
    std::vector<bool> desc;
    for (const auto& ot : s.order_by) desc.push_back(ot.desc);
    for (const auto& row : filtered) {
      RowCtx rc = ctx;
      rc.row = &row;
      std::vector<Value> prow;
      for (const auto& it : s.items) {
        if (it.star) {
          for (const auto& v : row) prow.push_back(v);
        } else {
          call(ExecSelect, EvalExpr);
          prow.push_back(eval(*it.expr, rc));
        }
      }
      proj.push_back(std::move(prow));
      if (!s.order_by.empty()) {
        std::vector<Value> k;
        for (const auto& ot : s.order_by) {
          call(ExecSelect, EvalExpr);
          k.push_back(eval(*ot.expr, rc));
        }
        keys.push_back(std::move(k));
      }
    }

    if (s.distinct) {
      call(ExecSelect, DistinctFilter);
      if (s.order_by.empty()) {
        proj = distinct_filter(std::move(proj));
      } else {
        // keep order keys aligned while deduplicating
        std::vector<std::vector<Value>> dproj, dkeys;
        std::set<std::string> seen;
        Scope dsc(*this, DistinctFilter);
        touch(DistinctFilter, "EP_Distinct");
        for (size_t i = 0; i < proj.size(); ++i) {
          std::string k;
          for (const auto& v : proj[i]) {
            k += v.is_null() ? "\x01" : v.render();
            k += '\x02';
          }
          if (bug(BugFlag::DistinctIgnore) || seen.insert(k).second) {
            dproj.push_back(std::move(proj[i]));
            dkeys.push_back(std::move(keys[i]));
          }
        }
        proj = std::move(dproj);
        keys = std::move(dkeys);
      }
    }

    if (!s.order_by.empty()) {
      call(ExecSelect, SortRows);
      sort_rows(proj, keys, desc);
      out.ordered = true;
      if (bug(BugFlag::OrderInEarlyOut) && s.where &&
          contains_kind(*s.where, Expr::Kind::InList) && proj.size() > 1)
        proj.resize(1);
    }

    out.rows = std::move(proj);
    return out;
  }
};

}  // namespace

const char* bug_flag_name(BugFlag f) {
  switch (f) {
    case BugFlag::NocasePartialIndex: return "BUG_NOCASE_PARTIAL_INDEX";
    case BugFlag::DistinctIgnore: return "BUG_DISTINCT_IGNORE";
    case BugFlag::LikelyDropsRow: return "BUG_LIKELY_DROPS_ROW";
    case BugFlag::CastAffinity: return "BUG_CAST_AFFINITY";
    case BugFlag::MinNullRow: return "BUG_MIN_NULL_ROW";
    case BugFlag::OrderInEarlyOut: return "BUG_ORDER_IN_EARLY_OUT";
  }
  return "?";
}

const std::vector<BugFlag>& all_bug_flags() {
  static const std::vector<BugFlag> flags = {
      BugFlag::NocasePartialIndex, BugFlag::DistinctIgnore, BugFlag::LikelyDropsRow,
      BugFlag::CastAffinity,       BugFlag::MinNullRow,     BugFlag::OrderInEarlyOut,
  };
  return flags;
}

int bug_flag_from_name(const std::string& name) {
  for (BugFlag f : all_bug_flags())
    if (name == bug_flag_name(f)) return int(f);
  return -1;
}

const char* bug_flag_pattern(BugFlag f) {
  switch (f) {
    case BugFlag::NocasePartialIndex: return "minidb/nocase-partial-index";
    case BugFlag::DistinctIgnore: return "minidb/distinct-ignored";
    case BugFlag::LikelyDropsRow: return "minidb/likely-partial-index";
    case BugFlag::CastAffinity: return "minidb/cast-affinity";
    case BugFlag::MinNullRow: return "minidb/min-null-row";
    case BugFlag::OrderInEarlyOut: return "minidb/in-orderby";
  }
  return "?";
}

void MiniDb::reset() {
  tables_.clear();
  indexes_.clear();
  views_.clear();
}

ExecutionOutcome MiniDb::execute(const sql::StatementList& statements) {
  Exec ex{*this, tables_, indexes_, views_, bugs_, {}};
  ExecutionOutcome out;
  for (const auto& st : statements) {
    try {
      switch (st.kind) {
        case sql::SqlStatement::Kind::CreateTable:
          ex.call(ExecScript, ExecCreateTable);
          ex.create_table(*st.create_table);
          out.results.push_back(StatementResult::done());
          break;
        case sql::SqlStatement::Kind::CreateIndex:
          ex.call(ExecScript, ExecCreateIndex);
          ex.create_index(*st.create_index);
          out.results.push_back(StatementResult::done());
          break;
        case sql::SqlStatement::Kind::CreateView:
          ex.call(ExecScript, ExecCreateView);
          ex.create_view(*st.create_view);
          out.results.push_back(StatementResult::done());
          break;
        case sql::SqlStatement::Kind::Insert:
          ex.call(ExecScript, ExecInsert);
          ex.insert(*st.insert);
          out.results.push_back(StatementResult::done());
          break;
        case sql::SqlStatement::Kind::Select: {
          ex.call(ExecScript, ExecSelect);
          QueryResult r = ex.exec_select(*st.select);
          out.results.push_back(StatementResult::rows(std::move(r)));
          break;
        }
        case sql::SqlStatement::Kind::Pragma: {
          ex.call(ExecScript, ExecPragma);
          Exec::Scope sc(ex, ExecPragma);
          out.results.push_back(StatementResult::done());  // accepted, no effect
          break;
        }
        case sql::SqlStatement::Kind::Raw:
          out.results.push_back(StatementResult::fail("unsupported statement"));
          break;
      }
    } catch (const ExecError& e) {
      out.results.push_back(StatementResult::fail(e.message));
    }
  }
  out.trace = std::move(ex.trace);
  out.edges = dist::extract_ctl(out.trace).edges;
  return out;
}

dist::CallGraph MiniDb::call_graph() {
  dist::CallGraph g;
  for (int i = 0; i < FnCount; ++i) g.add_function(i, kFnNames[i]);
  std::set<std::pair<int, int>> edges;
  for (const Site& s : kSites) {
    g.add_block(s.caller, global_block(s), s.callee);
    edges.insert({s.caller, s.callee});
  }
  for (const auto& [a, b] : edges) g.add_edge(a, b);
  return g;
}

}  // namespace cf::minidb
