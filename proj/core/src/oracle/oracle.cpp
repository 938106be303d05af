#include "clausefuzz/oracle/oracle.hpp"

#include <algorithm>
#include <set>

#include "clausefuzz/sql/catalog.hpp"

namespace cf::oracle {
namespace {

using sql::Expr;
using sql::SeedCase;
using sql::Select;
using sql::SqlStatement;
using sql::StatementList;

int final_select(const StatementList& stmts) {
  for (int i = int(stmts.size()) - 1; i >= 0; --i)
    if (stmts[size_t(i)].kind == SqlStatement::Kind::Select) return i;
  return -1;
}

bool has_aggregate(const Select& s) {
  for (const auto& it : s.items)
    if (it.expr && it.expr->kind == Expr::Kind::Agg) return true;
  return false;
}

/// Clones, revalidates and wraps a variant statement list; empty optional when
/// the edit broke catalog validity.
std::optional<SeedCase> finish_variant(StatementList stmts) {
  try {
    sql::build_catalog(stmts);
  } catch (const sql::CatalogError&) {
    return std::nullopt;
  }
  return sql::make_seed(std::move(stmts));
}

int rint(sql::Rng& rng, int lo, int hi) {
  return int(rng() % uint64_t(hi - lo + 1)) + lo;
}

}  // namespace

const char* oracle_name(OracleKind k) {
  switch (k) {
    case OracleKind::Norec: return "norec";
    case OracleKind::Tlp: return "tlp";
    case OracleKind::Index: return "index";
    case OracleKind::Rowid: return "rowid";
    case OracleKind::Likely: return "likely";
  }
  return "?";
}

std::optional<OracleKind> oracle_from_name(const std::string& name) {
  for (OracleKind k : all_oracles())
    if (name == oracle_name(k)) return k;
  return std::nullopt;
}

const std::vector<OracleKind>& all_oracles() {
  static const std::vector<OracleKind> kinds = {
      OracleKind::Norec, OracleKind::Tlp, OracleKind::Index,
      OracleKind::Rowid, OracleKind::Likely,
  };
  return kinds;
}

const char* verdict_name(OracleVerdict::Status s) {
  switch (s) {
    case OracleVerdict::Status::Pass: return "pass";
    case OracleVerdict::Status::Mismatch: return "mismatch";
    case OracleVerdict::Status::Inapplicable: return "inapplicable";
    case OracleVerdict::Status::ExecError: return "exec-error";
  }
  return "?";
}

OraclePlan plan_norec(const SeedCase& seed) {
  int fi = final_select(seed.statements);
  if (fi < 0) return OraclePlan::inapplicable(OracleKind::Norec, "no SELECT");
  const Select& s = *seed.statements[size_t(fi)].select;
  if (!s.where) return OraclePlan::inapplicable(OracleKind::Norec, "no WHERE clause");
  if (s.distinct)
    return OraclePlan::inapplicable(OracleKind::Norec, "DISTINCT changes row counts");
  if (has_aggregate(s))
    return OraclePlan::inapplicable(OracleKind::Norec, "aggregate projection");

  StatementList vs = sql::clone_statements(seed.statements);
  Select& v = *vs[size_t(fi)].select;
  v.items.clear();
  sql::SelectItem it;
  it.expr = s.where->clone();
  v.items.push_back(std::move(it));
  v.where.reset();
  v.order_by.clear();
  v.distinct = false;
  auto variant = finish_variant(std::move(vs));
  if (!variant)
    return OraclePlan::inapplicable(OracleKind::Norec, "variant failed validation");

  OraclePlan p;
  p.kind = OracleKind::Norec;
  p.applicable = true;
  p.original = seed.clone();
  p.variants.push_back(std::move(*variant));
  p.combiner = Combiner::TrueRowCount;
  return p;
}

OraclePlan plan_tlp(const SeedCase& seed) {
  int fi = final_select(seed.statements);
  if (fi < 0) return OraclePlan::inapplicable(OracleKind::Tlp, "no SELECT");
  const Select& s = *seed.statements[size_t(fi)].select;
  if (!s.where) return OraclePlan::inapplicable(OracleKind::Tlp, "no WHERE clause");
  if (has_aggregate(s))
    return OraclePlan::inapplicable(OracleKind::Tlp, "aggregate projection");

  // the comparison base is the same SELECT with the WHERE removed
  StatementList base = sql::clone_statements(seed.statements);
  base[size_t(fi)].select->where.reset();
  auto base_seed = finish_variant(std::move(base));
  if (!base_seed)
    return OraclePlan::inapplicable(OracleKind::Tlp, "base failed validation");

  OraclePlan p;
  p.kind = OracleKind::Tlp;
  p.applicable = true;
  p.original = std::move(*base_seed);
  p.combiner = s.distinct ? Combiner::SetUnion : Combiner::MultisetUnion;

  static const sql::TruthOp kParts[] = {sql::TruthOp::IsTrue, sql::TruthOp::IsFalse,
                                        sql::TruthOp::IsNull};
  for (sql::TruthOp op : kParts) {
    StatementList vs = sql::clone_statements(seed.statements);
    Select& v = *vs[size_t(fi)].select;
    auto t = std::make_unique<Expr>();
    t->kind = Expr::Kind::Truth;
    t->truth_op = op;
    t->kids.push_back(v.where->clone());
    v.where = std::move(t);
    auto variant = finish_variant(std::move(vs));
    if (!variant)
      return OraclePlan::inapplicable(OracleKind::Tlp, "variant failed validation");
    p.variants.push_back(std::move(*variant));
  }
  return p;
}

OraclePlan plan_index(const SeedCase& seed, sql::Rng& rng) {
  StatementList probe = sql::clone_statements(seed.statements);
  sql::Catalog cat;
  try {
    cat = sql::build_catalog(probe);
  } catch (const sql::CatalogError&) {
    return OraclePlan::inapplicable(OracleKind::Index, "seed failed validation");
  }
  std::vector<const sql::CatalogTable*> candidates;
  for (const auto& t : cat.tables)
    if (!t.columns.empty()) candidates.push_back(&t);
  if (candidates.empty())
    return OraclePlan::inapplicable(OracleKind::Index, "no indexable table");

  StatementList vs = sql::clone_statements(seed.statements);
  int fi = final_select(vs);
  size_t insert_at = fi < 0 ? vs.size() : size_t(fi);
  int salt = 0;
  auto fresh = [&](const sql::StatementList& cur) {
    std::string n;
    for (;;) {
      n = "ox" + std::to_string(salt++);
      bool taken = cat.name_taken(n);
      for (const auto& st : cur)
        if (st.kind == SqlStatement::Kind::CreateIndex && st.create_index->name == n)
          taken = true;
      if (!taken) return n;
    }
  };
  static const char* kTexts[] = {"a", "B", "ab", "x"};
  int n = rint(rng, 1, 3);
  for (int k = 0; k < n; ++k) {
    const sql::CatalogTable& t = *candidates[rng() % candidates.size()];
    auto ci = std::make_unique<sql::CreateIndex>();
    ci->name = fresh(vs);
    ci->table = t.name;
    ci->columns.push_back(t.columns[rng() % t.columns.size()].name);
    if (t.columns.size() > 1 && rint(rng, 0, 2) == 0) {
      std::string c2 = t.columns[rng() % t.columns.size()].name;
      if (c2 != ci->columns[0]) ci->columns.push_back(c2);
    }
    if (rint(rng, 0, 1) == 0) {
      static const sql::BinOp ops[] = {sql::BinOp::Eq, sql::BinOp::Ne, sql::BinOp::Lt,
                                       sql::BinOp::Le, sql::BinOp::Gt, sql::BinOp::Ge};
      sql::BinOp op = ops[rint(rng, 0, 5)];
      auto lhs = sql::make_column("", t.columns[rng() % t.columns.size()].name);
      std::unique_ptr<Expr> rhs;
      if (t.columns.size() > 1 && rint(rng, 0, 9) < 7) {
        std::string c2;
        do {
          c2 = t.columns[rng() % t.columns.size()].name;
        } while (c2 == lhs->column);
        rhs = sql::make_column("", c2);
      } else if (rint(rng, 0, 1) == 0) {
        rhs = sql::make_literal(Value::integer(rint(rng, -2, 10)));
      } else {
        rhs = sql::make_literal(Value::text(kTexts[rint(rng, 0, 3)]));
      }
      ci->where = sql::make_binary(op, std::move(lhs), std::move(rhs));
    }
    SqlStatement st;
    st.kind = SqlStatement::Kind::CreateIndex;
    st.create_index = std::move(ci);
    vs.insert(vs.begin() + long(insert_at), std::move(st));
    ++insert_at;
  }
  auto variant = finish_variant(std::move(vs));
  if (!variant)
    return OraclePlan::inapplicable(OracleKind::Index, "variant failed validation");

  OraclePlan p;
  p.kind = OracleKind::Index;
  p.applicable = true;
  p.original = seed.clone();
  p.variants.push_back(std::move(*variant));
  p.combiner = Combiner::Identity;
  return p;
}

OraclePlan plan_rowid(const SeedCase& seed) {
  StatementList vs = sql::clone_statements(seed.statements);
  bool changed = false;
  for (auto& st : vs) {
    if (st.kind != SqlStatement::Kind::CreateTable) continue;
    sql::CreateTable& ct = *st.create_table;
    if (ct.without_rowid) continue;
    bool pk = !ct.table_pk.empty();
    for (const auto& c : ct.columns)
      if (c.primary_key) pk = true;
    if (!pk) continue;
    ct.without_rowid = true;
    changed = true;
  }
  if (!changed)
    return OraclePlan::inapplicable(OracleKind::Rowid, "no rowid table with a PRIMARY KEY");
  auto variant = finish_variant(std::move(vs));
  if (!variant)
    return OraclePlan::inapplicable(OracleKind::Rowid, "variant failed validation");

  OraclePlan p;
  p.kind = OracleKind::Rowid;
  p.applicable = true;
  p.original = seed.clone();
  p.variants.push_back(std::move(*variant));
  p.combiner = Combiner::Identity;
  return p;
}

OraclePlan plan_likely(const SeedCase& seed) {
  int fi = final_select(seed.statements);
  if (fi < 0) return OraclePlan::inapplicable(OracleKind::Likely, "no SELECT");
  const Select& s = *seed.statements[size_t(fi)].select;
  if (!s.where) return OraclePlan::inapplicable(OracleKind::Likely, "no WHERE clause");
  if (s.where->kind == Expr::Kind::Wrap)
    return OraclePlan::inapplicable(OracleKind::Likely, "predicate already wrapped");

  StatementList vs = sql::clone_statements(seed.statements);
  Select& v = *vs[size_t(fi)].select;
  auto w = std::make_unique<Expr>();
  w->kind = Expr::Kind::Wrap;
  w->wrap = sql::Wrapper::Likely;
  w->kids.push_back(std::move(v.where));
  v.where = std::move(w);
  auto variant = finish_variant(std::move(vs));
  if (!variant)
    return OraclePlan::inapplicable(OracleKind::Likely, "variant failed validation");

  OraclePlan p;
  p.kind = OracleKind::Likely;
  p.applicable = true;
  p.original = seed.clone();
  p.variants.push_back(std::move(*variant));
  p.combiner = Combiner::Identity;
  return p;
}

OraclePlan make_plan(OracleKind k, const SeedCase& seed, sql::Rng& rng) {
  switch (k) {
    case OracleKind::Norec: return plan_norec(seed);
    case OracleKind::Tlp: return plan_tlp(seed);
    case OracleKind::Index: return plan_index(seed, rng);
    case OracleKind::Rowid: return plan_rowid(seed);
    case OracleKind::Likely: return plan_likely(seed);
  }
  return OraclePlan::inapplicable(k, "unknown oracle");
}

namespace {

std::string row_key(const std::vector<Value>& row) {
  std::string k;
  for (const auto& v : row) {
    k += v.is_null() ? "\x01" : v.render();
    k += '\x02';
  }
  return k;
}

struct SideResult {
  bool exec_error = false;
  std::string error;
  QueryResult final_result;
  bool has_final = false;
};

SideResult run_side(const sql::SeedCase& s, TargetAdapter& adapter) {
  SideResult out;
  adapter.reset();
  ExecutionOutcome eo = adapter.execute(s.statements);
  for (const auto& r : eo.results) {
    if (!r.ok) {
      out.exec_error = true;
      out.error = r.error;
    }
    if (r.has_result) {
      out.final_result = r.result;
      out.has_final = true;
    }
  }
  return out;
}

}  // namespace

OracleVerdict run_plan(const OraclePlan& plan, TargetAdapter& adapter) {
  OracleVerdict v;
  v.kind = plan.kind;
  if (!plan.applicable) {
    v.status = OracleVerdict::Status::Inapplicable;
    v.reason = plan.reason;
    return v;
  }
  v.original_sql = plan.original.render();
  v.variant_sql = plan.variants.front().render();

  SideResult orig = run_side(plan.original, adapter);
  if (orig.exec_error || !orig.has_final) {
    v.status = OracleVerdict::Status::ExecError;
    v.reason = orig.exec_error ? "original: " + orig.error : "original produced no result";
    return v;
  }
  std::vector<SideResult> vars;
  for (const auto& var : plan.variants) {
    vars.push_back(run_side(var, adapter));
    if (vars.back().exec_error || !vars.back().has_final) {
      v.status = OracleVerdict::Status::ExecError;
      v.reason = vars.back().exec_error ? "variant: " + vars.back().error
                                        : "variant produced no result";
      return v;
    }
  }

  switch (plan.combiner) {
    case Combiner::TrueRowCount: {
      size_t want = orig.final_result.rows.size();
      size_t got = 0;
      for (const auto& row : vars[0].final_result.rows)
        if (!row.empty() && row[0].to_truth() == Truth::True) ++got;
      if (want != got) {
        v.status = OracleVerdict::Status::Mismatch;
        v.original_result = std::to_string(want) + " rows";
        v.variant_result = std::to_string(got) + " predicate-true rows";
      }
      break;
    }
    case Combiner::MultisetUnion:
    case Combiner::SetUnion: {
      QueryResult combined;
      combined.columns = orig.final_result.columns;
      std::set<std::string> seen;
      for (const auto& sr : vars) {
        for (const auto& row : sr.final_result.rows) {
          if (plan.combiner == Combiner::SetUnion && !seen.insert(row_key(row)).second)
            continue;
          combined.rows.push_back(row);
        }
      }
      if (!results_equal(orig.final_result, combined, false)) {
        v.status = OracleVerdict::Status::Mismatch;
        v.original_result = orig.final_result.render();
        v.variant_result = combined.render();
      }
      break;
    }
    case Combiner::Identity: {
      const QueryResult& a = orig.final_result;
      const QueryResult& b = vars[0].final_result;
      bool as_seq = a.ordered && b.ordered;
      if (!results_equal(a, b, as_seq)) {
        v.status = OracleVerdict::Status::Mismatch;
        v.original_result = a.render();
        v.variant_result = b.render();
      }
      break;
    }
  }
  return v;
}

std::vector<OracleVerdict> run_oracles(const sql::SeedCase& seed,
                                       const std::vector<OracleKind>& kinds,
                                       TargetAdapter& adapter, sql::Rng& rng) {
  std::vector<OracleVerdict> out;
  for (OracleKind k : kinds) out.push_back(run_plan(make_plan(k, seed, rng), adapter));
  return out;
}

}  // namespace cf::oracle
