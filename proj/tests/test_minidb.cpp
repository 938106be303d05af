#include <doctest.h>

#include <fstream>
#include <sstream>

#include "clausefuzz/minidb/minidb.hpp"
#include "clausefuzz/patterns/patterns.hpp"
#include "clausefuzz/sql/generate.hpp"
#include "clausefuzz/sql/parser.hpp"

using namespace cf;
using minidb::BugFlag;
using minidb::MiniDb;

#ifndef CF_REPO_DIR
#define CF_REPO_DIR "."
#endif

static std::string slurp(const std::string& rel) {
  std::ifstream in(std::string(CF_REPO_DIR) + "/" + rel);
  REQUIRE(in);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

static QueryResult last_result(const ExecutionOutcome& o) {
  for (auto it = o.results.rbegin(); it != o.results.rend(); ++it)
    if (it->has_result) return it->result;
  FAIL("no query result in outcome");
  return {};
}

TEST_CASE("call graph is well-formed") {
  dist::CallGraph cg = MiniDb::call_graph();
  CHECK(cg.functions().size() >= 20);
  // chain functions of the executable nocase pattern exist
  CHECK(cg.id_of("usable_partial_index") >= 0);
  CHECK(cg.id_of("expr_implies") >= 0);
  CHECK(cg.id_of("expr_compare") >= 0);
  // no block id is declared under two functions
  std::set<dist::BlockId> seen;
  for (const auto& [fn, blocks] : cg.block_table())
    for (dist::BlockId b : blocks)
      CHECK(seen.insert(b).second);
}

TEST_CASE("every traced call edge is declared in the call graph") {
  dist::CallGraph cg = MiniDb::call_graph();
  sql::Rng rng(99);
  sql::GenProfile p;
  for (int i = 0; i < 500; ++i) {
    sql::SeedCase seed = sql::generate({}, rng, p);
    MiniDb db;
    ExecutionOutcome o = db.execute(seed.statements);
    for (const auto& e : o.trace) {
      if (e.kind != dist::TraceEvent::Kind::Call) continue;
      CHECK(cg.has_edge(e.caller, e.callee));
      CHECK(cg.has_block({e.caller, e.block}));
      CHECK(cg.block_callee({e.caller, e.block}) == e.callee);
    }
  }
}

TEST_CASE("reset drops all state") {
  MiniDb db;
  auto s1 = sql::parse("CREATE TABLE t0(c0); INSERT INTO t0 VALUES (1);");
  db.execute(s1);
  db.reset();
  auto s2 = sql::parse("CREATE TABLE t0(c0); SELECT c0 FROM t0;");
  ExecutionOutcome o = db.execute(s2);
  CHECK(o.results[0].ok);  // no conflict: the old t0 is gone
  CHECK(last_result(o).rows.empty());
}

TEST_CASE("engine errors do not abort the batch") {
  MiniDb db;
  auto s = sql::parse("CREATE TABLE t0(c0); CREATE TABLE t0(c0); SELECT 1;");
  ExecutionOutcome o = db.execute(s);
  REQUIRE(o.results.size() == 3);
  CHECK(o.results[0].ok);
  CHECK_FALSE(o.results[1].ok);
  CHECK(o.results[2].has_result);
}

struct FixtureCase {
  const char* file;
  BugFlag flag;
  size_t rows_clean;
  size_t rows_buggy;
};

TEST_CASE("each bug flag flips exactly its fixture's final result") {
  const FixtureCase cases[] = {
      {"fixtures/code1.sql", BugFlag::NocasePartialIndex, 1, 0},
      {"fixtures/distinct.sql", BugFlag::DistinctIgnore, 1, 2},
      {"fixtures/cast.sql", BugFlag::CastAffinity, 1, 0},
      {"fixtures/min_view.sql", BugFlag::MinNullRow, 1, 0},
      {"fixtures/in_orderby.sql", BugFlag::OrderInEarlyOut, 3, 1},
  };
  for (const auto& c : cases) {
    CAPTURE(c.file);
    auto stmts = sql::parse(slurp(c.file));
    MiniDb clean;
    CHECK(last_result(clean.execute(stmts)).rows.size() == c.rows_clean);
    MiniDb buggy({c.flag});
    auto again = sql::parse(slurp(c.file));
    CHECK(last_result(buggy.execute(again)).rows.size() == c.rows_buggy);
  }
}

TEST_CASE("likely fixture drops its row only when LIKELY wraps the predicate") {
  std::string base = slurp("fixtures/likely.sql");
  MiniDb buggy({BugFlag::LikelyDropsRow});
  CHECK(last_result(buggy.execute(sql::parse(base))).rows.size() == 1);
  buggy.reset();
  std::string wrapped = base;
  size_t pos = wrapped.rfind("WHERE c0 >= c1");
  REQUIRE(pos != std::string::npos);
  wrapped.replace(pos, 14, "WHERE LIKELY(c0 >= c1)");
  CHECK(last_result(buggy.execute(sql::parse(wrapped))).rows.empty());
  MiniDb clean;
  CHECK(last_result(clean.execute(sql::parse(wrapped))).rows.size() == 1);
}

TEST_CASE("code 1 walks the collation chain and tags its data objects") {
  MiniDb db({BugFlag::NocasePartialIndex});
  auto stmts = sql::parse(slurp("fixtures/code1.sql"));
  ExecutionOutcome o = db.execute(stmts);
  dist::CallGraph cg = MiniDb::call_graph();
  dist::CtlExtract ctl = dist::extract_ctl(o.trace);
  std::vector<dist::FunctionId> chain{cg.id_of("usable_partial_index"),
                                      cg.id_of("expr_implies"),
                                      cg.id_of("expr_compare")};
  CHECK(cf::patterns::pattern_hit(ctl.ctl, chain));
  bool tagged = false;
  for (const auto& e : o.trace)
    if (e.kind == dist::TraceEvent::Kind::Touch && e.tag == "pWhere") tagged = true;
  CHECK(tagged);
}
