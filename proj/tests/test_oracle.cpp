#include <doctest.h>

#include "clausefuzz/minidb/minidb.hpp"
#include "clausefuzz/oracle/oracle.hpp"
#include "clausefuzz/sql/parser.hpp"

using namespace cf;
using namespace cf::oracle;

static sql::SeedCase seed_of(const std::string& text) {
  return sql::make_seed(sql::parse(text));
}

TEST_CASE("norec rewrites the final filtered select into a projected predicate") {
  auto seed = seed_of("CREATE TABLE t0(c0); SELECT c0 FROM t0 WHERE c0 > 1;");
  OraclePlan p = plan_norec(seed);
  REQUIRE(p.applicable);
  REQUIRE(p.variants.size() == 1);
  std::string v = p.variants[0].render();
  CHECK(v.find("WHERE") == std::string::npos);
  CHECK(v.find("c0 > 1") != std::string::npos);
  CHECK(p.combiner == Combiner::TrueRowCount);
}

TEST_CASE("norec is inapplicable without a WHERE clause") {
  auto seed = seed_of("CREATE TABLE t0(c0); SELECT c0 FROM t0;");
  CHECK_FALSE(plan_norec(seed).applicable);
}

TEST_CASE("tlp partitions the predicate into true/false/null branches") {
  auto seed = seed_of("CREATE TABLE t0(c0); SELECT c0 FROM t0 WHERE c0 > 1;");
  OraclePlan p = plan_tlp(seed);
  REQUIRE(p.applicable);
  CHECK(p.variants.size() == 3);
  CHECK(p.variants[0].render().find("IS TRUE") != std::string::npos);
  CHECK(p.variants[1].render().find("IS FALSE") != std::string::npos);
  CHECK(p.variants[2].render().find("IS NULL") != std::string::npos);
  CHECK(p.combiner == Combiner::MultisetUnion);
}

TEST_CASE("tlp uses set union for DISTINCT selects") {
  auto seed = seed_of("CREATE TABLE t0(c0); SELECT DISTINCT c0 FROM t0 WHERE c0 > 1;");
  OraclePlan p = plan_tlp(seed);
  REQUIRE(p.applicable);
  CHECK(p.combiner == Combiner::SetUnion);
}

TEST_CASE("index oracle inserts fresh CREATE INDEX statements") {
  auto seed = seed_of("CREATE TABLE t0(c0, c1); SELECT c0 FROM t0 WHERE c0 > 1;");
  sql::Rng rng(1);
  OraclePlan p = plan_index(seed, rng);
  REQUIRE(p.applicable);
  REQUIRE(p.variants.size() == 1);
  std::string v = p.variants[0].render();
  CHECK(v.find("CREATE INDEX") != std::string::npos);
  CHECK(p.combiner == Combiner::Identity);
}

TEST_CASE("rowid oracle adds WITHOUT ROWID to primary-key tables") {
  auto seed = seed_of("CREATE TABLE t0(c0 PRIMARY KEY); SELECT c0 FROM t0 WHERE c0 > 0;");
  OraclePlan p = plan_rowid(seed);
  REQUIRE(p.applicable);
  CHECK(p.variants[0].render().find("WITHOUT ROWID") != std::string::npos);
  auto nopk = seed_of("CREATE TABLE t0(c0); SELECT c0 FROM t0 WHERE c0 > 0;");
  CHECK_FALSE(plan_rowid(nopk).applicable);
}

TEST_CASE("likely oracle wraps the final predicate") {
  auto seed = seed_of("CREATE TABLE t0(c0); SELECT c0 FROM t0 WHERE c0 > 1;");
  OraclePlan p = plan_likely(seed);
  REQUIRE(p.applicable);
  CHECK(p.variants[0].render().find("LIKELY(") != std::string::npos);
}

TEST_CASE("verdicts on clean minidb pass for the bug fixtures' shapes") {
  minidb::MiniDb db;
  sql::Rng rng(7);
  auto seed = seed_of(
      "CREATE TABLE t0(c0 COLLATE NOCASE, c1);"
      "CREATE INDEX i0 ON t0(c0) WHERE c0 >= c1;"
      "INSERT INTO t0 VALUES ('a', 'B');"
      "SELECT * FROM t0 WHERE t0.c1 <= t0.c0;");
  for (auto v : run_oracles(seed, all_oracles(), db, rng))
    CHECK(v.status != OracleVerdict::Status::Mismatch);
}

TEST_CASE("flagged minidb yields a mismatch with rendered evidence") {
  minidb::MiniDb db({minidb::BugFlag::NocasePartialIndex});
  sql::Rng rng(7);
  auto seed = seed_of(
      "CREATE TABLE t0(c0 COLLATE NOCASE, c1);"
      "CREATE INDEX i0 ON t0(c0) WHERE c0 >= c1;"
      "INSERT INTO t0 VALUES ('a', 'B');"
      "SELECT * FROM t0 WHERE t0.c1 <= t0.c0;");
  bool mismatch = false;
  for (auto v : run_oracles(seed, all_oracles(), db, rng))
    if (v.status == OracleVerdict::Status::Mismatch) {
      mismatch = true;
      CHECK(v.original_result != v.variant_result);
      CHECK_FALSE(v.original_sql.empty());
    }
  CHECK(mismatch);
}

TEST_CASE("oracle names roundtrip") {
  for (OracleKind k : all_oracles()) {
    auto back = oracle_from_name(oracle_name(k));
    REQUIRE(back.has_value());
    CHECK(*back == k);
  }
  CHECK_FALSE(oracle_from_name("bogus").has_value());
}
