#include <doctest.h>

#include "clausefuzz/sql/catalog.hpp"
#include "clausefuzz/sql/generate.hpp"
#include "clausefuzz/sql/parser.hpp"
#include "clausefuzz/sql/printer.hpp"

using namespace cf::sql;

TEST_CASE("parse/render roundtrip on a representative script") {
  std::string text =
      "CREATE TABLE t0(c0 COLLATE NOCASE, c1 INT PRIMARY KEY);\n"
      "CREATE INDEX i0 ON t0(c0) WHERE c0 >= c1;\n"
      "INSERT INTO t0 VALUES ('a', 1), (NULL, 2);\n"
      "CREATE VIEW v0 AS SELECT MIN(c0), c1 FROM t0;\n"
      "SELECT DISTINCT c0 FROM t0 WHERE c0 IN (1, 2) ORDER BY c0 DESC;";
  StatementList a = parse(text);
  std::string rendered = render(a);
  StatementList b = parse(rendered);
  CHECK(statements_equal(a, b));
  CHECK(render(b) == rendered);  // printing is a fixpoint
}

TEST_CASE("line comments are skipped") {
  StatementList s = parse("-- header\nSELECT 1; -- trailing\n");
  CHECK(s.size() == 1);
  CHECK(s[0].kind == SqlStatement::Kind::Select);
}

TEST_CASE("trailing garbage is an error") {
  CHECK_THROWS_AS(parse("SELECT 1; garbage without semicolon"), SyntaxError);
}

TEST_CASE("statements outside the subset fall back to raw") {
  StatementList s = parse("SELECT c1 < ANY ( VALUES ROW ( 0 ) ) FROM t0;");
  REQUIRE(s.size() == 1);
  CHECK(s[0].kind == SqlStatement::Kind::Raw);
  CHECK(render(s).find("ANY") != std::string::npos);
}

TEST_CASE("catalog binds identifiers and rejects conflicts") {
  StatementList s = parse(
      "CREATE TABLE t0(c0, c1);\n"
      "SELECT c0 FROM t0 WHERE c1 > 0;");
  Catalog cat = build_catalog(s);
  REQUIRE(cat.tables.size() == 1);
  CHECK(cat.tables[0].column_index("c1") == 1);

  StatementList dup = parse("CREATE TABLE t0(c0); CREATE TABLE t0(c1);");
  CHECK_THROWS_AS(build_catalog(dup), CatalogConflict);

  StatementList bad = parse("SELECT c9 FROM nope;");
  CHECK_THROWS_AS(build_catalog(bad), UnknownEntity);
}

TEST_CASE("generated seeds roundtrip through the parser") {
  Rng rng(7);
  GenProfile profile;
  for (int i = 0; i < 300; ++i) {
    cf::sql::SeedCase seed = generate({}, rng, profile);
    std::string text = seed.render();
    StatementList back = parse(text);
    CHECK(statements_equal(seed.statements, back));
  }
}
