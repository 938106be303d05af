#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>

#include "clausefuzz/sql/parser.hpp"
#include "clausefuzz/subprocess.hpp"

using namespace cf;

namespace {

// Minimal fake DBMS shell: answers a few fixed SELECTs and echoes the
// adapter's marker statements so output stays attributable.
const char* kFakeShell = R"(#!/bin/sh
while IFS= read -r line; do
  case "$line" in
    "SELECT '~~cf"*) printf '%s\n' "$line" | sed "s/^SELECT '//;s/';$//" ;;
    "SELECT 1;") echo 1 ;;
    "SELECT 2;") printf 'a\t\n' ;;
    "SELECT 3;") printf '1\t2\n3\t4\n' ;;
  esac
done
)";

std::string write_fake_shell() {
  std::string path = "/tmp/cf_test_fakedb.sh";
  {
    std::ofstream out(path);
    out << kFakeShell;
  }
  std::string cmd = "chmod +x " + path;
  REQUIRE(std::system(cmd.c_str()) == 0);
  return path;
}

}  // namespace

TEST_CASE("SELECT 1 through a shell yields one integer row") {
  SubprocessAdapter::Options o;
  o.command = write_fake_shell();
  SubprocessAdapter a(o);
  CHECK_FALSE(a.trace_capable());
  ExecutionOutcome out = a.execute(sql::parse("SELECT 1;"));
  REQUIRE(out.results.size() == 1);
  REQUIRE(out.results[0].has_result);
  REQUIRE(out.results[0].result.rows.size() == 1);
  CHECK(out.results[0].result.rows[0][0].as_int() == 1);
  CHECK(out.trace.empty());
}

TEST_CASE("separator and NULL sentinel drive field parsing") {
  SubprocessAdapter::Options o;
  o.command = write_fake_shell();
  SubprocessAdapter a(o);
  // "a\t" splits into text 'a' and an empty field, which is the NULL sentinel
  ExecutionOutcome out = a.execute(sql::parse("SELECT 2;"));
  REQUIRE(out.results[0].result.rows.size() == 1);
  const auto& row = out.results[0].result.rows[0];
  REQUIRE(row.size() == 2);
  CHECK(row[0].as_text() == "a");
  CHECK(row[1].is_null());

  SubprocessAdapter::Options keep = o;
  keep.null_sentinel = "a";  // now 'a' reads as NULL and '' as empty text
  SubprocessAdapter b(keep);
  out = b.execute(sql::parse("SELECT 2;"));
  CHECK(out.results[0].result.rows[0][0].is_null());
  CHECK(out.results[0].result.rows[0][1].as_text().empty());
}

TEST_CASE("multi-row, multi-column output keeps its shape") {
  SubprocessAdapter::Options o;
  o.command = write_fake_shell();
  SubprocessAdapter a(o);
  ExecutionOutcome out = a.execute(sql::parse("SELECT 3;"));
  const QueryResult& r = out.results[0].result;
  CHECK(r.columns == 2);
  REQUIRE(r.rows.size() == 2);
  CHECK(r.rows[1][1].as_int() == 4);
  CHECK_FALSE(r.ordered);
}

TEST_CASE("non-query statements report done without output") {
  SubprocessAdapter::Options o;
  o.command = write_fake_shell();
  SubprocessAdapter a(o);
  ExecutionOutcome out = a.execute(sql::parse("CREATE TABLE t0(c0); SELECT 1;"));
  REQUIRE(out.results.size() == 2);
  CHECK_FALSE(out.results[0].has_result);
  CHECK(out.results[1].has_result);
}

TEST_CASE("unreachable binary raises LaunchFailure") {
  SubprocessAdapter::Options o;
  o.command = "/nonexistent/dbms-shell";
  SubprocessAdapter a(o);
  CHECK_THROWS_AS(a.execute(sql::parse("SELECT 1;")), LaunchFailure);
  CHECK_THROWS_AS((void)SubprocessAdapter(SubprocessAdapter::Options{}), LaunchFailure);
}

TEST_CASE("slow shells raise Timeout") {
  SubprocessAdapter::Options o;
  o.command = "sleep 30";
  o.timeout_seconds = 1;
  SubprocessAdapter a(o);
  CHECK_THROWS_AS(a.execute(sql::parse("SELECT 1;")), Timeout);
}

TEST_CASE("ragged output raises ParseFailure") {
  std::string path = "/tmp/cf_test_ragged.sh";
  {
    std::ofstream out(path);
    out << "#!/bin/sh\nprintf '1\\t2\\n3\\n'\ncat > /dev/null\n";
    // prints rows of width 2 then 1 before any marker
  }
  std::string cmd = "chmod +x " + path;
  REQUIRE(std::system(cmd.c_str()) == 0);
  SubprocessAdapter::Options o;
  o.command = path;
  SubprocessAdapter a(o);
  CHECK_THROWS_AS(a.execute(sql::parse("SELECT 1;")), ParseFailure);
}
