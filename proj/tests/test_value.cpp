#include <doctest.h>

#include "clausefuzz/value.hpp"

using namespace cf;

TEST_CASE("three-valued logic tables") {
  CHECK(truth_and(Truth::True, Truth::Null) == Truth::Null);
  CHECK(truth_and(Truth::False, Truth::Null) == Truth::False);
  CHECK(truth_or(Truth::True, Truth::Null) == Truth::True);
  CHECK(truth_or(Truth::False, Truth::Null) == Truth::Null);
  CHECK(truth_not(Truth::Null) == Truth::Null);
}

TEST_CASE("value ordering puts NULL < numeric < text") {
  Value n = Value::null();
  Value i = Value::integer(5);
  Value t = Value::text("a");
  CHECK(value_compare(n, i, Collation::Binary) < 0);
  CHECK(value_compare(i, t, Collation::Binary) < 0);
  CHECK(value_compare(n, t, Collation::Binary) < 0);
  CHECK(value_compare(Value::integer(2), Value::real(2.0), Collation::Binary) == 0);
}

TEST_CASE("NOCASE collation folds case, binary does not") {
  Value a = Value::text("abc");
  Value b = Value::text("ABC");
  CHECK(value_compare(a, b, Collation::Nocase) == 0);
  CHECK(value_compare(a, b, Collation::Binary) != 0);
  // the code1 fixture hinges on this: 'a' vs 'B' flips sign across collations
  CHECK(value_compare(Value::text("a"), Value::text("B"), Collation::Binary) > 0);
  CHECK(value_compare(Value::text("a"), Value::text("B"), Collation::Nocase) < 0);
}

TEST_CASE("RTRIM collation ignores trailing spaces") {
  CHECK(value_compare(Value::text("ab  "), Value::text("ab"), Collation::Rtrim) == 0);
  CHECK(value_compare(Value::text("  ab"), Value::text("ab"), Collation::Rtrim) != 0);
}

TEST_CASE("result equality: multiset vs sequence") {
  QueryResult a, b;
  a.columns = b.columns = 1;
  a.rows = {{Value::integer(1)}, {Value::integer(2)}};
  b.rows = {{Value::integer(2)}, {Value::integer(1)}};
  CHECK(results_equal(a, b, false));
  CHECK_FALSE(results_equal(a, b, true));
  b.rows.push_back({Value::integer(1)});
  CHECK_FALSE(results_equal(a, b, false));
}

TEST_CASE("render is stable for reports") {
  CHECK(Value::null().render() == "NULL");
  CHECK(Value::integer(-3).render() == "-3");
  CHECK(Value::text("x").render() == "x");
}
