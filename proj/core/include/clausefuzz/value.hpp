#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace cf {

/// Three-valued logic result of a predicate.
enum class Truth { False, True, Null };

inline Truth truth_not(Truth t) {
  switch (t) {
    case Truth::True: return Truth::False;
    case Truth::False: return Truth::True;
    default: return Truth::Null;
  }
}

inline Truth truth_and(Truth a, Truth b) {
  if (a == Truth::False || b == Truth::False) return Truth::False;
  if (a == Truth::Null || b == Truth::Null) return Truth::Null;
  return Truth::True;
}

inline Truth truth_or(Truth a, Truth b) {
  if (a == Truth::True || b == Truth::True) return Truth::True;
  if (a == Truth::Null || b == Truth::Null) return Truth::Null;
  return Truth::False;
}

/// A single SQL value: NULL, integer, real or text.
struct Value {
  std::variant<std::monostate, int64_t, double, std::string> v;

  Value() = default;
  static Value null() { return Value{}; }
  static Value integer(int64_t i) { Value x; x.v = i; return x; }
  static Value real(double d) { Value x; x.v = d; return x; }
  static Value text(std::string s) { Value x; x.v = std::move(s); return x; }

  bool is_null() const { return std::holds_alternative<std::monostate>(v); }
  bool is_int() const { return std::holds_alternative<int64_t>(v); }
  bool is_real() const { return std::holds_alternative<double>(v); }
  bool is_text() const { return std::holds_alternative<std::string>(v); }
  bool is_numeric() const { return is_int() || is_real(); }

  int64_t as_int() const { return std::get<int64_t>(v); }
  double as_real() const { return std::get<double>(v); }
  const std::string& as_text() const { return std::get<std::string>(v); }
  double numeric() const { return is_int() ? double(as_int()) : as_real(); }

  /// Rendered form used in results, reports and SQL literals.
  std::string render() const;

  Truth to_truth() const;
};

enum class Collation { Binary, Nocase, Rtrim };

/// Total order over values with the type ordering NULL < numeric < text.
/// Returns <0, 0 or >0. Text comparison honors the collation.
int value_compare(const Value& a, const Value& b, Collation coll);

/// Result of one SELECT: a (possibly ordered) bag of rows.
struct QueryResult {
  size_t columns = 0;
  std::vector<std::vector<Value>> rows;
  bool ordered = false;  // result order is semantically significant (ORDER BY)

  std::string render() const;
};

/// Exact comparison of rendered values; NULL == NULL for bookkeeping.
bool result_rows_equal(const std::vector<Value>& a, const std::vector<Value>& b);

/// Multiset (or sequence, when ordered) equality of two results.
bool results_equal(const QueryResult& a, const QueryResult& b, bool as_sequence);

}  // namespace cf
