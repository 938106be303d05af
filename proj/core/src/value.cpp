#include "clausefuzz/value.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <set>
#include <sstream>

namespace cf {

std::string Value::render() const {
  if (is_null()) return "NULL";
  if (is_int()) return std::to_string(as_int());
  if (is_real()) {
    double d = as_real();
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.15g", d);
    std::string s = buf;
    // keep reals visually distinct from integers
    if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
    return s;
  }
  return as_text();
}

Truth Value::to_truth() const {
  if (is_null()) return Truth::Null;
  if (is_int()) return as_int() != 0 ? Truth::True : Truth::False;
  if (is_real()) return as_real() != 0.0 ? Truth::True : Truth::False;
  // text: numeric prefix semantics, "1" is true, "abc" is false
  const std::string& s = as_text();
  char* end = nullptr;
  double d = std::strtod(s.c_str(), &end);
  if (end == s.c_str()) return Truth::False;
  return d != 0.0 ? Truth::True : Truth::False;
}

static std::string collate_key(const std::string& s, Collation c) {
  std::string k = s;
  if (c == Collation::Nocase) {
    std::transform(k.begin(), k.end(), k.begin(),
                   [](unsigned char ch) { return std::tolower(ch); });
  } else if (c == Collation::Rtrim) {
    while (!k.empty() && k.back() == ' ') k.pop_back();
  }
  return k;
}

int value_compare(const Value& a, const Value& b, Collation coll) {
  auto cls = [](const Value& v) { return v.is_null() ? 0 : v.is_numeric() ? 1 : 2; };
  int ca = cls(a), cb = cls(b);
  if (ca != cb) return ca < cb ? -1 : 1;
  if (ca == 0) return 0;  // NULL == NULL in the total order
  if (ca == 1) {
    double x = a.numeric(), y = b.numeric();
    if (x < y) return -1;
    if (x > y) return 1;
    return 0;
  }
  std::string ka = collate_key(a.as_text(), coll);
  std::string kb = collate_key(b.as_text(), coll);
  return ka.compare(kb) < 0 ? -1 : (ka == kb ? 0 : 1);
}

std::string QueryResult::render() const {
  std::ostringstream os;
  for (const auto& row : rows) {
    for (size_t i = 0; i < row.size(); ++i) {
      if (i) os << '|';
      os << row[i].render();
    }
    os << '\n';
  }
  return os.str();
}

bool result_rows_equal(const std::vector<Value>& a, const std::vector<Value>& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i].is_null() != b[i].is_null()) return false;
    if (!a[i].is_null() && a[i].render() != b[i].render()) return false;
  }
  return true;
}

bool results_equal(const QueryResult& a, const QueryResult& b, bool as_sequence) {
  if (a.rows.size() != b.rows.size()) return false;
  auto key = [](const std::vector<Value>& row) {
    std::string k;
    for (const auto& v : row) {
      k += v.is_null() ? "\x01" : v.render();
      k += '\x02';
    }
    return k;
  };
  if (as_sequence) {
    for (size_t i = 0; i < a.rows.size(); ++i)
      if (key(a.rows[i]) != key(b.rows[i])) return false;
    return true;
  }
  std::multiset<std::string> ma, mb;
  for (const auto& r : a.rows) ma.insert(key(r));
  for (const auto& r : b.rows) mb.insert(key(r));
  return ma == mb;
}

}  // namespace cf
