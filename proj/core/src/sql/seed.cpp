#include "clausefuzz/sql/seed.hpp"

#include <cstdio>

namespace cf::sql {

std::string seed_id(const std::string& rendered) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : rendered) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", (unsigned long long)h);
  return buf;
}

SeedCase make_seed(StatementList stmts) {
  SeedCase s;
  s.statements = std::move(stmts);
  s.id = seed_id(s.render());
  return s;
}

}  // namespace cf::sql
