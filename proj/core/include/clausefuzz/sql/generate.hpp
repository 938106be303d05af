#pragma once

#include <random>
#include <stdexcept>

#include "clausefuzz/sql/catalog.hpp"
#include "clausefuzz/sql/seed.hpp"

namespace cf::sql {

using Rng = std::mt19937_64;

struct ProfileEmpty : std::runtime_error {
  ProfileEmpty() : std::runtime_error("no clause features enabled in profile") {}
};

/// Which clause features the generator may use, plus size bounds.
struct GenProfile {
  int max_tables = 2;
  int max_columns = 4;
  int max_insert_rows = 4;
  int max_selects = 2;

  bool ddl = true;
  bool indexes = true;
  bool partial_index = true;
  bool nocase = true;
  bool primary_key = true;
  bool without_rowid = true;
  bool selects = true;
  bool distinct = true;
  bool order_by = true;
  bool cast = true;
  bool like = true;
  bool in_list = true;
  bool exists = true;
  bool view_agg = true;
  bool likely = true;
  bool pragma = false;

  bool any_enabled() const { return ddl || selects; }

  static GenProfile ddl_only() {
    GenProfile p;
    p.selects = false;
    p.view_agg = false;
    return p;
  }
};

/// Deterministic validity-oriented generation: the result parses, rebuilds its
/// catalog without error, and every identifier resolves.
SeedCase generate(const Catalog& base, Rng& rng, const GenProfile& profile);

/// Applies `rounds` validity-preserving edits; if an edit cannot apply after a
/// bounded number of draws, the seed is returned unchanged with a no-op tag.
SeedCase mutate(const SeedCase& seed, int rounds, Rng& rng);

}  // namespace cf::sql
