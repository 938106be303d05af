#include <doctest.h>

#include "clausefuzz/sql/catalog.hpp"
#include "clausefuzz/sql/generate.hpp"
#include "clausefuzz/sql/parser.hpp"

using namespace cf::sql;

static bool valid(const SeedCase& seed) {
  StatementList copy = clone_statements(seed.statements);
  try {
    build_catalog(copy);
  } catch (const CatalogError&) {
    return false;
  }
  return true;
}

TEST_CASE("generation is deterministic per rng seed") {
  Rng a(42), b(42);
  GenProfile p;
  for (int i = 0; i < 20; ++i)
    CHECK(generate({}, a, p).render() == generate({}, b, p).render());
}

TEST_CASE("every generated seed is catalog-valid") {
  Rng rng(1);
  GenProfile p;
  for (int i = 0; i < 2000; ++i) {
    SeedCase seed = generate({}, rng, p);
    CHECK(valid(seed));
    CHECK_FALSE(seed.id.empty());
  }
}

TEST_CASE("empty profile is rejected") {
  GenProfile p;
  p.ddl = false;
  p.selects = false;
  Rng rng(1);
  CHECK_THROWS_AS(generate({}, rng, p), ProfileEmpty);
}

TEST_CASE("ddl-only profile emits no SELECT statements") {
  Rng rng(3);
  GenProfile p = GenProfile::ddl_only();
  for (int i = 0; i < 100; ++i) {
    SeedCase seed = generate({}, rng, p);
    for (const auto& st : seed.statements)
      CHECK(st.kind != SqlStatement::Kind::Select);
  }
}

TEST_CASE("mutants stay valid and track lineage") {
  Rng rng(5);
  GenProfile p;
  int changed = 0;
  for (int i = 0; i < 500; ++i) {
    SeedCase seed = generate({}, rng, p);
    SeedCase mut = mutate(seed, 4, rng);
    CHECK(valid(mut));
    CHECK(mut.parent_id == seed.id);
    if (mut.render() != seed.render()) ++changed;
  }
  CHECK(changed > 350);  // mutation should rarely no-op at 4 rounds
}
