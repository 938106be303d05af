#include <doctest.h>

#include <fstream>
#include <sstream>

#include "clausefuzz/engine/engine.hpp"
#include "clausefuzz/minidb/minidb.hpp"
#include "clausefuzz/patterns/patterns.hpp"
#include "clausefuzz/sql/parser.hpp"

using namespace cf;
using namespace cf::engine;

#ifndef CF_REPO_DIR
#define CF_REPO_DIR "."
#endif

static QueueEntry entry(double energy, std::optional<double> dist = std::nullopt) {
  QueueEntry e;
  e.energy = energy;
  e.distance = dist;
  return e;
}

TEST_CASE("scheduling is energy-proportional within 5% at 2:1") {
  std::vector<QueueEntry> queue;
  queue.push_back(entry(2.0));
  queue.push_back(entry(1.0));
  sql::Rng rng(123);
  int hits[2] = {0, 0};
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) ++hits[schedule(queue, rng, 512)];
  double ratio = double(hits[0]) / double(hits[1]);
  CHECK(ratio == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("starved entries are scheduled first") {
  std::vector<QueueEntry> queue;
  queue.push_back(entry(100.0));
  queue.push_back(entry(0.001));
  queue[1].age = 600;
  sql::Rng rng(1);
  CHECK(schedule(queue, rng, 512) == 1);
}

TEST_CASE("admission: new coverage or below-median distance") {
  std::vector<QueueEntry> queue;
  queue.push_back(entry(1.0, 4.0));
  queue.push_back(entry(1.0, 8.0));
  std::set<std::pair<dist::FunctionId, dist::FunctionId>> covered{{1, 2}};

  std::set<std::pair<dist::FunctionId, dist::FunctionId>> fresh{{1, 2}, {3, 4}};
  CHECK(admit(fresh, std::nullopt, covered, queue));  // new edge

  std::set<std::pair<dist::FunctionId, dist::FunctionId>> stale{{1, 2}};
  CHECK(admit(stale, 5.0, covered, queue));        // below median 6
  CHECK_FALSE(admit(stale, 7.0, covered, queue));  // above median
  CHECK_FALSE(admit(stale, std::nullopt, covered, queue));
}

TEST_CASE("median ignores undefined distances") {
  std::vector<QueueEntry> queue;
  CHECK_FALSE(median_defined_distance(queue).has_value());
  queue.push_back(entry(1.0, std::nullopt));
  CHECK_FALSE(median_defined_distance(queue).has_value());
  queue.push_back(entry(1.0, 2.0));
  queue.push_back(entry(1.0, 10.0));
  CHECK(*median_defined_distance(queue) == doctest::Approx(6.0));
}

TEST_CASE("config validation") {
  CampaignConfig c;
  CHECK_NOTHROW(c.validate());
  c.iterations = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.iterations = 10;
  c.oracles.clear();
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("full-chain fixture seed gets distance 0 and max energy") {
  // the sqlite fixture trace covers its whole target chain
  dist::CallGraph cg = dist::CallGraph::load(std::string(CF_REPO_DIR) +
                                             "/fixtures/sqlite.cg");
  patterns::PatternSet pats = patterns::load_patterns(
      std::string(CF_REPO_DIR) + "/patterns/catalog.json");
  const patterns::BugPattern* p = pats.find("sqlite/nocase-partial-index");
  REQUIRE(p);
  auto chain = patterns::resolve_chain(*p, cg);
  dist::Target t{p->id, chain, dist::target_blocks(chain, cg)};

  std::ifstream in(std::string(CF_REPO_DIR) + "/fixtures/sqlite_select_chain.trace");
  std::stringstream buf;
  buf << in.rdbuf();
  dist::CtlExtract ctl = dist::extract_ctl(dist::parse_trace(buf.str()));
  dist::TargetChoice choice = dist::select_target(ctl.chain, ctl.blocks, {t}, cg);
  CHECK(choice.pattern_id == p->id);
  REQUIRE(choice.distance.has_value());
  CHECK(*choice.distance == 0.0);
  dist::EnergyPolicy policy;
  CHECK(dist::energy(choice.distance, policy) == policy.e_max);
}

TEST_CASE("minimized nocase reproducer stays a reproducer") {
  minidb::MiniDb db({minidb::BugFlag::NocasePartialIndex});
  sql::SeedCase seed = sql::make_seed(sql::parse(
      "CREATE TABLE t0(c0 COLLATE NOCASE, c1);"
      "CREATE INDEX i0 ON t0(c0) WHERE c0 >= c1;"
      "INSERT INTO t0 VALUES ('a', 'B');"
      "INSERT INTO t0 VALUES (1, 2);"
      "SELECT * FROM t0 WHERE t0.c1 <= t0.c0 ORDER BY c1;"));
  MinimizeResult mr = minimize(seed, oracle::OracleKind::Norec, db);
  CHECK(mr.reproducible);
  CHECK(mr.seed.statements.size() <= seed.statements.size());
  // the minimized case still mismatches on its own
  sql::Rng rng(0x5eed);
  oracle::OraclePlan plan = oracle::make_plan(oracle::OracleKind::Norec, mr.seed, rng);
  REQUIRE(plan.applicable);
  CHECK(oracle::run_plan(plan, db).status ==
        oracle::OracleVerdict::Status::Mismatch);
}

TEST_CASE("campaigns are deterministic and find the seeded bug") {
  auto run = [] {
    minidb::MiniDb db({minidb::BugFlag::DistinctIgnore});
    dist::CallGraph cg = minidb::MiniDb::call_graph();
    patterns::PatternSet pats = patterns::load_patterns(
        std::string(CF_REPO_DIR) + "/patterns/minidb.json", &cg, true);
    CampaignConfig cfg;
    cfg.rng_seed = 11;
    cfg.iterations = 1500;
    return run_campaign(cfg, db, &cg, make_targets(pats, "minidb", cg));
  };
  CampaignSummary a = run();
  CampaignSummary b = run();
  REQUIRE_FALSE(a.reports.empty());
  CHECK(a.reports[0].pattern == "minidb/distinct-ignored");
  REQUIRE(a.reports.size() == b.reports.size());
  for (size_t i = 0; i < a.reports.size(); ++i)
    CHECK(a.reports[i].to_json() == b.reports[i].to_json());
  REQUIRE(a.stats.size() == b.stats.size());
  for (size_t i = 0; i < a.stats.size(); ++i)
    CHECK(a.stats[i].to_csv() == b.stats[i].to_csv());
  CHECK(a.corpus.size() == a.queue_size);
}

TEST_CASE("reports serialize with stable keys") {
  BugReport r;
  r.id = "x";
  r.oracle = "norec";
  r.pattern = "p";
  r.ttx_seconds = 3;
  std::string j = r.to_json();
  CHECK(j.find("\"id\":\"x\"") != std::string::npos);
  CHECK(j.find("\"oracle\":\"norec\"") < j.find("\"pattern\":\"p\""));
}
