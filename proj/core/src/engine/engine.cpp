#include "clausefuzz/engine/engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>

#include <json.hpp>

#include "clausefuzz/sql/catalog.hpp"

namespace cf::engine {
namespace {

constexpr uint64_t kMinimizeRngSeed = 0x5eedULL;

double udraw(sql::Rng& rng) { return (rng() >> 11) * 0x1.0p-53; }

}  // namespace

std::string BugReport::to_json() const {
  nlohmann::ordered_json j;
  j["id"] = id;
  j["oracle"] = oracle;
  j["pattern"] = pattern;
  j["ttx_seconds"] = ttx_seconds;
  j["original"] = original;
  j["variant"] = variant;
  j["original_result"] = original_result;
  j["variant_result"] = variant_result;
  j["minimized"] = minimized;
  j["not_reproducible"] = not_reproducible;
  return j.dump();
}

const char* StatsRow::csv_header() {
  return "t_seconds,queue_size,median_distance,covered_edges,bugs_found";
}

std::string StatsRow::to_csv() const {
  std::string md;
  if (median_distance) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", *median_distance);
    md = buf;
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "%g,%zu,%s,%zu,%d", t_seconds, queue_size, md.c_str(),
                covered_edges, bugs_found);
  return buf;
}

void CampaignConfig::validate() const {
  if (iterations <= 0) throw ConfigError("iteration budget must be positive");
  if (oracles.empty()) throw ConfigError("at least one oracle is required");
  if (mutation_rounds <= 0) throw ConfigError("mutation rounds factor must be positive");
  if (queue_cap == 0) throw ConfigError("queue capacity must be positive");
}

size_t schedule(const std::vector<QueueEntry>& queue, sql::Rng& rng, int age_max) {
  if (queue.empty()) throw EmptyQueue();
  for (size_t i = 0; i < queue.size(); ++i)
    if (queue[i].age > age_max) return i;  // starvation floor
  double total = 0.0;
  for (const auto& e : queue) total += e.energy;
  double u = udraw(rng) * total;
  for (size_t i = 0; i < queue.size(); ++i) {
    u -= queue[i].energy;
    if (u < 0) return i;
  }
  return queue.size() - 1;
}

std::optional<double> median_defined_distance(const std::vector<QueueEntry>& queue) {
  std::vector<double> ds;
  for (const auto& e : queue)
    if (e.distance) ds.push_back(*e.distance);
  if (ds.empty()) return std::nullopt;
  std::sort(ds.begin(), ds.end());
  size_t n = ds.size();
  if (n % 2) return ds[n / 2];
  return (ds[n / 2 - 1] + ds[n / 2]) / 2.0;
}

bool admit(const std::set<std::pair<dist::FunctionId, dist::FunctionId>>& edges,
           const dist::Distance& distance,
           const std::set<std::pair<dist::FunctionId, dist::FunctionId>>& covered,
           const std::vector<QueueEntry>& queue) {
  for (const auto& e : edges)
    if (!covered.count(e)) return true;
  if (distance) {
    auto med = median_defined_distance(queue);
    if (med && *distance < *med) return true;
  }
  return false;
}

Evaluation evaluate_seed(const sql::SeedCase& seed, TargetAdapter& adapter,
                         const std::vector<dist::Target>& targets,
                         const dist::CallGraph* cg) {
  Evaluation ev;
  adapter.reset();
  ev.outcome = adapter.execute(seed.statements);
  ev.ctl = dist::extract_ctl(ev.outcome.trace);
  if (cg && !targets.empty() && !ev.ctl.blocks.empty()) {
    // only target-chain functions are instrumented for distance purposes, so
    // the seed block set is restricted to blocks inside those functions; a
    // seed that never enters any chain function has no defined distance
    std::set<dist::FunctionId> chain_fns;
    for (const auto& t : targets) chain_fns.insert(t.chain.begin(), t.chain.end());
    dist::BlockSet sbb;
    for (const auto& b : ev.ctl.blocks)
      if (chain_fns.count(b.fn)) sbb.insert(b);
    if (!sbb.empty()) ev.choice = dist::select_target(ev.ctl.chain, sbb, targets, *cg);
  }
  return ev;
}

std::vector<dist::Target> make_targets(const patterns::PatternSet& pats,
                                       const std::string& dbms, const dist::CallGraph& cg) {
  std::vector<dist::Target> out;
  for (const auto* p : pats.for_dbms(dbms)) {
    if (!p->targetable()) continue;
    dist::Target t;
    t.pattern_id = p->id;
    t.chain = patterns::resolve_chain(*p, cg);
    t.blocks = dist::target_blocks(t.chain, cg);
    if (!t.blocks.empty()) out.push_back(std::move(t));
  }
  return out;
}

namespace {

bool candidate_valid(sql::StatementList& stmts) {
  try {
    sql::build_catalog(stmts);
  } catch (const sql::CatalogError&) {
    return false;
  }
  return true;
}

bool still_mismatches(const sql::StatementList& stmts, oracle::OracleKind kind,
                      TargetAdapter& adapter) {
  sql::StatementList copy = sql::clone_statements(stmts);
  if (!candidate_valid(copy)) return false;
  sql::Rng rng(kMinimizeRngSeed);
  auto plan = oracle::make_plan(kind, sql::make_seed(std::move(copy)), rng);
  return oracle::run_plan(plan, adapter).status == oracle::OracleVerdict::Status::Mismatch;
}

/// Enumerates single-step predicate simplifications of the final SELECT's
/// WHERE: dropping it, or replacing one node with one of its children.
std::vector<sql::StatementList> where_simplifications(const sql::StatementList& stmts) {
  std::vector<sql::StatementList> out;
  int fi = -1;
  for (int i = int(stmts.size()) - 1; i >= 0; --i)
    if (stmts[size_t(i)].kind == sql::SqlStatement::Kind::Select) {
      fi = i;
      break;
    }
  if (fi < 0 || !stmts[size_t(fi)].select->where) return out;

  // count nodes to address them by pre-order position
  std::function<int(const sql::Expr&)> count = [&](const sql::Expr& e) {
    int n = 1;
    for (const auto& k : e.kids) n += count(*k);
    return n;
  };
  int total = count(*stmts[size_t(fi)].select->where);

  {
    sql::StatementList cand = sql::clone_statements(stmts);
    cand[size_t(fi)].select->where.reset();
    out.push_back(std::move(cand));
  }
  for (int node = 0; node < total; ++node) {
    // a node with k children yields k replacement candidates
    for (int kid = 0;; ++kid) {
      sql::StatementList cand = sql::clone_statements(stmts);
      std::unique_ptr<sql::Expr>& root = cand[size_t(fi)].select->where;
      int seen = 0;
      bool applied = false, exists = false;
      std::function<bool(std::unique_ptr<sql::Expr>&)> visit =
          [&](std::unique_ptr<sql::Expr>& slot) {
            if (seen++ == node) {
              if (kid < int(slot->kids.size())) {
                exists = true;
                slot = std::move(slot->kids[size_t(kid)]);
                applied = true;
              }
              return true;
            }
            for (auto& k : slot->kids)
              if (visit(k)) return true;
            return false;
          };
      visit(root);
      if (!exists) break;
      if (applied) out.push_back(std::move(cand));
    }
  }
  return out;
}

}  // namespace

MinimizeResult minimize(const sql::SeedCase& seed, oracle::OracleKind kind,
                        TargetAdapter& adapter) {
  // the mismatch must hold twice in a row before shrinking
  if (!still_mismatches(seed.statements, kind, adapter) ||
      !still_mismatches(seed.statements, kind, adapter))
    return {seed.clone(), false};

  sql::StatementList cur = sql::clone_statements(seed.statements);

  // greedy statement removal
  bool changed = true;
  while (changed && cur.size() > 1) {
    changed = false;
    for (size_t i = 0; i < cur.size(); ++i) {
      sql::StatementList cand = sql::clone_statements(cur);
      cand.erase(cand.begin() + long(i));
      if (still_mismatches(cand, kind, adapter)) {
        cur = std::move(cand);
        changed = true;
        break;
      }
    }
  }

  // per-SELECT toggles
  for (size_t i = 0; i < cur.size(); ++i) {
    if (cur[i].kind != sql::SqlStatement::Kind::Select) continue;
    if (cur[i].select->distinct) {
      sql::StatementList cand = sql::clone_statements(cur);
      cand[i].select->distinct = false;
      if (still_mismatches(cand, kind, adapter)) cur = std::move(cand);
    }
    if (!cur[i].select->order_by.empty()) {
      sql::StatementList cand = sql::clone_statements(cur);
      cand[i].select->order_by.clear();
      if (still_mismatches(cand, kind, adapter)) cur = std::move(cand);
    }
  }

  // predicate simplification to a fixpoint
  changed = true;
  int guard = 0;
  while (changed && guard++ < 64) {
    changed = false;
    for (auto& cand : where_simplifications(cur)) {
      if (still_mismatches(cand, kind, adapter)) {
        cur = std::move(cand);
        changed = true;
        break;
      }
    }
  }

  candidate_valid(cur);  // rebind resolution slots
  return {sql::make_seed(std::move(cur)), true};
}

namespace {

std::string attribute_pattern(const dist::CtlSequence& ctl,
                              const std::vector<dist::Target>& targets) {
  std::string best;
  size_t best_len = 0;
  for (const auto& t : targets) {
    if (!patterns::pattern_hit(ctl, t.chain)) continue;
    if (t.chain.size() > best_len ||
        (t.chain.size() == best_len && (best.empty() || t.pattern_id < best))) {
      best = t.pattern_id;
      best_len = t.chain.size();
    }
  }
  return best;
}

}  // namespace

CampaignSummary run_campaign(const CampaignConfig& config, TargetAdapter& adapter,
                             const dist::CallGraph* cg,
                             const std::vector<dist::Target>& targets) {
  config.validate();
  sql::Rng rng(config.rng_seed);
  CampaignSummary summary;
  std::vector<QueueEntry> queue;
  std::set<std::pair<dist::FunctionId, dist::FunctionId>> covered;
  std::set<std::string> seen_ids;
  std::set<std::pair<std::string, std::string>> reported;  // (oracle, pattern)
  sql::Catalog empty_cat;

  auto snapshot = [&](int iter) {
    StatsRow row;
    row.t_seconds = double(iter);
    row.queue_size = queue.size();
    row.median_distance = median_defined_distance(queue);
    row.covered_edges = covered.size();
    row.bugs_found = int(summary.reports.size());
    summary.stats.push_back(row);
  };

  for (int iter = 0; iter < config.iterations; ++iter) {
    summary.iterations = iter + 1;
    sql::SeedCase cand;
    bool fresh = queue.empty() ||
                 (config.generate_every > 0 && iter % config.generate_every == 0);
    if (fresh) {
      cand = sql::generate(empty_cat, rng, config.profile);
    } else {
      size_t idx = schedule(queue, rng, config.age_max);
      for (auto& e : queue) ++e.age;
      queue[idx].age = 0;
      int rounds = int(std::ceil(config.mutation_rounds * queue[idx].energy));
      rounds = std::clamp(rounds, 1, config.max_rounds);
      cand = sql::mutate(queue[idx].seed, rounds, rng);
    }
    if (!seen_ids.insert(cand.id).second) {
      if (config.snapshot_every > 0 && (iter + 1) % config.snapshot_every == 0)
        snapshot(iter + 1);
      continue;
    }

    Evaluation ev = evaluate_seed(cand, adapter, targets, cg);
    dist::Distance d = config.guidance ? ev.choice.distance : std::nullopt;
    double en = config.guidance ? dist::energy(ev.choice.distance, config.energy) : 1.0;

    auto verdicts = oracle::run_oracles(cand, config.oracles, adapter, rng);
    for (const auto& v : verdicts) {
      if (v.status != oracle::OracleVerdict::Status::Mismatch) continue;
      MinimizeResult mr = minimize(cand, v.kind, adapter);
      // attribute on the oracle's own executions: variant-inserted DDL (e.g.
      // the INDEX oracle's indexes) is part of the triggering scenario
      std::string pattern;
      {
        sql::Rng prng(kMinimizeRngSeed);
        oracle::OraclePlan plan = oracle::make_plan(v.kind, mr.seed, prng);
        std::vector<const sql::SeedCase*> sides;
        if (plan.applicable) {
          sides.push_back(&plan.original);
          for (const auto& vs : plan.variants) sides.push_back(&vs);
        } else {
          sides.push_back(&mr.seed);
        }
        dist::CtlSequence all;
        for (const sql::SeedCase* side : sides) {
          adapter.reset();
          ExecutionOutcome mo = adapter.execute(side->statements);
          dist::CtlSequence ctl = dist::extract_ctl(mo.trace).ctl;
          all.insert(all.end(), ctl.begin(), ctl.end());
        }
        pattern = attribute_pattern(all, targets);
      }
      auto key = std::make_pair(std::string(oracle::oracle_name(v.kind)), pattern);
      if (!reported.insert(key).second) continue;
      BugReport r;
      r.id = cand.id + "-" + oracle::oracle_name(v.kind);
      r.oracle = oracle::oracle_name(v.kind);
      r.pattern = pattern;
      r.original = v.original_sql;
      r.variant = v.variant_sql;
      r.original_result = v.original_result;
      r.variant_result = v.variant_result;
      r.minimized = mr.reproducible ? mr.seed.render() : "";
      r.not_reproducible = !mr.reproducible;
      r.ttx_seconds = double(iter + 1);
      summary.reports.push_back(std::move(r));
    }

    if (admit(ev.outcome.edges, d, covered, queue)) {
      QueueEntry e;
      e.seed = cand.clone();
      e.distance = d;
      e.energy = en;
      e.edges = ev.outcome.edges;
      e.target = ev.choice.pattern_id;
      queue.push_back(std::move(e));
      while (queue.size() > config.queue_cap) {
        // evict the farthest entry; undefined counts as farthest
        size_t worst = 0;
        auto worse = [&](const QueueEntry& a, const QueueEntry& b) {
          if (a.distance.has_value() != b.distance.has_value()) return !a.distance.has_value();
          if (!a.distance) return false;
          return *a.distance > *b.distance;
        };
        for (size_t i = 1; i < queue.size(); ++i)
          if (worse(queue[i], queue[worst])) worst = i;
        queue.erase(queue.begin() + long(worst));
      }
    }
    for (const auto& edge : ev.outcome.edges) covered.insert(edge);

    if (config.snapshot_every > 0 && (iter + 1) % config.snapshot_every == 0)
      snapshot(iter + 1);
  }
  if (summary.stats.empty() || summary.stats.back().t_seconds != config.iterations)
    snapshot(config.iterations);
  summary.covered_edges = covered.size();
  summary.queue_size = queue.size();
  summary.corpus.reserve(queue.size());
  for (const QueueEntry& e : queue) summary.corpus.push_back(e.seed.clone());
  return summary;
}

}  // namespace cf::engine
