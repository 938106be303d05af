#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "clausefuzz/adapter.hpp"
#include "clausefuzz/dist/distance.hpp"
#include "clausefuzz/oracle/oracle.hpp"
#include "clausefuzz/patterns/patterns.hpp"
#include "clausefuzz/sql/generate.hpp"

namespace cf::engine {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct EmptyQueue : std::runtime_error {
  EmptyQueue() : std::runtime_error("empty seed queue") {}
};

struct QueueEntry {
  sql::SeedCase seed;
  dist::Distance distance;
  double energy = 1.0;
  std::set<std::pair<dist::FunctionId, dist::FunctionId>> edges;
  std::string target;  // pattern id, empty when none applies
  int age = 0;
};

struct BugReport {
  std::string id;
  std::string oracle;
  std::string pattern;
  std::string original;
  std::string variant;
  std::string original_result;
  std::string variant_result;
  std::string minimized;
  bool not_reproducible = false;
  // virtual clock: one tick per campaign iteration, so reports are
  // byte-reproducible under a fixed rng seed
  double ttx_seconds = 0.0;

  std::string to_json() const;
};

struct StatsRow {
  double t_seconds = 0.0;  // virtual clock, as above
  size_t queue_size = 0;
  std::optional<double> median_distance;
  size_t covered_edges = 0;
  int bugs_found = 0;

  std::string to_csv() const;
  static const char* csv_header();
};

struct CampaignConfig {
  std::vector<oracle::OracleKind> oracles = oracle::all_oracles();
  sql::GenProfile profile;
  uint64_t rng_seed = 1;
  int iterations = 1000;
  bool guidance = true;  // false = energies forced equal (coverage baseline)
  double mutation_rounds = 4.0;
  int max_rounds = 64;
  int age_max = 512;
  size_t queue_cap = 4096;
  int generate_every = 8;   // fresh generated seed cadence
  int snapshot_every = 64;  // stats cadence, iterations
  dist::EnergyPolicy energy;

  void validate() const;
};

struct CampaignSummary {
  int iterations = 0;
  std::vector<BugReport> reports;
  std::vector<StatsRow> stats;
  size_t covered_edges = 0;
  size_t queue_size = 0;
  std::vector<sql::SeedCase> corpus;  // final queue contents, queue order
};

/// Starvation floor first (any entry older than age_max), then energy
/// -proportional sampling. Returns an index into the queue.
size_t schedule(const std::vector<QueueEntry>& queue, sql::Rng& rng, int age_max);

/// Admission rule: new coverage or a defined distance below the queue median
/// of defined distances.
bool admit(const std::set<std::pair<dist::FunctionId, dist::FunctionId>>& edges,
           const dist::Distance& distance,
           const std::set<std::pair<dist::FunctionId, dist::FunctionId>>& covered,
           const std::vector<QueueEntry>& queue);

std::optional<double> median_defined_distance(const std::vector<QueueEntry>& queue);

struct Evaluation {
  ExecutionOutcome outcome;
  dist::CtlExtract ctl;
  dist::TargetChoice choice;
};

Evaluation evaluate_seed(const sql::SeedCase& seed, TargetAdapter& adapter,
                         const std::vector<dist::Target>& targets,
                         const dist::CallGraph* cg);

struct MinimizeResult {
  sql::SeedCase seed;
  bool reproducible = true;
};

/// Greedy statement removal, then SELECT-toggle and predicate simplification.
/// The result still triggers the same oracle's mismatch.
MinimizeResult minimize(const sql::SeedCase& seed, oracle::OracleKind kind,
                        TargetAdapter& adapter);

/// Builds distance targets for every resolvable pattern of `dbms`.
std::vector<dist::Target> make_targets(const patterns::PatternSet& pats,
                                       const std::string& dbms, const dist::CallGraph& cg);

CampaignSummary run_campaign(const CampaignConfig& config, TargetAdapter& adapter,
                             const dist::CallGraph* cg,
                             const std::vector<dist::Target>& targets);

}  // namespace cf::engine
