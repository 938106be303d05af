#pragma once

#include <optional>
#include <string>
#include <vector>

#include "clausefuzz/adapter.hpp"
#include "clausefuzz/sql/generate.hpp"
#include "clausefuzz/sql/seed.hpp"

namespace cf::oracle {

enum class OracleKind { Norec, Tlp, Index, Rowid, Likely };

const char* oracle_name(OracleKind k);  // lowercase
std::optional<OracleKind> oracle_from_name(const std::string& name);
const std::vector<OracleKind>& all_oracles();

/// How variant results are reduced before the comparison.
enum class Combiner { Identity, MultisetUnion, SetUnion, TrueRowCount };

struct OraclePlan {
  OracleKind kind{};
  bool applicable = false;
  std::string reason;  // set when inapplicable
  sql::SeedCase original;
  std::vector<sql::SeedCase> variants;
  Combiner combiner = Combiner::Identity;

  static OraclePlan inapplicable(OracleKind k, std::string why) {
    OraclePlan p;
    p.kind = k;
    p.reason = std::move(why);
    return p;
  }
};

struct OracleVerdict {
  enum class Status { Pass, Mismatch, Inapplicable, ExecError };
  Status status = Status::Pass;
  OracleKind kind{};
  std::string reason;  // inapplicability or engine-error message
  std::string original_sql, variant_sql;
  std::string original_result, variant_result;  // rendered, filled on Mismatch
};

const char* verdict_name(OracleVerdict::Status s);

/// NoREC: rewrites the final `SELECT <proj> FROM <src> WHERE f` into
/// `SELECT (f) FROM <src>`; the original's row count must equal the variant's
/// predicate-true count.
OraclePlan plan_norec(const sql::SeedCase& seed);

/// TLP: partitions the final WHERE into IS TRUE / IS FALSE / IS NULL; the
/// partition union must equal the same SELECT without its WHERE clause.
OraclePlan plan_tlp(const sql::SeedCase& seed);

/// INDEX: inserts 1-3 fresh CREATE INDEX statements before the final SELECT;
/// results must be unchanged.
OraclePlan plan_index(const sql::SeedCase& seed, sql::Rng& rng);

/// ROWID: adds WITHOUT ROWID to primary-key tables lacking it.
OraclePlan plan_rowid(const sql::SeedCase& seed);

/// LIKELY: wraps the final WHERE predicate in LIKELY(...).
OraclePlan plan_likely(const sql::SeedCase& seed);

OraclePlan make_plan(OracleKind k, const sql::SeedCase& seed, sql::Rng& rng);

/// Executes the plan's original and variants on fresh adapter state and
/// compares per the combiner.
OracleVerdict run_plan(const OraclePlan& plan, TargetAdapter& adapter);

std::vector<OracleVerdict> run_oracles(const sql::SeedCase& seed,
                                       const std::vector<OracleKind>& kinds,
                                       TargetAdapter& adapter, sql::Rng& rng);

}  // namespace cf::oracle
