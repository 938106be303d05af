#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "clausefuzz/dist/trace.hpp"
#include "clausefuzz/sql/ast.hpp"
#include "clausefuzz/value.hpp"

namespace cf {

/// Result of one statement: DDL/DML success, a query result, or an engine
/// error. Engine errors never abort the batch.
struct StatementResult {
  bool ok = true;
  bool has_result = false;
  QueryResult result;
  std::string error;

  static StatementResult done() { return {}; }
  static StatementResult rows(QueryResult r) {
    StatementResult s;
    s.has_result = true;
    s.result = std::move(r);
    return s;
  }
  static StatementResult fail(std::string msg) {
    StatementResult s;
    s.ok = false;
    s.error = std::move(msg);
    return s;
  }
};

struct ExecutionOutcome {
  std::vector<StatementResult> results;  // aligned 1:1 with statements
  dist::Trace trace;
  std::set<std::pair<dist::FunctionId, dist::FunctionId>> edges;
  double wall_time = 0.0;
};

struct AdapterFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class TargetAdapter {
 public:
  virtual ~TargetAdapter() = default;

  virtual bool trace_capable() const = 0;
  /// Drops all state; the next execute starts from an empty database.
  virtual void reset() = 0;
  virtual ExecutionOutcome execute(const sql::StatementList& statements) = 0;
};

}  // namespace cf
