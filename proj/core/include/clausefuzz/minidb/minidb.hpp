#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "clausefuzz/adapter.hpp"
#include "clausefuzz/dist/callgraph.hpp"

namespace cf::minidb {

/// Injectable logic bugs. All off = reference semantics.
enum class BugFlag {
  NocasePartialIndex,  // partial-index usability skips the collation check
  DistinctIgnore,      // DISTINCT keeps duplicate rows
  LikelyDropsRow,      // LIKELY(x) turns TRUE into FALSE near a partial index
  CastAffinity,        // CAST of text to a numeric type yields NULL inside WHERE
  MinNullRow,          // bare-MIN view queried under WHERE nulls companion columns
  OrderInEarlyOut,     // IN predicate plus ORDER BY stops after the first row
};

const char* bug_flag_name(BugFlag f);
/// -1 when the name is unknown.
int bug_flag_from_name(const std::string& name);
const std::vector<BugFlag>& all_bug_flags();
/// Pattern id this flag's wrong behavior corresponds to.
const char* bug_flag_pattern(BugFlag f);

/// In-process reference DBMS with full call/touch/return tracing.
class MiniDb : public TargetAdapter {
 public:
  MiniDb() = default;
  explicit MiniDb(std::set<BugFlag> bugs) : bugs_(std::move(bugs)) {}

  void set_bugs(std::set<BugFlag> bugs) { bugs_ = std::move(bugs); }
  const std::set<BugFlag>& bugs() const { return bugs_; }

  bool trace_capable() const override { return true; }
  void reset() override;
  ExecutionOutcome execute(const sql::StatementList& statements) override;

  /// Static call graph of the evaluator; every emitted call event's
  /// (caller, block, callee) triple is declared here.
  static dist::CallGraph call_graph();

  struct Table {
    std::string name;
    std::vector<sql::ColumnDef> columns;
    bool without_rowid = false;
    bool has_pk = false;
    std::vector<std::vector<Value>> rows;
  };
  struct Index {
    std::string name;
    std::string table;
    std::vector<std::string> columns;
    std::unique_ptr<sql::Expr> partial;  // owned clone
  };
  struct View {
    std::string name;
    std::unique_ptr<sql::Select> select;  // owned clone
  };

 private:
  std::set<BugFlag> bugs_;
  std::map<std::string, Table> tables_;
  std::map<std::string, Index> indexes_;
  std::map<std::string, View> views_;
};

}  // namespace cf::minidb
