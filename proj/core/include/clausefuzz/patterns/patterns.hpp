#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "clausefuzz/dist/callgraph.hpp"
#include "clausefuzz/dist/trace.hpp"

namespace cf::patterns {

enum class ClauseCategory {
  TableElementSchema,
  DataProcessingFunction,
  ConditionalExpression,
  SpecialKeyword,
  QueryOptimizationFunction,
};

const char* category_name(ClauseCategory c);
ClauseCategory category_from_name(const std::string& name);

struct Clause {
  std::string name;
  ClauseCategory category;
};

/// One clause-combination bug pattern and its target function chain.
struct BugPattern {
  std::string id;
  std::string dbms;  // sqlite | mysql | postgresql | tidb | minidb
  std::vector<Clause> clauses;
  std::vector<std::string> target_chain;  // function names; may be empty ("Others" rows)
  std::string example_bug;
  std::vector<std::string> data_object_tags;

  bool targetable() const { return !target_chain.empty(); }
};

struct PatternError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SchemaError : PatternError {
  using PatternError::PatternError;
};
struct DuplicatePatternId : PatternError {
  using PatternError::PatternError;
};
struct UnresolvedFunction : PatternError {
  using PatternError::PatternError;
};

struct PatternSet {
  std::vector<BugPattern> patterns;

  std::map<std::string, int> counts_by_dbms() const;
  const BugPattern* find(const std::string& id) const;
  std::vector<const BugPattern*> for_dbms(const std::string& dbms) const;
};

/// Loads a JSON pattern catalog. In strict mode every target-chain function
/// must resolve against `cg`.
PatternSet load_patterns(const std::string& path, const dist::CallGraph* cg = nullptr,
                         bool strict = false);
PatternSet parse_patterns(const std::string& json_text, const dist::CallGraph* cg = nullptr,
                          bool strict = false);

struct NoTaggedFunctions : PatternError {
  using PatternError::PatternError;
};

/// Trims a complete tagged trace down to the ordered distinct functions that
/// touch at least one of the given data-object tags.
std::vector<dist::FunctionId> trim_chain(const dist::Trace& trace,
                                         const std::set<std::string>& tags);

/// True iff the pattern's chain appears in the call events: each consecutive
/// pair occurs as a direct call somewhere, and the pairs occur in chain order.
bool pattern_hit(const dist::CtlSequence& ctl, const std::vector<dist::FunctionId>& chain);

/// Resolves a pattern's function names against a call graph; throws
/// UnresolvedFunction on a miss.
std::vector<dist::FunctionId> resolve_chain(const BugPattern& p, const dist::CallGraph& cg);

}  // namespace cf::patterns
