#pragma once

#include <string>

#include "clausefuzz/adapter.hpp"

namespace cf {

struct LaunchFailure : AdapterFailure {
  using AdapterFailure::AdapterFailure;
};
struct Timeout : AdapterFailure {
  using AdapterFailure::AdapterFailure;
};
struct ParseFailure : AdapterFailure {
  using AdapterFailure::AdapterFailure;
};

/// Runs a DBMS shell as a child process per batch: statements go to stdin,
/// rows come back as separator-delimited lines. No trace is available, so
/// campaigns against it run distance-undefined.
class SubprocessAdapter : public TargetAdapter {
 public:
  struct Options {
    std::string command;         // shell command, e.g. "sqlite3 -batch"
    std::string separator = "\t";
    std::string null_sentinel = "";  // how the shell prints NULL
    int timeout_seconds = 10;
  };

  explicit SubprocessAdapter(Options opts);

  bool trace_capable() const override { return false; }
  void reset() override;
  ExecutionOutcome execute(const sql::StatementList& statements) override;

  const Options& options() const { return opts_; }

 private:
  Options opts_;
};

}  // namespace cf
