#include "clausefuzz/subprocess.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "clausefuzz/sql/printer.hpp"

namespace cf {
namespace {

std::string temp_path(const char* suffix) {
  static int counter = 0;
  std::ostringstream os;
  os << "/tmp/cf_sub_" << getpid() << "_" << counter++ << suffix;
  return os.str();
}

Value parse_field(const std::string& field, const std::string& null_sentinel) {
  if (field == null_sentinel) return Value::null();
  if (!field.empty()) {
    char* end = nullptr;
    errno = 0;
    long long i = std::strtoll(field.c_str(), &end, 10);
    if (errno == 0 && end && *end == '\0') return Value::integer(i);
    end = nullptr;
    errno = 0;
    double d = std::strtod(field.c_str(), &end);
    if (errno == 0 && end && *end == '\0') return Value::real(d);
  }
  return Value::text(field);
}

std::vector<std::string> split(const std::string& line, const std::string& sep) {
  std::vector<std::string> out;
  if (sep.empty()) {
    out.push_back(line);
    return out;
  }
  size_t pos = 0;
  while (true) {
    size_t hit = line.find(sep, pos);
    if (hit == std::string::npos) {
      out.push_back(line.substr(pos));
      break;
    }
    out.push_back(line.substr(pos, hit - pos));
    pos = hit + sep.size();
  }
  return out;
}

}  // namespace

SubprocessAdapter::SubprocessAdapter(Options opts) : opts_(std::move(opts)) {
  if (opts_.command.empty()) throw LaunchFailure("empty shell command");
}

void SubprocessAdapter::reset() {
  // Each batch runs in a fresh child process, so there is no state to drop.
}

ExecutionOutcome SubprocessAdapter::execute(const sql::StatementList& statements) {
  std::string in_path = temp_path(".sql");
  std::string out_path = temp_path(".out");

  // A marker SELECT after every statement lets us attribute output lines to
  // the statement that produced them.
  {
    std::ofstream in(in_path);
    if (!in) throw LaunchFailure("cannot create batch file " + in_path);
    for (size_t i = 0; i < statements.size(); ++i) {
      sql::StatementList one;
      one.push_back(statements[i].clone());
      std::string text = sql::render(one);
      in << text;
      if (text.empty() || text.back() != '\n') in << "\n";
      in << "SELECT '~~cf" << i << "~~';\n";
    }
  }

  std::ostringstream cmd;
  cmd << "timeout " << opts_.timeout_seconds << " " << opts_.command << " < "
      << in_path << " > " << out_path << " 2>/dev/null";

  auto start = std::chrono::steady_clock::now();
  int status = std::system(cmd.str().c_str());
  auto stop = std::chrono::steady_clock::now();

  int code = (status >= 0 && WIFEXITED(status)) ? WEXITSTATUS(status) : -1;
  if (code == 124) {
    std::remove(in_path.c_str());
    std::remove(out_path.c_str());
    throw Timeout("batch exceeded " + std::to_string(opts_.timeout_seconds) + " s");
  }
  if (code == 126 || code == 127 || code == -1) {
    std::remove(in_path.c_str());
    std::remove(out_path.c_str());
    throw LaunchFailure("cannot run shell command: " + opts_.command);
  }

  // Bucket output lines by the marker rows that follow each statement.
  std::vector<std::vector<std::string>> buckets(statements.size());
  size_t current = 0;
  {
    std::ifstream out(out_path);
    std::string line;
    while (std::getline(out, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.size() >= 6 && line.compare(0, 4, "~~cf") == 0 &&
          line.compare(line.size() - 2, 2, "~~") == 0) {
        size_t idx = std::strtoull(line.c_str() + 4, nullptr, 10);
        current = idx + 1;
        continue;
      }
      if (current < buckets.size()) buckets[current].push_back(line);
    }
  }
  std::remove(in_path.c_str());
  std::remove(out_path.c_str());
  if (current > statements.size())
    throw ParseFailure("marker index out of range in shell output");

  ExecutionOutcome outcome;
  outcome.wall_time = std::chrono::duration<double>(stop - start).count();
  for (size_t i = 0; i < statements.size(); ++i) {
    if (statements[i].kind != sql::SqlStatement::Kind::Select &&
        !(statements[i].kind == sql::SqlStatement::Kind::Raw &&
          !buckets[i].empty())) {
      outcome.results.push_back(StatementResult::done());
      continue;
    }
    QueryResult r;
    for (const std::string& line : buckets[i]) {
      std::vector<std::string> fields = split(line, opts_.separator);
      std::vector<Value> row;
      row.reserve(fields.size());
      for (const std::string& f : fields) row.push_back(parse_field(f, opts_.null_sentinel));
      if (r.columns == 0) r.columns = row.size();
      if (row.size() != r.columns)
        throw ParseFailure("ragged row width in shell output: " + line);
      r.rows.push_back(std::move(row));
    }
    if (r.columns == 0) r.columns = 1;  // empty result, width unknown
    if (statements[i].kind == sql::SqlStatement::Kind::Select)
      r.ordered = !statements[i].select->order_by.empty();
    outcome.results.push_back(StatementResult::rows(std::move(r)));
  }
  return outcome;
}

}  // namespace cf
