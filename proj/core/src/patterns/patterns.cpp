#include "clausefuzz/patterns/patterns.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace cf::patterns {

const char* category_name(ClauseCategory c) {
  switch (c) {
    case ClauseCategory::TableElementSchema: return "table_element_schema";
    case ClauseCategory::DataProcessingFunction: return "data_processing_function";
    case ClauseCategory::ConditionalExpression: return "conditional_expression";
    case ClauseCategory::SpecialKeyword: return "special_keyword";
    case ClauseCategory::QueryOptimizationFunction: return "query_optimization_function";
  }
  return "?";
}

ClauseCategory category_from_name(const std::string& name) {
  if (name == "table_element_schema") return ClauseCategory::TableElementSchema;
  if (name == "data_processing_function") return ClauseCategory::DataProcessingFunction;
  if (name == "conditional_expression") return ClauseCategory::ConditionalExpression;
  if (name == "special_keyword") return ClauseCategory::SpecialKeyword;
  if (name == "query_optimization_function") return ClauseCategory::QueryOptimizationFunction;
  throw SchemaError("unknown clause category: " + name);
}

std::map<std::string, int> PatternSet::counts_by_dbms() const {
  std::map<std::string, int> counts;
  for (const auto& p : patterns) ++counts[p.dbms];
  return counts;
}

const BugPattern* PatternSet::find(const std::string& id) const {
  for (const auto& p : patterns)
    if (p.id == id) return &p;
  return nullptr;
}

std::vector<const BugPattern*> PatternSet::for_dbms(const std::string& dbms) const {
  std::vector<const BugPattern*> out;
  for (const auto& p : patterns)
    if (p.dbms == dbms) out.push_back(&p);
  return out;
}

PatternSet parse_patterns(const std::string& json_text, const dist::CallGraph* cg,
                          bool strict) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("pattern catalog is not valid JSON: ") + e.what());
  }
  if (!doc.is_array() || doc.empty())
    throw SchemaError("pattern catalog must be a nonempty JSON array");

  PatternSet set;
  std::set<std::string> ids;
  for (const auto& item : doc) {
    if (!item.is_object()) throw SchemaError("pattern entry must be an object");
    BugPattern p;
    try {
      p.id = item.at("id").get<std::string>();
      p.dbms = item.at("dbms").get<std::string>();
      for (const auto& c : item.at("clauses")) {
        Clause cl;
        cl.name = c.at("name").get<std::string>();
        cl.category = category_from_name(c.at("category").get<std::string>());
        p.clauses.push_back(std::move(cl));
      }
      for (const auto& f : item.at("target_chain"))
        p.target_chain.push_back(f.get<std::string>());
      p.example_bug = item.value("example_bug", "");
      if (item.contains("data_object_tags"))
        for (const auto& t : item.at("data_object_tags"))
          p.data_object_tags.push_back(t.get<std::string>());
    } catch (const nlohmann::json::exception& e) {
      throw SchemaError(std::string("malformed pattern entry: ") + e.what());
    }
    if (!ids.insert(p.id).second) throw DuplicatePatternId("duplicate pattern id: " + p.id);
    if (strict && cg) {
      for (const auto& fn : p.target_chain)
        if (cg->id_of(fn) < 0)
          throw UnresolvedFunction("pattern " + p.id + ": unknown function " + fn);
    }
    set.patterns.push_back(std::move(p));
  }
  return set;
}

PatternSet load_patterns(const std::string& path, const dist::CallGraph* cg, bool strict) {
  std::ifstream f(path);
  if (!f) throw SchemaError("cannot open pattern catalog: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_patterns(ss.str(), cg, strict);
}

std::vector<dist::FunctionId> trim_chain(const dist::Trace& trace,
                                         const std::set<std::string>& tags) {
  // attribute touches to the innermost active function and note which
  // functions touched any of the requested tags
  std::set<dist::FunctionId> touched;
  for (const auto& ev : trace) {
    if (ev.kind == dist::TraceEvent::Kind::Touch && tags.count(ev.tag))
      touched.insert(ev.fn);
  }
  std::vector<dist::FunctionId> out;
  std::set<dist::FunctionId> seen;
  auto maybe = [&](dist::FunctionId f) {
    if (touched.count(f) && seen.insert(f).second) out.push_back(f);
  };
  for (const auto& ev : trace) {
    switch (ev.kind) {
      case dist::TraceEvent::Kind::Call:
        maybe(ev.caller);
        maybe(ev.callee);
        break;
      case dist::TraceEvent::Kind::Touch:
        maybe(ev.fn);
        break;
      default:
        break;
    }
  }
  if (out.empty()) throw NoTaggedFunctions("no function touches the requested tags");
  return out;
}

bool pattern_hit(const dist::CtlSequence& ctl, const std::vector<dist::FunctionId>& chain) {
  if (chain.empty()) return false;
  if (chain.size() == 1) {
    for (const auto& e : ctl)
      if (e.caller == chain[0] || e.callee == chain[0]) return true;
    return false;
  }
  size_t pair_idx = 0;  // next pair (chain[pair_idx], chain[pair_idx+1]) to find
  for (const auto& e : ctl) {
    if (e.caller == chain[pair_idx] && e.callee == chain[pair_idx + 1]) {
      ++pair_idx;
      if (pair_idx + 1 >= chain.size()) return true;
    }
  }
  return false;
}

std::vector<dist::FunctionId> resolve_chain(const BugPattern& p, const dist::CallGraph& cg) {
  std::vector<dist::FunctionId> out;
  for (const auto& fn : p.target_chain) {
    dist::FunctionId id = cg.id_of(fn);
    if (id < 0) throw UnresolvedFunction("pattern " + p.id + ": unknown function " + fn);
    out.push_back(id);
  }
  return out;
}

}  // namespace cf::patterns
