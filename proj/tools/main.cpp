// clausefuzz command line: campaign runner plus replay/distance/trim debug
// subcommands. Reports go to files, logs to stderr.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "clausefuzz/engine/engine.hpp"
#include "clausefuzz/minidb/minidb.hpp"
#include "clausefuzz/patterns/patterns.hpp"
#include "clausefuzz/sql/parser.hpp"
#include "clausefuzz/subprocess.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kItersPerSecond = 25;  // virtual-clock rate for --time budgets

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

struct FuzzOptions {
  std::string target = "minidb";
  std::string command;
  std::string separator = "\t";
  std::string null_sentinel;
  std::string patterns_path;
  std::string oracles = "norec,tlp,index,rowid,likely";
  double time_budget = 0;
  int iterations = 0;
  uint64_t rng_seed = 1;
  int workers = 1;
  std::string bugs;
  std::string out_dir = "out";
  std::string profile = "default";
  bool baseline = false;
};

struct CliError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void apply_config_file(FuzzOptions& o, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CliError("cannot open config file " + path);
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_object())
    throw CliError("config file is not a JSON object: " + path);

  auto str = [&](const char* key, std::string& dst) {
    if (j.contains(key)) dst = j.at(key).get<std::string>();
  };
  auto list_or_str = [&](const char* key, std::string& dst) {
    if (!j.contains(key)) return;
    const json& v = j.at(key);
    if (v.is_array()) {
      std::string s;
      for (const auto& e : v) {
        if (!s.empty()) s += ",";
        s += e.get<std::string>();
      }
      dst = s;
    } else {
      dst = v.get<std::string>();
    }
  };
  str("target", o.target);
  str("command", o.command);
  str("separator", o.separator);
  str("null_sentinel", o.null_sentinel);
  str("patterns", o.patterns_path);
  list_or_str("oracles", o.oracles);
  if (j.contains("time")) o.time_budget = j.at("time").get<double>();
  if (j.contains("iters")) o.iterations = j.at("iters").get<int>();
  if (j.contains("seed")) o.rng_seed = j.at("seed").get<uint64_t>();
  if (j.contains("workers")) o.workers = j.at("workers").get<int>();
  list_or_str("bugs", o.bugs);
  list_or_str("minidb_bugs", o.bugs);  // MINIDB_BUGS-equivalent key
  str("out", o.out_dir);
  str("profile", o.profile);
  if (j.contains("baseline")) o.baseline = j.at("baseline").get<bool>();
}

std::set<cf::minidb::BugFlag> parse_bugs(const std::string& spec) {
  std::set<cf::minidb::BugFlag> out;
  for (const std::string& name : split_commas(spec)) {
    int f = cf::minidb::bug_flag_from_name(name);
    if (f < 0) throw CliError("unknown bug flag: " + name);
    out.insert(static_cast<cf::minidb::BugFlag>(f));
  }
  return out;
}

std::vector<cf::oracle::OracleKind> parse_oracles(const std::string& spec) {
  std::vector<cf::oracle::OracleKind> out;
  for (const std::string& name : split_commas(spec)) {
    auto k = cf::oracle::oracle_from_name(name);
    if (!k) throw CliError("unknown oracle: " + name);
    out.push_back(*k);
  }
  if (out.empty()) throw CliError("no oracles selected");
  return out;
}

cf::sql::GenProfile parse_profile(const std::string& name) {
  if (name == "default") return {};
  if (name == "ddl-only" || name == "ddl_only") return cf::sql::GenProfile::ddl_only();
  if (name == "no-index" || name == "no_index") {
    cf::sql::GenProfile p;
    p.indexes = p.partial_index = false;
    return p;
  }
  throw CliError("unknown generation profile: " + name);
}

std::unique_ptr<cf::TargetAdapter> make_adapter(const FuzzOptions& o,
                                                const std::set<cf::minidb::BugFlag>& bugs) {
  if (o.target == "minidb") return std::make_unique<cf::minidb::MiniDb>(bugs);
  if (o.target == "subprocess") {
    if (o.command.empty()) throw CliError("subprocess target requires --cmd");
    cf::SubprocessAdapter::Options so;
    so.command = o.command;
    so.separator = o.separator;
    so.null_sentinel = o.null_sentinel;
    return std::make_unique<cf::SubprocessAdapter>(so);
  }
  throw CliError("unknown target: " + o.target + " (expected minidb or subprocess)");
}

void write_outputs(const fs::path& dir, const cf::engine::CampaignSummary& s) {
  fs::create_directories(dir / "corpus");
  {
    std::ofstream rep(dir / "report.jsonl");
    for (const auto& r : s.reports) rep << r.to_json() << "\n";
  }
  {
    std::ofstream stats(dir / "stats.csv");
    stats << cf::engine::StatsRow::csv_header() << "\n";
    for (const auto& row : s.stats) stats << row.to_csv() << "\n";
  }
  for (const auto& seed : s.corpus) {
    std::ofstream f(dir / "corpus" / (seed.id + ".sql"));
    f << seed.render();
  }
}

int cmd_fuzz(const FuzzOptions& opt) {
  int iters = opt.iterations;
  if (iters <= 0 && opt.time_budget > 0)
    iters = int(opt.time_budget * kItersPerSecond);
  if (iters <= 0) throw CliError("budget must be positive (--time or --iters)");
  if (opt.workers < 1) throw CliError("workers must be >= 1");

  std::set<cf::minidb::BugFlag> bugs = parse_bugs(opt.bugs);
  if (!bugs.empty() && opt.target != "minidb")
    throw CliError("bug flags only apply to the minidb target");

  cf::engine::CampaignConfig cfg;
  cfg.oracles = parse_oracles(opt.oracles);
  cfg.profile = parse_profile(opt.profile);
  cfg.iterations = iters;
  cfg.rng_seed = opt.rng_seed;
  cfg.guidance = !opt.baseline;
  cfg.validate();

  // Distance guidance needs a call graph and resolvable patterns; both exist
  // only for minidb. Subprocess targets run coverage-only.
  std::optional<cf::dist::CallGraph> cg;
  std::vector<cf::dist::Target> targets;
  if (opt.target == "minidb") {
    cg = cf::minidb::MiniDb::call_graph();
    std::string pats_path = opt.patterns_path;
    if (pats_path.empty() && fs::exists("patterns/minidb.json"))
      pats_path = "patterns/minidb.json";
    if (!pats_path.empty()) {
      cf::patterns::PatternSet pats = cf::patterns::load_patterns(pats_path, &*cg);
      targets = cf::engine::make_targets(pats, "minidb", *cg);
    }
    if (targets.empty())
      std::cerr << "note: no resolvable patterns, running coverage-only\n";
  } else if (!opt.patterns_path.empty()) {
    // Catalog still validates, but chains cannot guide an untraced target.
    cf::patterns::load_patterns(opt.patterns_path);
    std::cerr << "note: subprocess target emits no trace, running coverage-only\n";
  }

  fs::path out(opt.out_dir);
  fs::create_directories(out);

  std::vector<cf::engine::CampaignSummary> sums(size_t(opt.workers));
  std::vector<std::string> errors(size_t(opt.workers));
  auto work = [&](int w) {
    try {
      cf::engine::CampaignConfig wcfg = cfg;
      wcfg.rng_seed = cfg.rng_seed + uint64_t(w);
      auto adapter = make_adapter(opt, bugs);
      sums[size_t(w)] = cf::engine::run_campaign(
          wcfg, *adapter, cg ? &*cg : nullptr, targets);
    } catch (const std::exception& e) {
      errors[size_t(w)] = e.what();
    }
  };
  if (opt.workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < opt.workers; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  for (const std::string& err : errors)
    if (!err.empty()) throw CliError("worker failed: " + err);

  size_t total_bugs = 0;
  if (opt.workers == 1) {
    write_outputs(out, sums[0]);
    total_bugs = sums[0].reports.size();
  } else {
    std::ofstream merged(out / "report.jsonl");
    for (int w = 0; w < opt.workers; ++w) {
      fs::path wdir = out / ("worker" + std::to_string(w));
      write_outputs(wdir, sums[size_t(w)]);
      for (const auto& r : sums[size_t(w)].reports) merged << r.to_json() << "\n";
      total_bugs += sums[size_t(w)].reports.size();
    }
  }

  for (int w = 0; w < opt.workers; ++w)
    std::cerr << "worker " << w << ": " << sums[size_t(w)].iterations
              << " iterations, " << sums[size_t(w)].covered_edges
              << " edges, " << sums[size_t(w)].reports.size() << " bugs\n";
  std::cerr << "report: " << (out / "report.jsonl").string() << "\n";
  return total_bugs > 0 ? 2 : 0;
}

struct ReplayOptions {
  std::string seed_file;
  std::string target = "minidb";
  std::string command;
  std::string separator = "\t";
  std::string null_sentinel;
  std::string oracles = "norec,tlp,index,rowid,likely";
  std::string bugs;
  uint64_t rng_seed = 1;
};

int cmd_replay(const ReplayOptions& opt) {
  std::ifstream in(opt.seed_file);
  if (!in) {
    std::cerr << "error: cannot open " << opt.seed_file << "\n";
    return 1;
  }
  std::stringstream buf;
  buf << in.rdbuf();

  cf::sql::SeedCase seed;
  try {
    seed = cf::sql::make_seed(cf::sql::parse(buf.str()));
  } catch (const cf::sql::SyntaxError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  FuzzOptions fo;
  fo.target = opt.target;
  fo.command = opt.command;
  fo.separator = opt.separator;
  fo.null_sentinel = opt.null_sentinel;
  auto adapter = make_adapter(fo, parse_bugs(opt.bugs));

  cf::ExecutionOutcome outcome = adapter->execute(seed.statements);
  for (size_t i = 0; i < outcome.results.size(); ++i) {
    const cf::StatementResult& r = outcome.results[i];
    std::cout << "-- statement " << (i + 1) << ": ";
    if (!r.ok)
      std::cout << "error: " << r.error << "\n";
    else if (!r.has_result)
      std::cout << "ok\n";
    else {
      std::cout << r.result.rows.size() << " row(s)\n";
      std::cout << r.result.render();
      if (!r.result.rows.empty()) std::cout << "\n";
    }
  }

  bool mismatch = false;
  cf::sql::Rng rng(opt.rng_seed);
  auto verdicts =
      cf::oracle::run_oracles(seed, parse_oracles(opt.oracles), *adapter, rng);
  for (const auto& v : verdicts) {
    std::cout << "oracle " << cf::oracle::oracle_name(v.kind) << ": "
              << cf::oracle::verdict_name(v.status);
    if (!v.reason.empty()) std::cout << " (" << v.reason << ")";
    std::cout << "\n";
    if (v.status == cf::oracle::OracleVerdict::Status::Mismatch) {
      mismatch = true;
      std::cout << "  original: " << v.original_sql << "\n"
                << "  variant:  " << v.variant_sql << "\n"
                << "  output: {" << v.variant_result << "}, expected: {"
                << v.original_result << "}\n";
    }
  }
  return mismatch ? 2 : 0;
}

std::string fmt_distance(const cf::dist::Distance& d) {
  if (!d) return "undefined";
  char buf[32];
  snprintf(buf, sizeof buf, "%g", *d);
  return buf;
}

int cmd_distance(const std::string& trace_path, const std::string& pattern_id,
                 const std::string& catalog_path, const std::string& cg_path) {
  cf::dist::CallGraph cg = cf::dist::CallGraph::load(cg_path);
  cf::patterns::PatternSet pats = cf::patterns::load_patterns(catalog_path, &cg);
  const cf::patterns::BugPattern* p = pats.find(pattern_id);
  if (!p) {
    std::cerr << "error: unknown pattern " << pattern_id << "\n";
    return 1;
  }
  std::vector<cf::dist::FunctionId> chain;
  try {
    chain = cf::patterns::resolve_chain(*p, cg);
  } catch (const cf::patterns::UnresolvedFunction& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  if (chain.empty()) {
    std::cerr << "error: pattern " << pattern_id << " has no target chain\n";
    return 1;
  }

  std::ifstream in(trace_path);
  if (!in) {
    std::cerr << "error: cannot open " << trace_path << "\n";
    return 1;
  }
  std::stringstream buf;
  buf << in.rdbuf();
  cf::dist::CtlExtract ctl;
  try {
    ctl = cf::dist::extract_ctl(cf::dist::parse_trace(buf.str()));
  } catch (const cf::dist::TraceFormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  if (ctl.blocks.empty()) {
    std::cerr << "error: trace contains no call events (empty seed block set)\n";
    return 1;
  }

  auto block_str = [&](const cf::dist::Block& b) {
    std::string fn = cg.has_function(b.fn) ? cg.name(b.fn)
                                           : "f" + std::to_string(b.fn);
    return fn + ":" + std::to_string(b.block);
  };

  cf::dist::BlockSet tbb = cf::dist::target_blocks(chain, cg);
  std::cout << "pattern: " << p->id << "\n";
  std::cout << "target chain:";
  for (auto f : chain) std::cout << " " << cg.name(f);
  std::cout << "\ntarget blocks (TBB):";
  for (const auto& b : tbb) std::cout << " " << block_str(b);
  std::cout << "\nseed blocks (SBB):";
  for (const auto& b : ctl.blocks) std::cout << " " << block_str(b);
  std::cout << "\nper-block distance to TBB:\n";
  for (const auto& b : ctl.blocks)
    std::cout << "  " << block_str(b) << " -> "
              << fmt_distance(cf::dist::dist_to_target_set(b, tbb, cg)) << "\n";

  cf::dist::Distance d = cf::dist::chain_distance(ctl.blocks, tbb, cg);
  std::set<cf::dist::FunctionId> target_fns(chain.begin(), chain.end());
  int similarity = 0;
  for (auto f : ctl.chain)
    if (target_fns.count(f)) ++similarity;
  cf::dist::EnergyPolicy policy;
  std::cout << "chain distance: " << fmt_distance(d) << "\n";
  std::cout << "similarity: " << similarity << "\n";
  std::cout << "energy: " << cf::dist::energy(d, policy) << "\n";
  return 0;
}

int cmd_trim(const std::string& trace_path, const std::string& tags_spec,
             const std::string& cg_path) {
  std::ifstream in(trace_path);
  if (!in) {
    std::cerr << "error: cannot open " << trace_path << "\n";
    return 1;
  }
  std::stringstream buf;
  buf << in.rdbuf();
  cf::dist::Trace trace;
  try {
    trace = cf::dist::parse_trace(buf.str());
  } catch (const cf::dist::TraceFormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  auto tag_list = split_commas(tags_spec);
  std::set<std::string> tags(tag_list.begin(), tag_list.end());
  std::vector<cf::dist::FunctionId> chain;
  try {
    chain = cf::patterns::trim_chain(trace, tags);
  } catch (const cf::patterns::NoTaggedFunctions& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  std::optional<cf::dist::CallGraph> cg;
  if (!cg_path.empty()) cg = cf::dist::CallGraph::load(cg_path);
  for (auto f : chain) {
    if (cg && cg->has_function(f))
      std::cout << cg->name(f) << "\n";
    else
      std::cout << f << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"clause-guided directed fuzzer for DBMS logic bugs"};
  app.require_subcommand(1);

  // fuzz: flag values that the user actually passed override config-file
  // values, which override built-in defaults.
  FuzzOptions fz;
  std::string config_path;
  auto* fuzz = app.add_subcommand("fuzz", "run a fuzzing campaign");
  fuzz->add_option("--config", config_path, "JSON config file");
  fuzz->add_option("--target", fz.target, "minidb | subprocess");
  fuzz->add_option("--cmd", fz.command, "shell command for the subprocess target");
  fuzz->add_option("--separator", fz.separator, "subprocess column separator");
  fuzz->add_option("--null", fz.null_sentinel, "subprocess NULL sentinel");
  fuzz->add_option("--patterns", fz.patterns_path, "bug-pattern catalog (JSON)");
  fuzz->add_option("--oracles", fz.oracles, "comma list: norec,tlp,index,rowid,likely");
  fuzz->add_option("--time", fz.time_budget, "budget in seconds");
  fuzz->add_option("--iters", fz.iterations, "budget in iterations (wins over --time)");
  fuzz->add_option("--seed", fz.rng_seed, "rng seed");
  fuzz->add_option("--workers", fz.workers, "independent campaign workers");
  fuzz->add_option("--bugs", fz.bugs, "minidb bug flags, comma list");
  fuzz->add_option("--out", fz.out_dir, "output directory");
  fuzz->add_option("--profile", fz.profile, "generation profile: default | ddl-only | no-index");
  fuzz->add_flag("--baseline", fz.baseline, "disable distance guidance (equal energies)");

  ReplayOptions rp;
  auto* replay = app.add_subcommand("replay", "execute one SQL file and run the oracles");
  replay->add_option("file", rp.seed_file, "SQL file")->required();
  replay->add_option("--target", rp.target, "minidb | subprocess");
  replay->add_option("--cmd", rp.command, "shell command for the subprocess target");
  replay->add_option("--separator", rp.separator, "subprocess column separator");
  replay->add_option("--null", rp.null_sentinel, "subprocess NULL sentinel");
  replay->add_option("--oracles", rp.oracles, "comma list of oracles");
  replay->add_option("--bugs", rp.bugs, "minidb bug flags, comma list");
  replay->add_option("--seed", rp.rng_seed, "rng seed for oracle variants");

  std::string d_trace, d_pattern, d_catalog, d_cg;
  auto* distance = app.add_subcommand("distance", "distance worksheet for one trace");
  distance->add_option("trace", d_trace, "trace file")->required();
  distance->add_option("--pattern", d_pattern, "pattern id")->required();
  distance->add_option("--patterns", d_catalog, "pattern catalog (JSON)")->required();
  distance->add_option("--callgraph", d_cg, "call-graph file")->required();

  std::string t_trace, t_tags, t_cg;
  auto* trim = app.add_subcommand("trim", "trim a tagged trace to its clause chain");
  trim->add_option("trace", t_trace, "trace file")->required();
  trim->add_option("--tags", t_tags, "data-object tags, comma list")->required();
  trim->add_option("--callgraph", t_cg, "call-graph file for function names");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*fuzz) {
      if (!config_path.empty()) {
        // Reparse flags on top of config-file values so explicit flags win.
        FuzzOptions from_file;
        if (const char* env = std::getenv("MINIDB_BUGS")) from_file.bugs = env;
        apply_config_file(from_file, config_path);
        auto copy_if = [&](const char* flag, auto member) {
          if (fuzz->count(flag) == 0) fz.*member = from_file.*member;
        };
        copy_if("--target", &FuzzOptions::target);
        copy_if("--cmd", &FuzzOptions::command);
        copy_if("--separator", &FuzzOptions::separator);
        copy_if("--null", &FuzzOptions::null_sentinel);
        copy_if("--patterns", &FuzzOptions::patterns_path);
        copy_if("--oracles", &FuzzOptions::oracles);
        copy_if("--time", &FuzzOptions::time_budget);
        copy_if("--iters", &FuzzOptions::iterations);
        copy_if("--seed", &FuzzOptions::rng_seed);
        copy_if("--workers", &FuzzOptions::workers);
        copy_if("--bugs", &FuzzOptions::bugs);
        copy_if("--out", &FuzzOptions::out_dir);
        copy_if("--profile", &FuzzOptions::profile);
        if (fuzz->count("--baseline") == 0) fz.baseline = from_file.baseline;
      } else if (fuzz->count("--bugs") == 0) {
        if (const char* env = std::getenv("MINIDB_BUGS")) fz.bugs = env;
      }
      return cmd_fuzz(fz);
    }
    if (*replay) return cmd_replay(rp);
    if (*distance) return cmd_distance(d_trace, d_pattern, d_catalog, d_cg);
    if (*trim) return cmd_trim(t_trace, t_tags, t_cg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
