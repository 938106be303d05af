#include <benchmark/benchmark.h>

#include "clausefuzz/dist/distance.hpp"
#include "clausefuzz/minidb/minidb.hpp"
#include "clausefuzz/sql/generate.hpp"
#include "clausefuzz/sql/parser.hpp"

namespace {

std::vector<std::string> corpus() {
  std::vector<std::string> out;
  cf::sql::Rng rng(1);
  cf::sql::GenProfile p;
  for (int i = 0; i < 64; ++i) out.push_back(cf::sql::generate({}, rng, p).render());
  return out;
}

void BM_Parse(benchmark::State& state) {
  auto texts = corpus();
  size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(cf::sql::parse(texts[i % texts.size()]));
    ++i;
  }
}
BENCHMARK(BM_Parse);

void BM_Render(benchmark::State& state) {
  cf::sql::Rng rng(1);
  cf::sql::GenProfile p;
  auto seed = cf::sql::generate({}, rng, p);
  for (auto _ : state) benchmark::DoNotOptimize(seed.render());
}
BENCHMARK(BM_Render);

void BM_Generate(benchmark::State& state) {
  cf::sql::Rng rng(1);
  cf::sql::GenProfile p;
  for (auto _ : state) benchmark::DoNotOptimize(cf::sql::generate({}, rng, p));
}
BENCHMARK(BM_Generate);

void BM_Mutate(benchmark::State& state) {
  cf::sql::Rng rng(1);
  cf::sql::GenProfile p;
  auto seed = cf::sql::generate({}, rng, p);
  for (auto _ : state) benchmark::DoNotOptimize(cf::sql::mutate(seed, 4, rng));
}
BENCHMARK(BM_Mutate);

void BM_ChainDistance(benchmark::State& state) {
  cf::dist::CallGraph cg = cf::minidb::MiniDb::call_graph();
  cf::dist::BlockSet sbb, tbb;
  for (const auto& [fn, blocks] : cg.block_table())
    for (auto b : blocks) ((fn % 2) ? sbb : tbb).insert({fn, b});
  for (auto _ : state)
    benchmark::DoNotOptimize(cf::dist::chain_distance(sbb, tbb, cg));
}
BENCHMARK(BM_ChainDistance);

void BM_Execute(benchmark::State& state) {
  cf::sql::Rng rng(1);
  cf::sql::GenProfile p;
  auto seed = cf::sql::generate({}, rng, p);
  for (auto _ : state) {
    cf::minidb::MiniDb db;
    benchmark::DoNotOptimize(db.execute(seed.statements));
  }
}
BENCHMARK(BM_Execute);

}  // namespace

BENCHMARK_MAIN();
